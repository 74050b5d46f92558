use serde::Serialize;

use crate::backend::{Backend, Element};
use crate::rewrite::Rule;
use crate::trace::Trace;

/// How much of the carrier a positive verdict covers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum Coverage {
    /// Every element of a finite carrier was examined.
    Exhaustive,
    /// A certificate covers the whole (possibly infinite) carrier.
    Proven(String),
    /// Only elements up to the given size were examined.
    UpToBound(usize),
}

/// Evidence against a property. Every variant can be replayed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// A non-empty chain of proper steps returning to its start.
    Cycle(Trace),
    /// A chain `u →+ p·u·q` where `p·q` has positive additive weight, so
    /// that `u →+ p u q →+ p p u q q →+ ...` never stops.
    Pump { trace: Trace, left: Element, right: Element },
    /// Two reductions from a common source with no common reduct.
    Peak { left: Trace, right: Trace, note: String },
    /// Homomorphism law broken on a pair.
    HomLaw { x: Element, y: Element },
    /// The image of a rule is not reachable in the target.
    RuleUnreachable { rule: Rule },
    Message(String),
}

impl Witness {
    pub fn render(&self, backend: &Backend) -> String {
        match self {
            Witness::Cycle(t) => format!("cycle {}", t.render(backend)),
            Witness::Pump { trace, left, right } => format!(
                "pump {} with {} = {}·{}·{}",
                trace.render(backend),
                backend.format(trace.end()),
                backend.format(left),
                backend.format(&trace.start),
                backend.format(right)
            ),
            Witness::Peak { left, right, note } => format!(
                "peak {} | {} ({note})",
                left.render(backend),
                right.render(backend)
            ),
            Witness::HomLaw { x, y } => format!(
                "homomorphism law fails on ({}, {})",
                backend.format(x),
                backend.format(y)
            ),
            Witness::RuleUnreachable { rule } => format!(
                "image of rule {} -> {} is not reachable",
                backend.format(&rule.lhs),
                backend.format(&rule.rhs)
            ),
            Witness::Message(m) => m.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckVerdict {
    Verified(Coverage),
    Refuted(Witness),
    Unknown { bound: usize, reason: String },
}

impl CheckVerdict {
    pub fn unknown(bound: usize, reason: impl Into<String>) -> Self {
        CheckVerdict::Unknown {
            bound,
            reason: reason.into(),
        }
    }

    pub fn is_verified(&self) -> bool {
        matches!(self, CheckVerdict::Verified(_))
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, CheckVerdict::Refuted(_))
    }

    /// CLI exit code: 0 verified, 1 refuted, 2 unknown.
    pub fn exit_code(&self) -> i32 {
        match self {
            CheckVerdict::Verified(_) => 0,
            CheckVerdict::Refuted(_) => 1,
            CheckVerdict::Unknown { .. } => 2,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            CheckVerdict::Verified(_) => "verified",
            CheckVerdict::Refuted(_) => "refuted",
            CheckVerdict::Unknown { .. } => "unknown",
        }
    }

    /// The weaker of two verdicts: refuted beats unknown beats verified,
    /// and coverage degrades to the narrower one.
    pub fn and(self, other: CheckVerdict) -> CheckVerdict {
        use CheckVerdict::*;
        match (self, other) {
            (Refuted(w), _) | (_, Refuted(w)) => Refuted(w),
            (u @ Unknown { .. }, _) | (_, u @ Unknown { .. }) => u,
            (Verified(a), Verified(b)) => Verified(narrower(a, b)),
        }
    }

    pub fn render(&self, backend: &Backend) -> String {
        match self {
            CheckVerdict::Verified(Coverage::Exhaustive) => "verified (exhaustive)".into(),
            CheckVerdict::Verified(Coverage::Proven(why)) => format!("verified ({why})"),
            CheckVerdict::Verified(Coverage::UpToBound(b)) => format!("verified up to bound {b}"),
            CheckVerdict::Refuted(w) => format!("refuted: {}", w.render(backend)),
            CheckVerdict::Unknown { bound, reason } => {
                format!("unknown within bound {bound}: {reason}")
            }
        }
    }
}

fn narrower(a: Coverage, b: Coverage) -> Coverage {
    match (a, b) {
        (Coverage::UpToBound(x), Coverage::UpToBound(y)) => Coverage::UpToBound(x.min(y)),
        (c @ Coverage::UpToBound(_), _) | (_, c @ Coverage::UpToBound(_)) => c,
        (c @ Coverage::Proven(_), _) | (_, c @ Coverage::Proven(_)) => c,
        _ => Coverage::Exhaustive,
    }
}

/// Result of a bounded search for a derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Search {
    Found(Trace),
    /// The search space was exhausted: no derivation exists.
    Absent,
    /// The budget ran out first.
    Unknown(String),
}

impl Search {
    pub fn found(self) -> Option<Trace> {
        match self {
            Search::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Search::Found(_))
    }
}
