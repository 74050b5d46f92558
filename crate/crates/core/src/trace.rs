//! Derivation traces: checkable witnesses of `a →* b` and `a ↔* b`.

use serde::Serialize;

use crate::backend::{Backend, Element};
use crate::error::{Error, Result};
use crate::rewrite::{Mrs, Rule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn flipped(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }

    pub fn sign(self) -> char {
        match self {
            Direction::Forward => '+',
            Direction::Backward => '-',
        }
    }
}

/// One application of a rule in context. Forward means
/// `before = left·lhs·right` and `after = left·rhs·right`; backward swaps
/// the roles of the two rule sides.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub rule: Rule,
    pub left: Element,
    pub right: Element,
    pub direction: Direction,
    pub before: Element,
    pub after: Element,
}

impl Step {
    pub fn new(backend: &Backend, rule: &Rule, left: Element, right: Element, direction: Direction) -> Step {
        let (from, to) = match direction {
            Direction::Forward => (&rule.lhs, &rule.rhs),
            Direction::Backward => (&rule.rhs, &rule.lhs),
        };
        Step {
            before: backend.mul3(&left, from, &right),
            after: backend.mul3(&left, to, &right),
            rule: rule.clone(),
            left,
            right,
            direction,
        }
    }

    pub fn is_proper(&self) -> bool {
        self.before != self.after
    }

    fn verify(&self, backend: &Backend) -> Result<()> {
        for e in [&self.left, &self.right, &self.rule.lhs, &self.rule.rhs] {
            backend.check(e)?;
        }
        let (from, to) = match self.direction {
            Direction::Forward => (&self.rule.lhs, &self.rule.rhs),
            Direction::Backward => (&self.rule.rhs, &self.rule.lhs),
        };
        if backend.mul3(&self.left, from, &self.right) != self.before {
            return Err(Error::InvalidTrace(format!(
                "{} ≠ {}·{}·{}",
                backend.format(&self.before),
                backend.format(&self.left),
                backend.format(from),
                backend.format(&self.right)
            )));
        }
        if backend.mul3(&self.left, to, &self.right) != self.after {
            return Err(Error::InvalidTrace(format!(
                "{} ≠ {}·{}·{}",
                backend.format(&self.after),
                backend.format(&self.left),
                backend.format(to),
                backend.format(&self.right)
            )));
        }
        Ok(())
    }

    pub fn reversed(&self) -> Step {
        Step {
            rule: self.rule.clone(),
            left: self.left.clone(),
            right: self.right.clone(),
            direction: self.direction.flipped(),
            before: self.after.clone(),
            after: self.before.clone(),
        }
    }
}

/// A chain of steps starting at `start`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Trace {
    pub start: Element,
    pub steps: Vec<Step>,
}

impl Trace {
    pub fn empty(start: Element) -> Self {
        Trace {
            start,
            steps: Vec::new(),
        }
    }

    pub fn end(&self) -> &Element {
        self.steps.last().map_or(&self.start, |s| &s.after)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_forward(&self) -> bool {
        self.steps.iter().all(|s| s.direction == Direction::Forward)
    }

    pub fn uses_rule(&self, rule: &Rule) -> bool {
        self.steps.iter().any(|s| s.rule == *rule)
    }

    pub fn push(&mut self, step: Step) {
        self.steps.push(step);
    }

    /// Re-verifies every step by multiplication and the chaining of
    /// consecutive elements.
    pub fn validate(&self, backend: &Backend) -> Result<()> {
        backend.check(&self.start)?;
        let mut current = &self.start;
        for (i, step) in self.steps.iter().enumerate() {
            if step.before != *current {
                return Err(Error::InvalidTrace(format!("step {i} does not continue the chain")));
            }
            step.verify(backend)
                .map_err(|e| Error::InvalidTrace(format!("step {i}: {e}")))?;
            current = &step.after;
        }
        Ok(())
    }

    /// As [`Trace::validate`], additionally requiring every rule used to be
    /// a rule of `mrs`.
    pub fn validate_in(&self, mrs: &Mrs) -> Result<()> {
        self.validate(&mrs.backend)?;
        for (i, step) in self.steps.iter().enumerate() {
            if !mrs.rules.contains(&step.rule) {
                return Err(Error::InvalidTrace(format!(
                    "step {i} uses {} which is not a rule of the system",
                    mrs.format_rule(&step.rule)
                )));
            }
        }
        Ok(())
    }

    /// Validates and checks the endpoints.
    pub fn proves(&self, mrs: &Mrs, a: &Element, b: &Element) -> Result<()> {
        self.validate_in(mrs)?;
        if self.start != *a || self.end() != b {
            return Err(Error::InvalidTrace(format!(
                "trace runs from {} to {}, expected {} to {}",
                mrs.backend.format(&self.start),
                mrs.backend.format(self.end()),
                mrs.backend.format(a),
                mrs.backend.format(b)
            )));
        }
        Ok(())
    }

    pub fn reversed(&self) -> Trace {
        Trace {
            start: self.end().clone(),
            steps: self.steps.iter().rev().map(Step::reversed).collect(),
        }
    }

    pub fn then(mut self, other: Trace) -> Result<Trace> {
        if *self.end() != other.start {
            return Err(Error::InvalidTrace("traces do not compose".into()));
        }
        self.steps.extend(other.steps);
        Ok(self)
    }

    /// The trace `x·w_i·y` obtained by multiplying every element by the
    /// context `(x, y)`.
    pub fn multiplied(&self, backend: &Backend, x: &Element, y: &Element) -> Trace {
        Trace {
            start: backend.mul3(x, &self.start, y),
            steps: self
                .steps
                .iter()
                .map(|s| Step {
                    rule: s.rule.clone(),
                    left: backend.mul(x, &s.left),
                    right: backend.mul(&s.right, y),
                    direction: s.direction,
                    before: backend.mul3(x, &s.before, y),
                    after: backend.mul3(x, &s.after, y),
                })
                .collect(),
        }
    }

    /// Drops steps whose source equals their target.
    pub fn without_improper(&self) -> Trace {
        Trace {
            start: self.start.clone(),
            steps: self.steps.iter().filter(|s| s.is_proper()).cloned().collect(),
        }
    }

    pub fn render(&self, backend: &Backend) -> String {
        let mut out = backend.format(&self.start);
        for s in &self.steps {
            let arrow = match s.direction {
                Direction::Forward => "->",
                Direction::Backward => "<-",
            };
            out.push_str(&format!(" {arrow} {}", backend.format(&s.after)));
        }
        out
    }

    /// One line per step in the certificate syntax used by scripts.
    pub fn certificate_lines(&self, backend: &Backend) -> Vec<String> {
        self.steps
            .iter()
            .map(|s| {
                format!(
                    "step {} {} | {} -> {} | {}",
                    s.direction.sign(),
                    backend.format(&s.left),
                    backend.format(&s.rule.lhs),
                    backend.format(&s.rule.rhs),
                    backend.format(&s.right)
                )
            })
            .collect()
    }
}
