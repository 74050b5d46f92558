//! Rules, systems, one-step rewriting, normal forms and derivation search.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::backend::{Backend, Element, DEFAULT_FACTOR_BUDGET};
use crate::check::{check_confluent, check_noetherian};
use crate::error::{Error, Result};
use crate::trace::{Direction, Step, Trace};
use crate::verdict::{CheckVerdict, Search};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    pub lhs: Element,
    pub rhs: Element,
}

impl Rule {
    pub fn new(lhs: Element, rhs: Element) -> Self {
        Rule { lhs, rhs }
    }

    pub fn is_degenerate(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Search and enumeration limits: element size for enumeration, number of
/// node expansions / rewrite steps for searches, and factor pairs per
/// factorization call.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub size: usize,
    pub steps: usize,
    pub factors: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            size: 8,
            steps: 20_000,
            factors: DEFAULT_FACTOR_BUDGET,
        }
    }
}

impl Budget {
    pub fn with_size(mut self, size: usize) -> Self {
        self.size = size;
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }
}

/// Steps leaving an element, deduplicated by target.
#[derive(Clone, Debug, Default)]
pub struct OneStep {
    pub steps: Vec<Step>,
    pub truncated: bool,
}

impl OneStep {
    pub fn targets(&self) -> BTreeSet<Element> {
        self.steps.iter().map(|s| s.after.clone()).collect()
    }
}

/// A monoidal rewriting system `(M, ·, R)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mrs {
    pub backend: Backend,
    pub rules: Vec<Rule>,
}

impl Mrs {
    /// Checks that every rule side lives in the backend; repeated rules
    /// are dropped, keeping the first occurrence.
    pub fn new(backend: Backend, rules: Vec<Rule>) -> Result<Self> {
        let mut out = Mrs {
            backend,
            rules: Vec::new(),
        };
        for rule in rules {
            out.backend.check(&rule.lhs)?;
            out.backend.check(&rule.rhs)?;
            if !out.rules.contains(&rule) {
                out.rules.push(rule);
            }
        }
        Ok(out)
    }

    pub fn from_literals(backend: Backend, rules: &[(&str, &str)]) -> Result<Self> {
        let rules = rules
            .iter()
            .map(|(l, r)| Ok(Rule::new(backend.parse(l)?, backend.parse(r)?)))
            .collect::<Result<Vec<_>>>()?;
        Mrs::new(backend, rules)
    }

    pub fn element(&self, literal: &str) -> Result<Element> {
        self.backend.parse(literal)
    }

    pub fn rule(&self, lhs: &str, rhs: &str) -> Result<Rule> {
        Ok(Rule::new(self.element(lhs)?, self.element(rhs)?))
    }

    pub fn format(&self, a: &Element) -> String {
        self.backend.format(a)
    }

    pub fn format_rule(&self, rule: &Rule) -> String {
        format!("{} -> {}", self.format(&rule.lhs), self.format(&rule.rhs))
    }

    pub fn has_rule(&self, rule: &Rule) -> bool {
        self.rules.contains(rule)
    }

    pub fn with_rule(&self, rule: Rule) -> Mrs {
        let mut out = self.clone();
        if !out.rules.contains(&rule) {
            out.rules.push(rule);
        }
        out
    }

    pub fn without_rule(&self, rule: &Rule) -> Mrs {
        let mut out = self.clone();
        out.rules.retain(|r| r != rule);
        out
    }

    /// The same ambient monoid with only the rules in `j`.
    pub fn subsystem(&self, j: &[Rule]) -> Mrs {
        Mrs {
            backend: self.backend.clone(),
            rules: j.to_vec(),
        }
    }

    fn steps_with(&self, a: &Element, budget: &Budget, direction: Direction) -> OneStep {
        let mut out = OneStep::default();
        let mut seen = BTreeSet::new();
        for rule in &self.rules {
            let (from, to) = match direction {
                Direction::Forward => (&rule.lhs, &rule.rhs),
                Direction::Backward => (&rule.rhs, &rule.lhs),
            };
            let rw = self.backend.rewrites(a, from, to, budget.factors);
            out.truncated |= rw.truncated;
            for (x, y, b) in rw.hits {
                if seen.insert(b.clone()) {
                    out.steps.push(Step {
                        rule: rule.clone(),
                        left: x,
                        right: y,
                        direction,
                        before: a.clone(),
                        after: b,
                    });
                }
            }
        }
        out
    }

    /// All one-step rewrites of `a`, improper ones included.
    pub fn one_step(&self, a: &Element, budget: &Budget) -> OneStep {
        self.steps_with(a, budget, Direction::Forward)
    }

    /// One-step rewrites whose result differs from `a`.
    pub fn proper_steps(&self, a: &Element, budget: &Budget) -> OneStep {
        let mut s = self.one_step(a, budget);
        s.steps.retain(Step::is_proper);
        s
    }

    /// Proper steps read backwards: elements `b` with `b → a`.
    pub fn predecessors(&self, a: &Element, budget: &Budget) -> OneStep {
        let mut s = self.steps_with(a, budget, Direction::Backward);
        s.steps.retain(Step::is_proper);
        s
    }

    /// `Some(true)` when `a` has no proper successor, `None` when the
    /// successor enumeration was truncated without finding one.
    pub fn is_irreducible(&self, a: &Element, budget: &Budget) -> Option<bool> {
        let s = self.proper_steps(a, budget);
        if !s.steps.is_empty() {
            Some(false)
        } else if s.truncated {
            None
        } else {
            Some(true)
        }
    }

    /// Follows the first proper step (rule order, then factorization
    /// order) until none remains.
    pub fn normal_form(&self, a: &Element, budget: &Budget) -> Result<Trace> {
        self.backend.check(a)?;
        let mut trace = Trace::empty(a.clone());
        loop {
            let current = trace.end().clone();
            let next = self.proper_steps(&current, budget);
            match next.steps.into_iter().next() {
                Some(step) => {
                    if trace.len() >= budget.steps {
                        return Err(Error::BudgetExhausted {
                            budget: budget.steps,
                            reached: self.format(&current),
                        });
                    }
                    trace.push(step);
                }
                None if next.truncated => {
                    return Err(Error::refused(format!(
                        "irreducibility of {} is unknown: successor enumeration truncated",
                        self.format(&current)
                    )))
                }
                None => return Ok(trace),
            }
        }
    }

    pub fn nf(&self, a: &Element, budget: &Budget) -> Result<Element> {
        Ok(self.normal_form(a, budget)?.end().clone())
    }

    /// Breadth-first search for `a →* b`.
    pub fn reaches(&self, a: &Element, b: &Element, budget: &Budget) -> Search {
        self.search(a, b, budget, false)
    }

    /// Breadth-first search for `a ↔* b` over steps in both directions.
    pub fn equivalent(&self, a: &Element, b: &Element, budget: &Budget) -> Search {
        self.search(a, b, budget, true)
    }

    fn search(&self, a: &Element, b: &Element, budget: &Budget, both: bool) -> Search {
        if a == b {
            return Search::Found(Trace::empty(a.clone()));
        }
        let mut parent: HashMap<Element, Step> = HashMap::new();
        let mut seen: BTreeSet<Element> = BTreeSet::from([a.clone()]);
        let mut queue = VecDeque::from([a.clone()]);
        let mut truncated = false;
        let mut expansions = 0usize;
        while let Some(current) = queue.pop_front() {
            if expansions >= budget.steps {
                return Search::Unknown(format!(
                    "{} expansions spent without reaching {}",
                    budget.steps,
                    self.format(b)
                ));
            }
            expansions += 1;
            let mut next = self.proper_steps(&current, budget);
            if both {
                let back = self.predecessors(&current, budget);
                next.truncated |= back.truncated;
                next.steps.extend(back.steps);
            }
            truncated |= next.truncated;
            for step in next.steps {
                if seen.insert(step.after.clone()) {
                    let target = step.after.clone();
                    parent.insert(target.clone(), step);
                    if target == *b {
                        return Search::Found(unwind(a, b, &parent));
                    }
                    queue.push_back(target);
                }
            }
        }
        if truncated {
            Search::Unknown("successor enumeration truncated".into())
        } else {
            Search::Absent
        }
    }
}

fn unwind(a: &Element, b: &Element, parent: &HashMap<Element, Step>) -> Trace {
    let mut steps = Vec::new();
    let mut cur = b.clone();
    while cur != *a {
        let step = parent[&cur].clone();
        cur = step.before.clone();
        steps.push(step);
    }
    steps.reverse();
    Trace {
        start: a.clone(),
        steps,
    }
}

/// A system together with its termination and confluence verdicts.
#[derive(Clone, Debug)]
pub struct CertifiedMrs {
    pub mrs: Mrs,
    pub noetherian: CheckVerdict,
    pub confluent: CheckVerdict,
    pub budget: Budget,
}

impl CertifiedMrs {
    pub fn certify(mrs: Mrs, budget: &Budget) -> Self {
        let noetherian = check_noetherian(&mrs, budget);
        let confluent = check_confluent(&mrs, budget);
        CertifiedMrs {
            mrs,
            noetherian,
            confluent,
            budget: *budget,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.noetherian.is_verified() && self.confluent.is_verified()
    }

    /// Fails unless both verdicts are positive.
    pub fn require(self) -> Result<Self> {
        if self.is_certified() {
            Ok(self)
        } else {
            Err(Error::refused(format!(
                "system is not certified Noetherian and confluent (noetherian: {}; confluent: {})",
                self.noetherian.render(&self.mrs.backend),
                self.confluent.render(&self.mrs.backend)
            )))
        }
    }

    pub fn nf(&self, a: &Element) -> Result<Element> {
        self.mrs.nf(a, &self.budget)
    }

    /// Decides `a ↔* b` by comparing normal forms and, when they agree,
    /// splices the two reductions into a valley.
    pub fn equivalent(&self, a: &Element, b: &Element) -> Result<Search> {
        let ta = self.mrs.normal_form(a, &self.budget)?;
        let tb = self.mrs.normal_form(b, &self.budget)?;
        if ta.end() != tb.end() {
            return Ok(Search::Absent);
        }
        Ok(Search::Found(ta.then(tb.reversed())?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parity() -> Mrs {
        Mrs::from_literals(Backend::Naturals, &[("2", "0")]).unwrap()
    }

    #[test]
    fn naturals_one_step_and_normal_form() {
        let m = parity();
        let b = Budget::default();
        let succ = m.one_step(&Element::Nat(5), &b).targets();
        assert_eq!(succ, BTreeSet::from([Element::Nat(3)]));
        let t = m.normal_form(&Element::Nat(7), &b).unwrap();
        assert_eq!(*t.end(), Element::Nat(1));
        t.validate_in(&m).unwrap();
        assert_eq!(m.is_irreducible(&Element::Nat(1), &b), Some(true));
        assert_eq!(m.is_irreducible(&Element::Nat(2), &b), Some(false));
    }

    #[test]
    fn degenerate_rule_keeps_element_irreducible() {
        let m = Mrs::from_literals(Backend::Naturals, &[("0", "0")]).unwrap();
        let b = Budget::default();
        assert!(!m.one_step(&Element::Nat(0), &b).steps.is_empty());
        assert_eq!(m.is_irreducible(&Element::Nat(0), &b), Some(true));
    }

    #[test]
    fn reaches_and_equivalent() {
        let m = parity();
        let b = Budget::default();
        let t = m.reaches(&Element::Nat(4), &Element::Nat(0), &b).found().unwrap();
        assert_eq!(t.render(&m.backend), "4 -> 2 -> 0");
        let free = Mrs::from_literals(Backend::free(["a", "b"]).unwrap(), &[("ab", "_")]).unwrap();
        let ba = free.element("ba").unwrap();
        assert_eq!(free.reaches(&ba, &free.backend.identity(), &b), Search::Absent);
        let e = m.equivalent(&Element::Nat(5), &Element::Nat(3), &b).found().unwrap();
        e.proves(&m, &Element::Nat(5), &Element::Nat(3)).unwrap();
    }

    #[test]
    fn certified_equivalence_is_a_valley() {
        let c = CertifiedMrs::certify(parity(), &Budget::default()).require().unwrap();
        let t = c.equivalent(&Element::Nat(5), &Element::Nat(3)).unwrap().found().unwrap();
        assert_eq!(t.render(&c.mrs.backend), "5 -> 3 -> 1 <- 3");
        assert_eq!(c.equivalent(&Element::Nat(5), &Element::Nat(2)).unwrap(), Search::Absent);
    }
}
