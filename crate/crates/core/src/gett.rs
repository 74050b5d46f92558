//! Generalized elementary Tietze transformations: adding and removing
//! derivable rules, adjoining a fresh letter, and collapsing a coherent
//! subset of rules. Every move carries a certificate that is checked again
//! on replay.

use std::collections::HashMap;
use std::sync::Arc;

use crate::backend::{Backend, Element, Letter, Reduced};
use crate::check::{check_confluent, check_noetherian};
use crate::error::{Error, Result};
use crate::irreducibles::{irreducible_elements, monoid_of_irreducibles, quotient_monoid, Materialized};
use crate::rewrite::{Budget, CertifiedMrs, Mrs, Rule};
use crate::table::{isomorphic, FiniteMonoid};
use crate::trace::Trace;
use crate::verdict::{CheckVerdict, Coverage, Search, Witness};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GettMove {
    /// Type 1: `derivation` proves `lhs ↔* rhs` before the rule is added.
    Add { rule: Rule, derivation: Trace },
    /// Type 2: `derivation` proves `lhs ↔* rhs` without the removed rule.
    Remove { rule: Rule, derivation: Trace },
    /// Type 3: free product with a fresh letter and the rule `(letter, target)`.
    Adjoin { letter: String, target: Element },
    /// Type 4: collapse by `j`, with the coherence verdict found when the
    /// move was made.
    Collapse { j: Vec<Rule>, evidence: CheckVerdict },
}

impl GettMove {
    pub fn kind(&self) -> u8 {
        match self {
            GettMove::Add { .. } => 1,
            GettMove::Remove { .. } => 2,
            GettMove::Adjoin { .. } => 3,
            GettMove::Collapse { .. } => 4,
        }
    }

    /// Text form against the system the move applies to: the move line,
    /// followed by certificate step lines for types 1 and 2.
    pub fn render(&self, before: &Mrs) -> Vec<String> {
        let b = &before.backend;
        match self {
            GettMove::Add { rule, derivation } | GettMove::Remove { rule, derivation } => {
                let verb = if self.kind() == 1 { "add" } else { "remove" };
                let mut lines = vec![format!("{verb} {}", before.format_rule(rule))];
                lines.extend(derivation.certificate_lines(b).into_iter().map(|l| format!("  {l}")));
                lines
            }
            GettMove::Adjoin { letter, target } => vec![format!("adjoin {letter} -> {}", b.format(target))],
            GettMove::Collapse { j, .. } => {
                let sides: Vec<String> = j.iter().map(|r| before.format_rule(r)).collect();
                vec![format!("collapse {{ {} }}", sides.join(" ; "))]
            }
        }
    }
}

fn search_outcome(search: Search, what: impl FnOnce() -> String) -> Result<Trace> {
    match search {
        Search::Found(t) => Ok(t),
        Search::Absent => Err(Error::refused(what())),
        Search::Unknown(reason) => Err(Error::Undetermined(format!("{}: {reason}", what()))),
    }
}

pub fn apply_type1(mrs: &Mrs, a: &Element, b: &Element, budget: &Budget) -> Result<(Mrs, GettMove)> {
    mrs.backend.check(a)?;
    mrs.backend.check(b)?;
    let derivation = if a == b {
        Trace::empty(a.clone())
    } else {
        search_outcome(mrs.equivalent(a, b, budget), || {
            format!("{} and {} are not equivalent", mrs.format(a), mrs.format(b))
        })?
    };
    apply_type1_with(mrs, Rule::new(a.clone(), b.clone()), derivation)
}

/// Type 1 with a caller-supplied derivation, which is validated.
pub fn apply_type1_with(mrs: &Mrs, rule: Rule, derivation: Trace) -> Result<(Mrs, GettMove)> {
    derivation.proves(mrs, &rule.lhs, &rule.rhs)?;
    Ok((mrs.with_rule(rule.clone()), GettMove::Add { rule, derivation }))
}

pub fn apply_type2(mrs: &Mrs, rule: &Rule, budget: &Budget) -> Result<(Mrs, GettMove)> {
    require_rule(mrs, rule)?;
    let without = mrs.without_rule(rule);
    let derivation = if rule.is_degenerate() {
        Trace::empty(rule.lhs.clone())
    } else {
        search_outcome(without.equivalent(&rule.lhs, &rule.rhs, budget), || {
            format!("{} is not derivable without itself", mrs.format_rule(rule))
        })?
    };
    apply_type2_with(mrs, rule.clone(), derivation)
}

pub fn apply_type2_with(mrs: &Mrs, rule: Rule, derivation: Trace) -> Result<(Mrs, GettMove)> {
    require_rule(mrs, &rule)?;
    let without = mrs.without_rule(&rule);
    derivation.proves(&without, &rule.lhs, &rule.rhs)?;
    Ok((without, GettMove::Remove { rule, derivation }))
}

fn require_rule(mrs: &Mrs, rule: &Rule) -> Result<()> {
    if mrs.has_rule(rule) {
        Ok(())
    } else {
        Err(Error::refused(format!("{} is not a rule of the system", mrs.format_rule(rule))))
    }
}

pub fn apply_type3(mrs: &Mrs, letter: &str, target: &Element) -> Result<(Mrs, GettMove)> {
    mrs.backend.check(target)?;
    let backend = mrs.backend.adjoin(&[letter.to_string()]).map_err(|e| match e {
        Error::Usage(m) => Error::refused(m),
        other => other,
    })?;
    let embed = |a: &Element| backend.embed_from(&mrs.backend, a);
    let mut rules = mrs
        .rules
        .iter()
        .map(|r| Ok(Rule::new(embed(&r.lhs)?, embed(&r.rhs)?)))
        .collect::<Result<Vec<_>>>()?;
    rules.push(Rule::new(backend.letter_element(letter)?, embed(target)?));
    let after = Mrs::new(backend, rules)?;
    Ok((
        after,
        GettMove::Adjoin {
            letter: letter.to_string(),
            target: target.clone(),
        },
    ))
}

/// Confluence of `(M, →_J)`. Termination of the subsystem follows from
/// termination of the whole system.
pub fn check_confluent_subset(mrs: &Mrs, j: &[Rule], budget: &Budget) -> CheckVerdict {
    check_confluent(&mrs.subsystem(j), budget)
}

#[derive(Clone, Debug)]
enum Projection {
    /// `J` has no proper rules.
    Identity,
    /// Finitely many `J`-irreducibles, tabulated.
    Table { j: Mrs, budget: Budget, index: HashMap<Element, usize> },
    /// Words reduced by the `J` rules.
    Words(Arc<Reduced>),
}

/// `A_J` together with the projection `nf_J : A → M_J`.
#[derive(Clone, Debug)]
pub struct Collapsed {
    pub system: Mrs,
    pub j: Vec<Rule>,
    pub ambient: Mrs,
    /// Ambient representatives of the elements of `M_J` when tabulated.
    representatives: Vec<Element>,
    projection: Projection,
}

impl Collapsed {
    /// `nf_J(a)` as an element of `A_J`.
    pub fn project(&self, a: &Element) -> Result<Element> {
        self.ambient.backend.check(a)?;
        match &self.projection {
            Projection::Identity => Ok(a.clone()),
            Projection::Table { j, budget, index } => {
                let n = j.nf(a, budget)?;
                index.get(&n).map(|&i| Element::Table(i)).ok_or_else(|| {
                    Error::Inconsistent(format!("{} is not a tabulated J-irreducible", self.ambient.format(&n)))
                })
            }
            Projection::Words(r) => match a {
                Element::Word(w) => Ok(Element::Word(r.reduce(w))),
                _ => Err(Error::Inconsistent("word carrier expected".into())),
            },
        }
    }

    /// The ambient element an element of `M_J` stands for.
    pub fn lift(&self, x: &Element) -> Result<Element> {
        self.system.backend.check(x)?;
        Ok(match (&self.projection, x) {
            (Projection::Table { .. }, Element::Table(i)) => self.representatives[*i].clone(),
            _ => x.clone(),
        })
    }
}

fn proper_rules(j: &[Rule]) -> Vec<Rule> {
    j.iter().filter(|r| !r.is_degenerate()).cloned().collect()
}

fn require_subset(mrs: &Mrs, j: &[Rule]) -> Result<()> {
    for r in j {
        require_rule(mrs, r)?;
    }
    Ok(())
}

/// Builds `A_J`. The carrier is tabulated when the `J`-irreducibles are
/// provably finite; over a free monoid an infinite carrier becomes a
/// reduced-word backend. Other infinite carriers are refused.
pub fn collapse(mrs: &Mrs, j: &[Rule], budget: &Budget) -> Result<Collapsed> {
    require_subset(mrs, j)?;
    let rest: Vec<&Rule> = mrs.rules.iter().filter(|r| !j.contains(r)).collect();
    if proper_rules(j).is_empty() {
        let system = Mrs::new(mrs.backend.clone(), rest.into_iter().cloned().collect())?;
        return Ok(Collapsed {
            system,
            j: j.to_vec(),
            ambient: mrs.clone(),
            representatives: Vec::new(),
            projection: Projection::Identity,
        });
    }
    let jsys = mrs.subsystem(j);
    let irr = irreducible_elements(&jsys, budget);
    let mut out = if irr.complete {
        let backend = &mrs.backend;
        let index: HashMap<Element, usize> =
            irr.elements.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let lookup = |e: &Element| -> Result<usize> {
            let n = jsys.nf(e, budget)?;
            index.get(&n).copied().ok_or_else(|| {
                Error::Inconsistent(format!("{} is not among the J-irreducibles", backend.format(&n)))
            })
        };
        let identity = lookup(&backend.identity())?;
        let n = irr.elements.len();
        let mut table = vec![vec![0; n]; n];
        for (a, x) in irr.elements.iter().enumerate() {
            for (b, y) in irr.elements.iter().enumerate() {
                table[a][b] = lookup(&backend.mul(x, y))?;
            }
        }
        let names = irr.elements.iter().map(|e| backend.format(e)).collect();
        let monoid = FiniteMonoid::new(names, identity, table)?;
        Collapsed {
            system: Mrs::new(Backend::table(monoid), Vec::new())?,
            j: j.to_vec(),
            ambient: mrs.clone(),
            representatives: irr.elements,
            projection: Projection::Table {
                j: jsys.clone(),
                budget: *budget,
                index,
            },
        }
    } else {
        match &mrs.backend {
            Backend::Free(alphabet) => {
                let word = |e: &Element| match e {
                    Element::Word(w) => w.clone(),
                    _ => Vec::new(),
                };
                let rules: Vec<(Vec<Letter>, Vec<Letter>)> =
                    proper_rules(j).iter().map(|r| (word(&r.lhs), word(&r.rhs))).collect();
                let reduced = Arc::new(Reduced::new(alphabet.clone(), rules));
                Collapsed {
                    system: Mrs::new(Backend::Reduced(reduced.clone()), Vec::new())?,
                    j: j.to_vec(),
                    ambient: mrs.clone(),
                    representatives: Vec::new(),
                    projection: Projection::Words(reduced),
                }
            }
            other => {
                return Err(Error::refused(format!(
                    "J-irreducibles of the {} carrier are not provably finite within size bound {}{}",
                    other.kind_name(),
                    budget.size,
                    if irr.truncated { " (factorization budget exhausted)" } else { "" }
                )))
            }
        }
    };
    let mut rj = Vec::new();
    for r in rest {
        rj.push(Rule::new(out.project(&r.lhs)?, out.project(&r.rhs)?));
    }
    out.system = Mrs::new(out.system.backend.clone(), rj)?;
    Ok(out)
}

/// `J` is coherent when `(M, →_J)` terminates and is confluent and the
/// collapsed system is again Noetherian and confluent.
pub fn check_coherent(mrs: &Mrs, j: &[Rule], budget: &Budget) -> Result<CheckVerdict> {
    require_subset(mrs, j)?;
    let jsys = mrs.subsystem(j);
    let terminating = check_noetherian(&jsys, budget);
    if !terminating.is_verified() {
        return Ok(terminating);
    }
    let confluent = check_confluent(&jsys, budget);
    if !confluent.is_verified() {
        return Ok(confluent);
    }
    let collapsed = match collapse(mrs, j, budget) {
        Ok(c) => c,
        Err(Error::Refused(reason)) | Err(Error::Undetermined(reason)) => {
            return Ok(CheckVerdict::unknown(budget.size, reason))
        }
        Err(Error::BudgetExhausted { budget: b, reached }) => {
            return Ok(CheckVerdict::unknown(b, format!("normal form search stopped at {reached}")))
        }
        Err(e) => return Err(e),
    };
    let a_j = &collapsed.system;
    let collapsed_terminating = check_noetherian(a_j, budget);
    if collapsed_terminating.is_refuted() {
        return Ok(collapsed_terminating);
    }
    Ok(terminating
        .and(confluent)
        .and(collapsed_terminating)
        .and(check_confluent(a_j, budget)))
}

/// Type 4. The ambient system must itself be Noetherian and confluent.
pub fn apply_type4(mrs: &Mrs, j: &[Rule], budget: &Budget) -> Result<(Mrs, GettMove)> {
    let mut evidence = check_coherent(mrs, j, budget)?;
    if evidence.is_verified() {
        evidence = evidence.and(certification(mrs, budget));
    }
    match &evidence {
        CheckVerdict::Verified(_) => {}
        CheckVerdict::Refuted(w) => {
            return Err(Error::refused(format!("J is not coherent: {}", w.render(&mrs.backend))))
        }
        CheckVerdict::Unknown { .. } => return Err(Error::Undetermined(evidence.render(&mrs.backend))),
    }
    let collapsed = collapse(mrs, j, budget)?;
    Ok((
        collapsed.system,
        GettMove::Collapse {
            j: j.to_vec(),
            evidence,
        },
    ))
}

fn certification(mrs: &Mrs, budget: &Budget) -> CheckVerdict {
    let c = CertifiedMrs::certify(mrs.clone(), budget);
    c.noetherian.and(c.confluent)
}

/// Revalidates a move from scratch against `before` and returns the
/// system after it.
pub fn apply_move(before: &Mrs, mv: &GettMove, budget: &Budget) -> Result<Mrs> {
    Ok(revalidate(before, mv, budget)?.0)
}

/// As [`apply_move`], also returning the recomputed coverage.
fn revalidate(before: &Mrs, mv: &GettMove, budget: &Budget) -> Result<(Mrs, Coverage)> {
    let exact = Coverage::Exhaustive;
    Ok(match mv {
        GettMove::Add { rule, derivation } => (apply_type1_with(before, rule.clone(), derivation.clone())?.0, exact),
        GettMove::Remove { rule, derivation } => (apply_type2_with(before, rule.clone(), derivation.clone())?.0, exact),
        GettMove::Adjoin { letter, target } => (apply_type3(before, letter, target)?.0, exact),
        GettMove::Collapse { j, .. } => {
            let (after, mv) = apply_type4(before, j, budget)?;
            match mv {
                GettMove::Collapse {
                    evidence: CheckVerdict::Verified(c),
                    ..
                } => (after, c),
                _ => (after, exact),
            }
        }
    })
}

/// The system after a move, without checking its certificate.
pub fn advance(before: &Mrs, mv: &GettMove, budget: &Budget) -> Result<Mrs> {
    Ok(match mv {
        GettMove::Add { rule, .. } => before.with_rule(rule.clone()),
        GettMove::Remove { rule, .. } => before.without_rule(rule),
        GettMove::Adjoin { letter, target } => apply_type3(before, letter, target)?.0,
        GettMove::Collapse { j, .. } => collapse(before, j, budget)?.system,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GettScript {
    pub moves: Vec<GettMove>,
}

impl GettScript {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn render(&self, initial: &Mrs, budget: &Budget) -> Result<String> {
        let mut current = initial.clone();
        let mut out = String::new();
        for mv in &self.moves {
            for line in mv.render(&current) {
                out.push_str(&line);
                out.push('\n');
            }
            current = match advance(&current, mv, budget) {
                Ok(next) => next,
                Err(e) => {
                    out.push_str(&format!("# rejected: {e}\n"));
                    break;
                }
            };
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct Replay {
    /// The system after the last accepted move.
    pub system: Mrs,
    pub verdict: CheckVerdict,
    /// Index of the first rejected move.
    pub failed_at: Option<usize>,
    pub accepted: usize,
}

pub fn replay_script(initial: &Mrs, script: &GettScript, budget: &Budget) -> Replay {
    let mut current = initial.clone();
    let mut coverage = Coverage::Proven("every certificate revalidated".into());
    for (i, mv) in script.moves.iter().enumerate() {
        match revalidate(&current, mv, budget) {
            Ok((next, c)) => {
                if let Coverage::UpToBound(b) = c {
                    coverage = Coverage::UpToBound(b);
                }
                current = next;
            }
            Err(e) => return rejected(current, i, e),
        }
    }
    Replay {
        system: current,
        verdict: CheckVerdict::Verified(coverage),
        failed_at: None,
        accepted: script.len(),
    }
}

pub(crate) fn rejected(system: Mrs, index: usize, e: Error) -> Replay {
    let verdict = match &e {
        Error::Undetermined(_) | Error::BudgetExhausted { .. } => CheckVerdict::unknown(0, format!("move {index}: {e}")),
        _ => CheckVerdict::Refuted(Witness::Message(format!("move {index}: {e}"))),
    };
    Replay {
        system,
        verdict,
        failed_at: Some(index),
        accepted: index,
    }
}

/// `B/↔*_L ≅ A/↔*_R` across one move.
///
/// Types 1 and 2 compare quotient tables of finite carriers (or tables of
/// irreducibles of certified systems). Type 3 checks that the retraction
/// sending the fresh letter to its target maps every rule of the new
/// system into `↔*` of the old one, which together with the inclusion
/// gives inverse isomorphisms. Type 4 checks that `a ↦ nf_{R_J}(nf_J a)`
/// is a bijective homomorphism between the monoids of irreducibles.
pub fn check_preservation(before: &Mrs, mv: &GettMove, after: &Mrs, budget: &Budget) -> Result<bool> {
    match mv {
        GettMove::Add { .. } | GettMove::Remove { .. } => Ok(isomorphic(&quotient_table(before, budget)?, &quotient_table(after, budget)?)),
        GettMove::Adjoin { letter, target } => {
            let v = after.backend.letter_element(letter)?;
            let class = classifier(before, budget)?;
            for r in &after.rules {
                let l = retract(&before.backend, &after.backend, &v, target, &r.lhs)?;
                let t = retract(&before.backend, &after.backend, &v, target, &r.rhs)?;
                if class(&l)? != class(&t)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        GettMove::Collapse { j, .. } => {
            let c = collapse(before, j, budget)?;
            let a = CertifiedMrs::certify(before.clone(), budget).require()?;
            let b = CertifiedMrs::certify(c.system.clone(), budget).require()?;
            if c.system != *after {
                return Ok(false);
            }
            let (ia, ib) = match (monoid_of_irreducibles(&a), monoid_of_irreducibles(&b)) {
                (Ok(ia), Ok(ib)) => (ia, ib),
                _ => return bounded_collapse_preservation(&a, &b, &c, budget),
            };
            let psi = ia
                .elements
                .iter()
                .map(|x| {
                    let y = b.nf(&c.project(x)?)?;
                    ib.index_of(&y).ok_or_else(|| Error::Inconsistent("image not irreducible".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut seen = psi.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != ia.order() || ia.order() != ib.order() {
                return Ok(false);
            }
            let (ma, mb) = (&ia.table, &ib.table);
            Ok((0..ma.order()).all(|x| (0..ma.order()).all(|y| psi[ma.mul(x, y)] == mb.mul(psi[x], psi[y]))))
        }
    }
}

/// Type-4 preservation when the irreducibles cannot be tabulated: `ψ` is
/// multiplicative and injective on irreducibles up to the size bound.
fn bounded_collapse_preservation(a: &CertifiedMrs, b: &CertifiedMrs, c: &Collapsed, budget: &Budget) -> Result<bool> {
    let psi = |x: &Element| -> Result<Element> { b.nf(&c.project(x)?) };
    let elements = a.mrs.backend.enumerate(budget.size.min(6));
    let mut irr = Vec::new();
    for x in &elements {
        if a.mrs.is_irreducible(x, budget) == Some(true) {
            irr.push(x.clone());
        }
    }
    let mut images = HashMap::new();
    for x in &irr {
        if let Some(prev) = images.insert(psi(x)?, x.clone()) {
            if prev != *x {
                return Ok(false);
            }
        }
    }
    for x in &irr {
        for y in &irr {
            let lhs = psi(&a.nf(&a.mrs.backend.mul(x, y))?)?;
            let rhs = b.nf(&b.mrs.backend.mul(&psi(x)?, &psi(y)?))?;
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn quotient_table(mrs: &Mrs, budget: &Budget) -> Result<FiniteMonoid> {
    if mrs.backend.is_finite() {
        return Ok(quotient_monoid(mrs, budget)?.table);
    }
    let m = Materialized::new(mrs.clone(), budget)?;
    Ok((*m.irr.table).clone())
}

/// Class of an element in `M/↔*`, by component or by normal form.
fn classifier<'a>(mrs: &'a Mrs, budget: &'a Budget) -> Result<Box<dyn Fn(&Element) -> Result<Element> + 'a>> {
    if mrs.backend.is_finite() {
        let q = quotient_monoid(mrs, budget)?;
        return Ok(Box::new(move |e: &Element| {
            q.class_of
                .get(e)
                .map(|&i| Element::Table(i))
                .ok_or_else(|| Error::Inconsistent("element outside the quotient".into()))
        }));
    }
    let c = CertifiedMrs::certify(mrs.clone(), budget).require()?;
    Ok(Box::new(move |e: &Element| c.nf(e)))
}

/// The retraction `A * F_v → A` fixing `A` and sending `v` to `target`.
pub fn retract(before: &Backend, after: &Backend, v: &Element, target: &Element, x: &Element) -> Result<Element> {
    let parts = after
        .decompose(x)
        .ok_or_else(|| Error::Inconsistent("element does not decompose into generators".into()))?;
    let mut out = before.identity();
    for p in parts {
        let image = if p == *v {
            target.clone()
        } else {
            match (before, after, &p) {
                (Backend::Free(_), Backend::Free(_), _) | (Backend::Product { .. }, Backend::Product { .. }, _) => p.clone(),
                (_, Backend::Product { .. }, Element::Product { slots, letters }) if letters.is_empty() => slots[0].clone(),
                _ => return Err(Error::Inconsistent("generator outside the old carrier".into())),
            }
        };
        before.check(&image)?;
        out = before.mul(&out, &image);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parity() -> Mrs {
        Mrs::from_literals(Backend::Naturals, &[("2", "0")]).unwrap()
    }

    #[test]
    fn type1_and_type2_on_naturals() {
        let b = Budget::default();
        let m = parity();
        let (m2, mv) = apply_type1(&m, &Element::Nat(4), &Element::Nat(0), &b).unwrap();
        let GettMove::Add { derivation, .. } = &mv else { panic!() };
        assert_eq!(derivation.render(&m.backend), "4 -> 2 -> 0");
        let r40 = m2.rule("4", "0").unwrap();
        let (m3, _) = apply_type2(&m2, &r40, &b).unwrap();
        assert_eq!(m3.rules, m.rules);
        let r20 = m.rule("2", "0").unwrap();
        assert!(matches!(apply_type2(&m, &r20, &b), Err(Error::Refused(_))));
        let (_, mv) = apply_type1(&m, &Element::Nat(3), &Element::Nat(3), &b).unwrap();
        assert!(matches!(mv, GettMove::Add { derivation, .. } if derivation.is_empty()));
    }

    #[test]
    fn type3_on_free_and_trivial() {
        let m = Mrs::from_literals(Backend::free(["a", "b"]).unwrap(), &[]).unwrap();
        let a = m.element("a").unwrap();
        let (m2, _) = apply_type3(&m, "v", &a).unwrap();
        assert_eq!(m2.backend, Backend::free(["a", "b", "v"]).unwrap());
        assert_eq!(m2.format_rule(&m2.rules[0]), "v -> a");
        assert!(matches!(apply_type3(&m, "a", &a), Err(Error::Refused(_))));

        let t = Mrs::new(Backend::table(FiniteMonoid::trivial()), vec![]).unwrap();
        let (t2, _) = apply_type3(&t, "v", &Element::Table(0)).unwrap();
        assert_eq!(t2.backend, Backend::free(["v"]).unwrap());
        assert_eq!(t2.format_rule(&t2.rules[0]), "v -> _");
    }

    #[test]
    fn bicyclic_collapse() {
        let m = Mrs::from_literals(Backend::free(["a", "b"]).unwrap(), &[("ab", "_"), ("ba", "_")]).unwrap();
        let j = vec![m.rule("ab", "_").unwrap()];
        let c = collapse(&m, &j, &Budget::default()).unwrap();
        assert_eq!(c.system.rules.len(), 1);
        assert_eq!(c.system.format_rule(&c.system.rules[0]), "ba -> _");
        let x = c.project(&m.element("abbaab").unwrap()).unwrap();
        assert_eq!(c.system.format(&x), "ba");
        let v = check_coherent(&m, &j, &Budget::default()).unwrap();
        assert_eq!(v, CheckVerdict::Verified(Coverage::UpToBound(8)));
    }

    #[test]
    fn collapse_by_all_rules_gives_the_irreducibles() {
        let m = parity();
        let c = collapse(&m, &m.rules, &Budget::default()).unwrap();
        let Backend::Table(t) = &c.system.backend else { panic!() };
        assert!(isomorphic(t, &FiniteMonoid::cyclic(2)));
        assert!(c.system.rules.is_empty());
        let (after, mv) = apply_type4(&m, &m.rules, &Budget::default()).unwrap();
        assert!(check_preservation(&m, &mv, &after, &Budget::default()).unwrap());
        let none = collapse(&m, &[], &Budget::default()).unwrap();
        assert_eq!(none.system.rules, m.rules);
    }

    #[test]
    fn non_coherent_subset_cycles() {
        let m = Mrs::from_literals(
            Backend::free(["a", "A", "b", "B"]).unwrap(),
            &[("aA", "_"), ("Aa", "Bb"), ("Bb", "_"), ("bB", "_")],
        )
        .unwrap();
        let j = vec![m.rule("aA", "_").unwrap()];
        assert!(check_confluent_subset(&m, &j, &Budget::default()).is_verified());
        let v = check_coherent(&m, &j, &Budget::default()).unwrap();
        let CheckVerdict::Refuted(Witness::Cycle(t)) = v else { panic!("{v:?}") };
        let c = collapse(&m, &j, &Budget::default()).unwrap();
        assert_eq!(t.render(&c.system.backend), "a -> aBb -> a");
    }

    #[test]
    fn replay_reports_the_failing_index() {
        let b = Budget::default();
        let m = parity();
        let (m2, add) = apply_type1(&m, &Element::Nat(4), &Element::Nat(0), &b).unwrap();
        let (_, remove) = apply_type2(&m2, &m2.rule("4", "0").unwrap(), &b).unwrap();
        let ok = GettScript {
            moves: vec![add.clone(), remove.clone()],
        };
        let r = replay_script(&m, &ok, &b);
        assert!(r.verdict.is_verified());
        assert_eq!(r.system.rules, m.rules);
        let bad = GettScript {
            moves: vec![
                add,
                GettMove::Remove {
                    rule: m.rule("2", "0").unwrap(),
                    derivation: Trace::empty(Element::Nat(2)),
                },
            ],
        };
        let r = replay_script(&m, &bad, &b);
        assert_eq!(r.failed_at, Some(1));
        assert!(r.verdict.is_refuted());
        assert!(replay_script(&m, &GettScript::default(), &b).verdict.is_verified());
    }

    #[test]
    fn type3_preserves_the_quotient() {
        let b = Budget::default();
        let m = Mrs::new(Backend::table(FiniteMonoid::cyclic(3)), vec![]).unwrap();
        let (after, mv) = apply_type3(&m, "v", &Element::Table(2)).unwrap();
        assert!(check_preservation(&m, &mv, &after, &b).unwrap());
    }
}
