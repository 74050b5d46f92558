//! The monoid of irreducibles, the quotient oracle, homomorphisms between
//! systems, induced maps and 2-cells.

use std::collections::HashMap;
use std::sync::Arc;

use crate::backend::{Backend, Element};
use crate::error::{Error, Result};
use crate::rewrite::{Budget, CertifiedMrs, Mrs};
use crate::table::{FiniteMonoid, TableHom};
use crate::trace::Trace;
use crate::verdict::{CheckVerdict, Coverage, Search, Witness};

/// Irreducible elements found up to a bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Irreducibles {
    pub elements: Vec<Element>,
    /// True when no irreducible element exists beyond the ones listed.
    pub complete: bool,
    /// True when some element's status could not be decided.
    pub truncated: bool,
}

pub fn irreducible_elements(mrs: &Mrs, budget: &Budget) -> Irreducibles {
    let mut out = Irreducibles {
        elements: Vec::new(),
        complete: mrs.backend.is_finite(),
        truncated: false,
    };
    let cancellative = matches!(mrs.backend, Backend::Free(_) | Backend::Naturals);
    let elements = mrs.backend.enumerate(budget.size);
    let mut by_size: HashMap<usize, (usize, usize)> = HashMap::new();
    for a in &elements {
        let size = mrs.backend.size(a);
        let entry = by_size.entry(size).or_default();
        entry.0 += 1;
        match mrs.is_irreducible(a, budget) {
            Some(true) => out.elements.push(a.clone()),
            Some(false) => entry.1 += 1,
            None => out.truncated = true,
        }
    }
    if cancellative && !out.truncated {
        // In a cancellative carrier a reducible factor makes every multiple
        // reducible, so one fully reducible size level closes the set.
        // An empty size level (free monoid on no letters) counts as reducible.
        let full = (0..=budget.size).find(|n| by_size.get(n).map_or(*n > 0, |(all, red)| all == red));
        if let Some(level) = full {
            out.elements.retain(|a| mrs.backend.size(a) < level);
            out.complete = true;
        }
    }
    if out.truncated {
        out.complete = false;
    }
    out
}

/// `I(A)` as a table: irreducibles with product `nf(x·y)`.
#[derive(Clone, Debug)]
pub struct IrreducibleMonoid {
    pub elements: Vec<Element>,
    pub table: Arc<FiniteMonoid>,
    index: HashMap<Element, usize>,
}

impl IrreducibleMonoid {
    pub fn index_of(&self, a: &Element) -> Option<usize> {
        self.index.get(a).copied()
    }

    pub fn element(&self, i: usize) -> &Element {
        &self.elements[i]
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// A certified system whose monoid of irreducibles has been tabulated.
#[derive(Clone, Debug)]
pub struct Materialized {
    pub system: CertifiedMrs,
    pub irr: IrreducibleMonoid,
}

impl Materialized {
    pub fn new(mrs: Mrs, budget: &Budget) -> Result<Self> {
        let system = CertifiedMrs::certify(mrs, budget).require()?;
        let irr = monoid_of_irreducibles(&system)?;
        Ok(Materialized { system, irr })
    }

    pub fn mrs(&self) -> &Mrs {
        &self.system.mrs
    }

    pub fn backend(&self) -> &Backend {
        &self.system.mrs.backend
    }

    /// Index in `I(A)` of the normal form of `a`.
    pub fn class_of(&self, a: &Element) -> Result<usize> {
        let n = self.system.nf(a)?;
        self.irr
            .index_of(&n)
            .ok_or_else(|| Error::Inconsistent(format!("normal form {} is not tabulated", self.mrs().format(&n))))
    }
}

pub fn monoid_of_irreducibles(c: &CertifiedMrs) -> Result<IrreducibleMonoid> {
    if !c.is_certified() {
        return Err(Error::refused("the monoid of irreducibles needs a certified system"));
    }
    let irr = irreducible_elements(&c.mrs, &c.budget);
    if !irr.complete {
        return Err(Error::refused(format!(
            "irreducible elements are not provably complete within size bound {}",
            c.budget.size
        )));
    }
    let backend = &c.mrs.backend;
    let index: HashMap<Element, usize> =
        irr.elements.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
    let lookup = |e: &Element| -> Result<usize> {
        index
            .get(e)
            .copied()
            .ok_or_else(|| Error::Inconsistent(format!("{} is not among the irreducibles", backend.format(e))))
    };
    let identity = lookup(&c.nf(&backend.identity())?)?;
    let n = irr.elements.len();
    let mut table = vec![vec![0; n]; n];
    for (i, x) in irr.elements.iter().enumerate() {
        for (j, y) in irr.elements.iter().enumerate() {
            table[i][j] = lookup(&c.nf(&backend.mul(x, y))?)?;
        }
    }
    let names = irr.elements.iter().map(|e| backend.format(e)).collect();
    let table = FiniteMonoid::new(names, identity, table)?;
    Ok(IrreducibleMonoid {
        elements: irr.elements,
        table: Arc::new(table),
        index,
    })
}

/// `M/↔*` computed from connected components of the one-step graph.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub classes: Vec<Vec<Element>>,
    pub table: FiniteMonoid,
    pub class_of: HashMap<Element, usize>,
}

pub fn quotient_monoid(mrs: &Mrs, budget: &Budget) -> Result<Quotient> {
    if !mrs.backend.is_finite() {
        return Err(Error::refused("the quotient oracle needs a finite carrier"));
    }
    let elements = mrs.backend.enumerate(budget.size);
    let pos: HashMap<Element, usize> = elements.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
    let mut parent: Vec<usize> = (0..elements.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (i, a) in elements.iter().enumerate() {
        for step in mrs.one_step(a, budget).steps {
            let j = pos[&step.after];
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut class_index: HashMap<usize, usize> = HashMap::new();
    let mut classes: Vec<Vec<Element>> = Vec::new();
    let mut class_of = HashMap::new();
    for (i, a) in elements.iter().enumerate() {
        let root = find(&mut parent, i);
        let c = *class_index.entry(root).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[c].push(a.clone());
        class_of.insert(a.clone(), c);
    }
    let n = classes.len();
    let mut table = vec![vec![0; n]; n];
    for (ci, xs) in classes.iter().enumerate() {
        for (cj, ys) in classes.iter().enumerate() {
            let target = class_of[&mrs.backend.mul(&xs[0], &ys[0])];
            for x in xs {
                for y in ys {
                    if class_of[&mrs.backend.mul(x, y)] != target {
                        return Err(Error::Inconsistent("↔* is not a congruence".into()));
                    }
                }
            }
            table[ci][cj] = target;
        }
    }
    let names = classes.iter().map(|c| mrs.backend.format(&c[0])).collect();
    let identity = class_of[&mrs.backend.identity()];
    Ok(Quotient {
        table: FiniteMonoid::new(names, identity, table)?,
        classes,
        class_of,
    })
}

/// A homomorphism between the ambient monoids of two systems, given by
/// the images of the source generators and extended multiplicatively.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MrsHom {
    pub source: Mrs,
    pub target: Mrs,
    pub images: Vec<Element>,
    generators: Vec<Element>,
}

impl MrsHom {
    pub fn new(source: Mrs, target: Mrs, images: Vec<Element>) -> Result<Self> {
        let generators = source.backend.generators();
        if images.len() != generators.len() {
            return Err(Error::usage(format!(
                "expected {} generator images, got {}",
                generators.len(),
                images.len()
            )));
        }
        for img in &images {
            target.backend.check(img)?;
        }
        Ok(MrsHom {
            source,
            target,
            images,
            generators,
        })
    }

    pub fn from_fn(source: Mrs, target: Mrs, f: impl Fn(&Element) -> Element) -> Result<Self> {
        let images = source.backend.generators().iter().map(f).collect();
        MrsHom::new(source, target, images)
    }

    pub fn identity(mrs: &Mrs) -> Self {
        MrsHom::from_fn(mrs.clone(), mrs.clone(), Element::clone).expect("generators map to themselves")
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn apply(&self, u: &Element) -> Result<Element> {
        let parts = self.source.backend.decompose(u).ok_or_else(|| Error::ForeignElement {
            element: format!("{u:?}"),
            backend: self.source.backend.kind_name().into(),
        })?;
        let mut acc = self.target.backend.identity();
        for p in parts {
            let i = self
                .generators
                .iter()
                .position(|g| *g == p)
                .ok_or_else(|| Error::Inconsistent("decomposition left the generating set".into()))?;
            acc = self.target.backend.mul(&acc, &self.images[i]);
        }
        Ok(acc)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &MrsHom) -> Result<MrsHom> {
        if self.target != next.source {
            return Err(Error::usage("homomorphisms are not composable"));
        }
        let images = self.images.iter().map(|i| next.apply(i)).collect::<Result<Vec<_>>>()?;
        MrsHom::new(self.source.clone(), next.target.clone(), images)
    }

    pub fn is_parallel_to(&self, other: &MrsHom) -> bool {
        self.source == other.source && self.target == other.target
    }
}

#[derive(Clone, Debug)]
pub struct HomCheck {
    pub verdict: CheckVerdict,
    /// One derivation `φ(u) →* φ(v)` per source rule, when found.
    pub traces: Vec<Option<Trace>>,
}

/// Checks the homomorphism law and that every rule image is reachable.
pub fn check_mrs_hom(h: &MrsHom, budget: &Budget) -> HomCheck {
    let law = hom_law(h, budget);
    let mut verdict = law;
    let mut traces = Vec::new();
    for rule in &h.source.rules {
        let (Ok(a), Ok(b)) = (h.apply(&rule.lhs), h.apply(&rule.rhs)) else {
            traces.push(None);
            verdict = verdict.and(CheckVerdict::Refuted(Witness::Message("image undefined".into())));
            continue;
        };
        match h.target.reaches(&a, &b, budget) {
            Search::Found(t) => traces.push(Some(t)),
            Search::Absent => {
                traces.push(None);
                verdict = verdict.and(CheckVerdict::Refuted(Witness::RuleUnreachable { rule: rule.clone() }));
            }
            Search::Unknown(why) => {
                traces.push(None);
                verdict = verdict.and(CheckVerdict::unknown(
                    budget.size,
                    format!("rule {}: {why}", h.source.format_rule(rule)),
                ));
            }
        }
    }
    HomCheck { verdict, traces }
}

fn hom_law(h: &MrsHom, budget: &Budget) -> CheckVerdict {
    let src = &h.source.backend;
    let tgt = &h.target.backend;
    let check_pairs = |elements: Vec<Element>, coverage: Coverage| -> CheckVerdict {
        for x in &elements {
            for y in &elements {
                let lhs = h.apply(&src.mul(x, y));
                let rhs = h.apply(x).and_then(|a| h.apply(y).map(|b| tgt.mul(&a, &b)));
                match (lhs, rhs) {
                    (Ok(l), Ok(r)) if l == r => {}
                    _ => {
                        return CheckVerdict::Refuted(Witness::HomLaw {
                            x: x.clone(),
                            y: y.clone(),
                        })
                    }
                }
            }
        }
        CheckVerdict::Verified(coverage)
    };
    match src {
        Backend::Free(_) | Backend::Naturals => {
            CheckVerdict::Verified(Coverage::Proven("source is free on its generators".into()))
        }
        Backend::Product { base, .. } => {
            let elems: Vec<Element> = match **base {
                Backend::Naturals => {
                    return CheckVerdict::Verified(Coverage::Proven(
                        "source is free on its generators".into(),
                    ))
                }
                _ => base.enumerate(budget.size).into_iter().map(Element::syllable).collect(),
            };
            match check_pairs(elems, Coverage::Proven("free product over a checked base".into())) {
                CheckVerdict::Verified(_) if base.is_finite() => CheckVerdict::Verified(Coverage::Proven(
                    "free product over an exhaustively checked base".into(),
                )),
                CheckVerdict::Verified(_) => CheckVerdict::Verified(Coverage::UpToBound(budget.size)),
                other => other,
            }
        }
        _ if src.is_finite() => check_pairs(src.enumerate(budget.size), Coverage::Exhaustive),
        _ => check_pairs(src.enumerate(budget.size), Coverage::UpToBound(budget.size)),
    }
}

/// `φ^♯ : I(A) → I(B)`, `u ↦ nf(φ(u))`.
pub fn induced_hom(h: &MrsHom, source: &Materialized, target: &Materialized) -> Result<TableHom> {
    if h.source != *source.mrs() || h.target != *target.mrs() {
        return Err(Error::usage("materialized systems do not match the homomorphism"));
    }
    let map = source
        .irr
        .elements
        .iter()
        .map(|u| target.class_of(&h.apply(u)?))
        .collect::<Result<Vec<_>>>()?;
    let induced = TableHom::new(source.irr.table.clone(), target.irr.table.clone(), map)?;
    if let Some((a, b)) = induced.law_violation() {
        return Err(Error::Inconsistent(format!(
            "induced map breaks the homomorphism law on ({}, {})",
            source.irr.table.name(a),
            source.irr.table.name(b)
        )));
    }
    Ok(induced)
}

/// Whether `f(a) ↔* g(a)` for every generator `a` of the source (enough,
/// since `↔*` is a congruence). Decided by normal forms when the target is
/// certified; otherwise by bounded search, `None` meaning undecided.
pub fn two_cell_exists(f: &MrsHom, g: &MrsHom, target: Option<&CertifiedMrs>, budget: &Budget) -> Result<Option<bool>> {
    if !f.is_parallel_to(g) {
        return Err(Error::usage("2-cells only exist between parallel homomorphisms"));
    }
    let mut undecided = false;
    for gen in f.generators() {
        let a = f.apply(gen)?;
        let b = g.apply(gen)?;
        if a == b {
            continue;
        }
        match target {
            Some(c) if c.is_certified() && c.mrs == f.target => {
                if c.nf(&a)? != c.nf(&b)? {
                    return Ok(Some(false));
                }
            }
            _ => match f.target.equivalent(&a, &b, budget) {
                Search::Found(_) => {}
                Search::Absent => return Ok(Some(false)),
                Search::Unknown(_) => undecided = true,
            },
        }
    }
    Ok(if undecided { None } else { Some(true) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::find_isomorphism;

    fn parity() -> Mrs {
        Mrs::from_literals(Backend::Naturals, &[("2", "0")]).unwrap()
    }

    fn z2() -> Mrs {
        Mrs::new(Backend::table(FiniteMonoid::cyclic(2)), vec![]).unwrap()
    }

    #[test]
    fn parity_irreducibles_complete() {
        let irr = irreducible_elements(&parity(), &Budget::default().with_size(50));
        assert_eq!(irr.elements, vec![Element::Nat(0), Element::Nat(1)]);
        assert!(irr.complete);
        let m = Materialized::new(parity(), &Budget::default()).unwrap();
        assert!(find_isomorphism(&m.irr.table, &FiniteMonoid::cyclic(2)).is_some());
    }

    #[test]
    fn mod_two_hom_and_induced_identity() {
        let z = z2();
        let phi = MrsHom::new(parity(), z.clone(), vec![z.element("1").unwrap()]).unwrap();
        let b = Budget::default();
        let check = check_mrs_hom(&phi, &b);
        assert!(check.verdict.is_verified(), "{:?}", check.verdict);
        assert_eq!(phi.apply(&Element::Nat(7)).unwrap(), z.element("1").unwrap());
        let src = Materialized::new(parity(), &b).unwrap();
        let tgt = Materialized::new(z.clone(), &b).unwrap();
        let induced = induced_hom(&phi, &src, &tgt).unwrap();
        assert_eq!(induced.map, vec![0, 1]);
    }

    #[test]
    fn hom_breaking_rule_is_refuted() {
        let z = z2();
        // 2 -> 0 maps to 0 -> 0 only for the mod-2 map; the identity-free
        // map n ↦ n on naturals without rules cannot reach 0 from 2.
        let target = Mrs::new(Backend::Naturals, vec![]).unwrap();
        let h = MrsHom::new(parity(), target, vec![Element::Nat(1)]).unwrap();
        assert!(check_mrs_hom(&h, &Budget::default()).verdict.is_refuted());
        let _ = z;
    }

    #[test]
    fn two_cells() {
        let z = z2();
        let b = Budget::default();
        let f = MrsHom::new(parity(), z.clone(), vec![z.element("1").unwrap()]).unwrap();
        let g = MrsHom::new(parity(), z.clone(), vec![z.element("0").unwrap()]).unwrap();
        assert_eq!(two_cell_exists(&f, &f, None, &b).unwrap(), Some(true));
        assert_eq!(two_cell_exists(&f, &g, None, &b).unwrap(), Some(false));
    }

    #[test]
    fn quotient_of_table_without_rules_is_the_table() {
        let q = quotient_monoid(&z2(), &Budget::default()).unwrap();
        assert_eq!(q.classes.len(), 2);
        assert!(find_isomorphism(&q.table, &FiniteMonoid::cyclic(2)).is_some());
    }
}
