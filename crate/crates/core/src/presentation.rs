//! The canonical presentation `G(M)` of a finite monoid, the counit, and
//! desk-scale checks of the adjunction between `G` and `I`.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::backend::{Alphabet, Backend, Element, Letter};
use crate::error::{Error, Result};
use crate::irreducibles::{check_mrs_hom, induced_hom, irreducible_elements, two_cell_exists, Materialized, MrsHom};
use crate::rewrite::{Budget, CertifiedMrs, Mrs, Rule};
use crate::table::{homomorphisms, FiniteMonoid, TableHom};

/// `G(M) = (F_{M⁺}, ⊕, R_M)` with the encoding `ν` of `M` into words.
#[derive(Clone, Debug)]
pub struct CanonicalPresentation {
    pub monoid: Arc<FiniteMonoid>,
    pub mrs: Mrs,
    /// `letter_of[m]` is the letter `ν(m)`, `None` for the identity.
    letter_of: Vec<Option<Letter>>,
    element_of: Vec<usize>,
}

impl CanonicalPresentation {
    /// `ν(m)`: the one-letter word for `m`, the empty word for the identity.
    pub fn nu(&self, m: usize) -> Element {
        Element::Word(self.letter_of[m].into_iter().collect())
    }

    /// The element of `M` named by a letter.
    pub fn element_of_letter(&self, l: Letter) -> usize {
        self.element_of[l as usize]
    }

    /// Multiplies the letters of a word out in `M`.
    pub fn evaluate(&self, w: &Element) -> Result<usize> {
        let Element::Word(letters) = w else {
            return Err(Error::usage("not a word"));
        };
        Ok(letters.iter().fold(self.monoid.identity(), |acc, &l| {
            self.monoid.mul(acc, self.element_of_letter(l))
        }))
    }

    pub fn certify(&self, budget: &Budget) -> CertifiedMrs {
        // Words of length 3 already contain every overlap of two-letter sides.
        let budget = budget.with_size(budget.size.max(3));
        CertifiedMrs::certify(self.mrs.clone(), &budget)
    }
}

pub fn g_of_monoid(m: &FiniteMonoid) -> Result<CanonicalPresentation> {
    let monoid = Arc::new(m.clone());
    let plus: Vec<usize> = m.non_identity().collect();
    let names: Vec<String> = plus.iter().map(|&i| m.name(i).to_string()).collect();
    let alphabet = Alphabet::new(Alphabet::letter_names(&names))?;
    let mut letter_of = vec![None; m.order()];
    for (l, &i) in plus.iter().enumerate() {
        letter_of[i] = Some(l as Letter);
    }
    let nu = |i: usize| Element::Word(letter_of[i].into_iter().collect());
    let mut rules = Vec::new();
    for a in 0..m.order() {
        for b in 0..m.order() {
            let lhs = Backend::Free(alphabet.clone()).mul(&nu(a), &nu(b));
            rules.push(Rule::new(lhs, nu(m.mul(a, b))));
        }
    }
    let mrs = Mrs::new(Backend::Free(alphabet), rules)?;
    Ok(CanonicalPresentation {
        monoid,
        mrs,
        letter_of,
        element_of: plus,
    })
}

/// `Gφ`: letters go to the letters of their images, identity images
/// contributing the empty word.
pub fn g_of_hom(phi: &TableHom, source: &CanonicalPresentation, target: &CanonicalPresentation) -> Result<MrsHom> {
    if let Some((a, b)) = phi.law_violation() {
        return Err(Error::refused(format!(
            "not a monoid homomorphism on ({}, {})",
            phi.source.name(a),
            phi.source.name(b)
        )));
    }
    if *source.monoid != *phi.source || *target.monoid != *phi.target {
        return Err(Error::usage("presentations do not match the map"));
    }
    let images = (0..source.mrs.backend.generators().len())
        .map(|l| target.nu(phi.apply(source.element_of_letter(l as Letter))))
        .collect();
    MrsHom::new(source.mrs.clone(), target.mrs.clone(), images)
}

/// `ε_A : G(I(A)) → A`, sending the letter of an irreducible to itself.
pub fn counit(a: &Materialized) -> Result<(CanonicalPresentation, MrsHom)> {
    let g = g_of_monoid(&a.irr.table)?;
    let images = g.element_of.iter().map(|&i| a.irr.element(i).clone()).collect();
    let hom = MrsHom::new(g.mrs.clone(), a.mrs().clone(), images)?;
    Ok((g, hom))
}

/// `IG(M) = M`: the irreducibles of `G(M)` are exactly the `ν(m)` and
/// their product is `ν` of the product in `M`.
pub fn check_unit_identity(m: &FiniteMonoid, budget: &Budget) -> Result<bool> {
    let g = g_of_monoid(m)?;
    let cert = g.certify(budget);
    if !cert.is_certified() {
        return Ok(false);
    }
    let irr = irreducible_elements(&g.mrs, &cert.budget);
    let expected: BTreeSet<Element> = (0..m.order()).map(|i| g.nu(i)).collect();
    let found: BTreeSet<Element> = irr.elements.iter().cloned().collect();
    if !irr.complete || found != expected {
        return Ok(false);
    }
    for a in 0..m.order() {
        for b in 0..m.order() {
            let w = g.mrs.backend.mul(&g.nu(a), &g.nu(b));
            if cert.nf(&w)? != g.nu(m.mul(a, b)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleReport {
    /// `I(ε_A) ∘ η_{I(A)} = 1` on every element of `I(A)`.
    pub irreducible_side: bool,
    /// `ε_{G(M)} ∘ G(η_M)` fixes every word up to the bound.
    pub presentation_side: bool,
}

impl TriangleReport {
    pub fn holds(&self) -> bool {
        self.irreducible_side && self.presentation_side
    }
}

pub fn check_triangles(a: &Materialized, m: &FiniteMonoid, word_bound: usize, budget: &Budget) -> Result<TriangleReport> {
    // First triangle. η on I(A) is i ↦ ν(i) in IG(I(A)).
    let (g, eps) = counit(a)?;
    let gi = Materialized::new(g.mrs.clone(), &budget.with_size(budget.size.max(3)))?;
    let i_eps = induced_hom(&eps, &gi, a)?;
    let mut irreducible_side = true;
    for i in 0..a.irr.order() {
        let Some(eta_i) = gi.irr.index_of(&g.nu(i)) else {
            irreducible_side = false;
            continue;
        };
        irreducible_side &= i_eps.apply(eta_i) == i;
    }

    // Second triangle. η_M : M → IG(M) is m ↦ ν(m); G(η_M) sends the
    // letter m to the letter naming ν(m) in G(IG(M)).
    let gm = g_of_monoid(m)?;
    let igm = Materialized::new(gm.mrs.clone(), &budget.with_size(budget.size.max(3)))?;
    let eta = TableHom::new(
        Arc::new(m.clone()),
        igm.irr.table.clone(),
        (0..m.order())
            .map(|i| igm.irr.index_of(&gm.nu(i)).ok_or_else(|| Error::Inconsistent("ν(m) is reducible".into())))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let (gigm, eps_gm) = counit(&igm)?;
    let g_eta = g_of_hom(&eta, &gm, &gigm)?;
    let composite = g_eta.then(&eps_gm)?;
    let presentation_side = gm
        .mrs
        .backend
        .enumerate(word_bound)
        .iter()
        .all(|w| composite.apply(w).map_or(false, |v| v == *w));
    Ok(TriangleReport {
        irreducible_side,
        presentation_side,
    })
}

/// Desk-scale limits for the hom-set comparison.
#[derive(Clone, Copy, Debug)]
pub struct HomLimits {
    pub monoid_order: usize,
    pub carrier: usize,
}

impl Default for HomLimits {
    fn default() -> Self {
        HomLimits {
            monoid_order: 4,
            carrier: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomEquivalenceReport {
    /// `|hom(M, I(A))|`.
    pub monoid_homs: usize,
    /// Homomorphisms `G(M) → A` passing the rule check.
    pub mrs_homs: usize,
    /// Their 2-isomorphism classes.
    pub classes: usize,
    /// `f ↦ I(f) ∘ η` is a bijection from classes onto `hom(M, I(A))`.
    pub bijective: bool,
}

pub fn check_hom_equivalence(
    m: &FiniteMonoid,
    a: &Materialized,
    limits: &HomLimits,
    budget: &Budget,
) -> Result<HomEquivalenceReport> {
    let carrier = a.backend().enumerate(budget.size);
    if !a.backend().is_finite() || m.order() > limits.monoid_order || carrier.len() > limits.carrier {
        return Err(Error::refused(format!(
            "hom-set comparison is limited to |M| ≤ {} and finite carriers of at most {} elements",
            limits.monoid_order, limits.carrier
        )));
    }
    let monoid_homs = homomorphisms(m, &a.irr.table);
    let g = g_of_monoid(m)?;
    let letters = g.mrs.backend.generators().len();

    let mut accepted: Vec<MrsHom> = Vec::new();
    let mut choice = vec![0usize; letters];
    loop {
        let images = choice.iter().map(|&c| carrier[c].clone()).collect();
        let f = MrsHom::new(g.mrs.clone(), a.mrs().clone(), images)?;
        if check_mrs_hom(&f, budget).verdict.is_verified() {
            accepted.push(f);
        }
        let mut i = 0;
        while i < letters {
            choice[i] += 1;
            if choice[i] < carrier.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == letters {
            break;
        }
    }

    let mut representatives: Vec<MrsHom> = Vec::new();
    for f in &accepted {
        let mut known = false;
        for r in &representatives {
            if two_cell_exists(f, r, Some(&a.system), budget)? == Some(true) {
                known = true;
                break;
            }
        }
        if !known {
            representatives.push(f.clone());
        }
    }

    // I(f) ∘ η : m ↦ nf(f(ν(m))).
    let mut images: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut all_homs = true;
    for r in &representatives {
        let map = (0..m.order())
            .map(|i| a.class_of(&r.apply(&g.nu(i))?))
            .collect::<Result<Vec<_>>>()?;
        all_homs &= monoid_homs.contains(&map);
        images.insert(map);
    }
    let bijective = all_homs && images.len() == representatives.len() && images.len() == monoid_homs.len();
    Ok(HomEquivalenceReport {
        monoid_homs: monoid_homs.len(),
        mrs_homs: accepted.len(),
        classes: representatives.len(),
        bijective,
    })
}

/// The 2-cell `φ ∘ ε_A ⇒ ε_B ∘ GIφ` exists.
pub fn counit_naturality(phi: &MrsHom, a: &Materialized, b: &Materialized, budget: &Budget) -> Result<Option<bool>> {
    let (ga, eps_a) = counit(a)?;
    let (gb, eps_b) = counit(b)?;
    let sharp = induced_hom(phi, a, b)?;
    let gi_phi = g_of_hom(&sharp, &ga, &gb)?;
    let left = eps_a.then(phi)?;
    let right = gi_phi.then(&eps_b)?;
    two_cell_exists(&left, &right, Some(&b.system), budget)
}

/// The variant of `G` that keeps the identity as a letter. Only useful as
/// a contrast: its monoid of irreducibles gains an extra element (the
/// empty word next to the identity letter).
pub fn naive_presentation(m: &FiniteMonoid) -> Result<Mrs> {
    let alphabet = Alphabet::new(m.names().iter().cloned())?;
    let backend = Backend::Free(alphabet);
    let letter = |i: usize| Element::Word(vec![i as Letter]);
    let mut rules = Vec::new();
    for a in 0..m.order() {
        for b in 0..m.order() {
            rules.push(Rule::new(Element::Word(vec![a as Letter, b as Letter]), letter(m.mul(a, b))));
        }
    }
    Mrs::new(backend, rules)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::find_isomorphism;

    #[test]
    fn g_of_z2_rules() {
        let g = g_of_monoid(&FiniteMonoid::cyclic(2)).unwrap();
        let printed: Vec<String> = g.mrs.rules.iter().map(|r| g.mrs.format_rule(r)).collect();
        assert_eq!(printed, vec!["_ -> _", "1 -> 1", "11 -> _"]);
        assert!(g.certify(&Budget::default()).is_certified());
    }

    #[test]
    fn g_of_trivial() {
        let g = g_of_monoid(&FiniteMonoid::trivial()).unwrap();
        assert!(g.mrs.backend.generators().is_empty());
        assert_eq!(g.mrs.rules.len(), 1);
        assert!(check_unit_identity(&FiniteMonoid::trivial(), &Budget::default()).unwrap());
    }

    #[test]
    fn naive_variant_has_three_irreducibles() {
        let mrs = naive_presentation(&FiniteMonoid::cyclic(2)).unwrap();
        let m = Materialized::new(mrs, &Budget::default()).unwrap();
        assert_eq!(m.irr.order(), 3);
        assert!(find_isomorphism(&m.irr.table, &FiniteMonoid::cyclic(2)).is_none());
    }

    #[test]
    fn g_of_hom_to_trivial_kills_letters() {
        let z2 = Arc::new(FiniteMonoid::cyclic(2));
        let one = Arc::new(FiniteMonoid::trivial());
        let phi = TableHom::new(z2.clone(), one.clone(), vec![0, 0]).unwrap();
        let gs = g_of_monoid(&z2).unwrap();
        let gt = g_of_monoid(&one).unwrap();
        let h = g_of_hom(&phi, &gs, &gt).unwrap();
        let w = gs.mrs.element("111").unwrap();
        assert_eq!(h.apply(&w).unwrap(), Element::Word(vec![]));
        let bad = TableHom::new(z2.clone(), z2.clone(), vec![1, 1]).unwrap();
        assert!(g_of_hom(&bad, &gs, &gs).is_err());
    }
}
