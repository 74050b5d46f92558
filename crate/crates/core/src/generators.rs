//! Rule generators: closure of a finite topology, Horn theories.

use crate::backend::{Backend, Element};
use crate::error::{Error, Result};
use crate::rewrite::{Mrs, Rule};

/// A finite topological space given by its open sets, as bitmasks over
/// `points`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopologySpec {
    pub points: Vec<String>,
    pub opens: Vec<u64>,
}

impl TopologySpec {
    /// Checks the axioms: `∅` and the whole set are open, and opens are
    /// closed under pairwise union and intersection.
    pub fn new(points: Vec<String>, mut opens: Vec<u64>) -> Result<Self> {
        if points.len() > 20 {
            return Err(Error::refused("at most 20 points"));
        }
        opens.sort_unstable();
        opens.dedup();
        let spec = TopologySpec { points, opens };
        let full = (1u64 << spec.points.len()) - 1;
        let show = |s: u64| spec.format(s);
        for required in [0, full] {
            if !spec.opens.contains(&required) {
                return Err(Error::refused(format!("{} must be open", show(required))));
            }
        }
        for &u in &spec.opens {
            for &v in &spec.opens {
                if !spec.opens.contains(&(u | v)) {
                    return Err(Error::refused(format!("union of {} and {} is not open", show(u), show(v))));
                }
                if !spec.opens.contains(&(u & v)) {
                    return Err(Error::refused(format!(
                        "intersection of {} and {} is not open",
                        show(u),
                        show(v)
                    )));
                }
            }
        }
        Ok(spec)
    }

    fn full(&self) -> u64 {
        (1u64 << self.points.len()) - 1
    }

    pub fn is_closed(&self, s: u64) -> bool {
        self.opens.contains(&(self.full() & !s))
    }

    /// The smallest closed superset.
    pub fn closure(&self, s: u64) -> u64 {
        self.opens
            .iter()
            .map(|&o| self.full() & !o)
            .filter(|&c| c & s == s)
            .fold(self.full(), |acc, c| acc & c)
    }

    fn format(&self, s: u64) -> String {
        let names: Vec<&str> = (0..self.points.len())
            .filter(|i| s >> i & 1 == 1)
            .map(|i| self.points[i].as_str())
            .collect();
        format!("{{{}}}", names.join(","))
    }
}

/// Rules `(U, cl U)` for every subset, closed sets included as
/// degenerate rules.
pub fn gen_closure_rules(spec: &TopologySpec) -> Result<Mrs> {
    let backend = Backend::powerset(spec.points.clone())?;
    let rules = (0..=spec.full())
        .map(|u| Rule::new(Element::Set(u), Element::Set(spec.closure(u))))
        .collect();
    Mrs::new(backend, rules)
}

/// A finite propositional Horn theory: sequents `(premises, conclusions)`
/// as bitmasks over `atoms`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HornSpec {
    pub atoms: Vec<String>,
    pub sequents: Vec<(u64, u64)>,
}

impl HornSpec {
    pub fn new(atoms: Vec<String>, sequents: Vec<(u64, u64)>) -> Result<Self> {
        if atoms.len() > 20 {
            return Err(Error::refused("at most 20 atoms"));
        }
        let full = (1u64 << atoms.len()) - 1;
        if sequents.iter().any(|&(p, c)| (p | c) & !full != 0) {
            return Err(Error::usage("sequent mentions an undeclared atom"));
        }
        Ok(HornSpec { atoms, sequents })
    }
}

/// Rules `(Γφ, Γφ ∪ Γψ)`, one per sequent.
pub fn gen_horn_rules(spec: &HornSpec) -> Result<Mrs> {
    let backend = Backend::powerset(spec.atoms.clone())?;
    let rules = spec
        .sequents
        .iter()
        .map(|&(p, c)| Rule::new(Element::Set(p), Element::Set(p | c)))
        .collect();
    Mrs::new(backend, rules)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::irreducibles::irreducible_elements;
    use crate::rewrite::Budget;

    fn irr(m: &Mrs) -> Vec<String> {
        irreducible_elements(m, &Budget::default())
            .elements
            .iter()
            .map(|e| m.format(e))
            .collect()
    }

    #[test]
    fn closure_examples() {
        let pts = || vec!["a".to_string(), "b".to_string()];
        let discrete = TopologySpec::new(pts(), vec![0, 1, 2, 3]).unwrap();
        let m = gen_closure_rules(&discrete).unwrap();
        assert!(m.rules.iter().all(|r| r.is_degenerate()));
        assert_eq!(irr(&m).len(), 4);
        let indiscrete = TopologySpec::new(pts(), vec![0, 3]).unwrap();
        assert_eq!(irr(&gen_closure_rules(&indiscrete).unwrap()), vec!["{}", "{a,b}"]);
        let sierpinski = TopologySpec::new(pts(), vec![0, 1, 3]).unwrap();
        assert_eq!(irr(&gen_closure_rules(&sierpinski).unwrap()), vec!["{}", "{b}", "{a,b}"]);
        let err = TopologySpec::new(pts(), vec![0, 1, 2]).unwrap_err();
        assert!(err.to_string().contains("{a,b} must be open"));
        let three = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let err = TopologySpec::new(three, vec![0, 1, 2, 7]).unwrap_err();
        assert!(err.to_string().contains("union of {a} and {b}"), "{err}");
    }

    #[test]
    fn horn_examples() {
        let h = HornSpec::new(vec!["p".into(), "q".into()], vec![(1, 2)]).unwrap();
        assert_eq!(irr(&gen_horn_rules(&h).unwrap()), vec!["{}", "{q}", "{p,q}"]);
        let empty = HornSpec::new(vec!["p".into(), "q".into()], vec![]).unwrap();
        assert_eq!(irr(&gen_horn_rules(&empty).unwrap()).len(), 4);
    }
}
