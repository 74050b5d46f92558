//! Fixtures, brute-force oracles and property bodies shared by the
//! integration targets.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use mrs_core::gett::{collapse, Collapsed};
use mrs_core::irreducibles::{induced_hom, Materialized, MrsHom};
use mrs_core::{Backend, Budget, CertifiedMrs, Element, FiniteMonoid, Mrs, Rule, Trace};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub const CASES: u32 = 1000;

pub fn budget() -> Budget {
    Budget::default()
}

// ---- fixtures ----

pub fn parity() -> Mrs {
    Mrs::from_literals(Backend::Naturals, &[("2", "0")]).unwrap()
}

pub fn naturals_mod(m: u64) -> Mrs {
    Mrs::new(Backend::Naturals, vec![Rule::new(Element::Nat(m), Element::Nat(0))]).unwrap()
}

pub fn powerset_abc() -> Mrs {
    Mrs::from_literals(
        Backend::powerset(["a", "b", "c"]).unwrap(),
        &[("{a}", "{a,c}"), ("{b,c}", "{a,b,c}")],
    )
    .unwrap()
}

pub fn inverse_pair() -> Mrs {
    Mrs::from_literals(Backend::free(["a", "b"]).unwrap(), &[("ab", "_"), ("ba", "_")]).unwrap()
}

pub fn four_letters() -> Mrs {
    Mrs::from_literals(
        Backend::free(["a", "A", "b", "B"]).unwrap(),
        &[("aA", "_"), ("Aa", "Bb"), ("Bb", "_"), ("bB", "_")],
    )
    .unwrap()
}

pub fn horn_chain() -> Mrs {
    Mrs::from_literals(
        Backend::powerset(["p", "q", "r"]).unwrap(),
        &[("{p}", "{p,q}"), ("{q}", "{q,r}")],
    )
    .unwrap()
}

pub fn z2_empty() -> Mrs {
    Mrs::new(Backend::table(FiniteMonoid::cyclic(2)), vec![]).unwrap()
}

pub fn g_z2_literal() -> Mrs {
    Mrs::from_literals(Backend::free(["1"]).unwrap(), &[("_", "_"), ("1", "1"), ("11", "_")]).unwrap()
}

/// Certified systems the normal-form properties range over, with the
/// element size used to draw samples.
pub fn certified_fixtures() -> Vec<(&'static str, Mrs, usize)> {
    vec![
        ("parity", parity(), 40),
        ("powerset", powerset_abc(), 3),
        ("inverse pair", inverse_pair(), 7),
        ("horn chain", horn_chain(), 3),
        ("canonical Z2", g_z2_literal(), 8),
        ("Z2", z2_empty(), 1),
    ]
}

/// Small finite systems for the oracle comparison, certified or not.
pub fn finite_fixtures() -> Vec<(&'static str, Mrs)> {
    let z3 = Backend::table(FiniteMonoid::cyclic(3));
    let z2 = Backend::table(FiniteMonoid::cyclic(2));
    vec![
        ("powerset", powerset_abc()),
        ("horn chain", horn_chain()),
        ("Z2 empty", z2_empty()),
        ("Z2 with 1 -> 0", Mrs::from_literals(z2, &[("1", "0")]).unwrap()),
        ("Z3 with 1 -> 2", Mrs::from_literals(z3, &[("1", "2")]).unwrap()),
        (
            "powerset pair",
            Mrs::from_literals(Backend::powerset(["a", "b"]).unwrap(), &[("{a}", "{b}")]).unwrap(),
        ),
    ]
}

/// Each collapse fixture: system, `J`, sample size.
pub fn collapse_fixtures() -> Vec<(&'static str, Mrs, Vec<Rule>, usize)> {
    let inv = inverse_pair();
    let j_inv = vec![inv.rules[0].clone()];
    let ps = powerset_abc();
    let j_ps = vec![ps.rules[0].clone()];
    let hc = horn_chain();
    let j_hc = vec![hc.rules[1].clone()];
    vec![
        ("inverse pair", inv, j_inv, 7),
        ("powerset", ps, j_ps, 3),
        ("horn chain", hc, j_hc, 3),
    ]
}

// ---- oracles ----

/// Union-find over the one-step graph of a finite carrier, computed by
/// multiplying out every context and rule directly.
pub struct Components {
    pub index: HashMap<Element, usize>,
    parent: Vec<usize>,
}

impl Components {
    pub fn of(mrs: &Mrs) -> Self {
        let elements = mrs.backend.enumerate(usize::MAX);
        let index: HashMap<Element, usize> = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let mut c = Components {
            index,
            parent: (0..elements.len()).collect(),
        };
        for x in &elements {
            for y in &elements {
                for r in &mrs.rules {
                    let b = &mrs.backend;
                    let from = b.mul(&b.mul(x, &r.lhs), y);
                    let to = b.mul(&b.mul(x, &r.rhs), y);
                    let (i, j) = (c.index[&from], c.index[&to]);
                    c.union(i, j);
                }
            }
        }
        c
    }

    fn find(&mut self, i: usize) -> usize {
        let mut i = i;
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, i: usize, j: usize) {
        let (a, b) = (self.find(i), self.find(j));
        self.parent[a] = b;
    }

    pub fn same(&mut self, a: &Element, b: &Element) -> bool {
        let (i, j) = (self.index[a], self.index[b]);
        self.find(i) == self.find(j)
    }

    pub fn count(&mut self) -> usize {
        let n = self.parent.len();
        (0..n).filter(|&i| self.find(i) == i).count()
    }
}

/// Elements of a finite carrier with no proper one-step successor, found by
/// trying every context around every rule.
pub fn brute_irreducibles(mrs: &Mrs) -> BTreeSet<Element> {
    let b = &mrs.backend;
    let elements = b.enumerate(usize::MAX);
    let mut reducible = BTreeSet::new();
    for x in &elements {
        for y in &elements {
            for r in &mrs.rules {
                let from = b.mul(&b.mul(x, &r.lhs), y);
                let to = b.mul(&b.mul(x, &r.rhs), y);
                if from != to {
                    reducible.insert(from);
                }
            }
        }
    }
    elements.into_iter().filter(|e| !reducible.contains(e)).collect()
}

/// Isomorphism by trying every bijection fixing the identity.
pub fn brute_isomorphic(a: &FiniteMonoid, b: &FiniteMonoid) -> bool {
    if a.order() != b.order() {
        return false;
    }
    let n = a.order();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let hom = (0..n).all(|x| (0..n).all(|y| perm[a.mul(x, y)] == b.mul(perm[x], perm[y])));
        if hom && perm[a.identity()] == b.identity() {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Every monoid table on `0..n` with identity `0`, by filling the
/// non-identity block and keeping the associative ones.
pub fn brute_monoids(n: usize) -> Vec<FiniteMonoid> {
    if n == 0 {
        return Vec::new();
    }
    let k = n - 1;
    let cells = k * k;
    let mut out = Vec::new();
    let total = n.pow(cells as u32);
    for code in 0..total {
        let mut t = vec![vec![0; n]; n];
        for (i, row) in t.iter_mut().enumerate() {
            row[0] = i;
        }
        for j in 0..n {
            t[0][j] = j;
        }
        let mut c = code;
        for x in 1..n {
            for y in 1..n {
                t[x][y] = c % n;
                c /= n;
            }
        }
        let assoc = (0..n).all(|x| (0..n).all(|y| (0..n).all(|z| t[t[x][y]][z] == t[x][t[y][z]])));
        if assoc {
            let names = (0..n).map(|i| i.to_string()).collect();
            out.push(FiniteMonoid::new(names, 0, t).unwrap());
        }
    }
    out
}

/// Forward chaining to a fixpoint over sequents given as bitmasks.
pub fn horn_fixpoint(start: u64, sequents: &[(u64, u64)]) -> u64 {
    let mut s = start;
    loop {
        let next = sequents.iter().filter(|(p, _)| s & p == *p).fold(s, |acc, (_, c)| acc | c);
        if next == s {
            return s;
        }
        s = next;
    }
}

// ---- random material ----

pub fn sample(mrs: &Mrs, size: usize, pick: usize) -> Element {
    let all = mrs.backend.enumerate(size);
    all[pick % all.len()].clone()
}

/// A forward trace of up to `len` proper steps, choosing by `choices`.
pub fn random_walk(mrs: &Mrs, start: Element, choices: &[usize]) -> Trace {
    let b = budget();
    let mut t = Trace::empty(start);
    for &c in choices {
        let steps = mrs.proper_steps(t.end(), &b).steps;
        if steps.is_empty() {
            break;
        }
        t.push(steps[c % steps.len()].clone());
    }
    t
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(what()))
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(e.to_string()))
}

// ---- property bodies ----

type Pick = (usize, usize, usize, usize, Vec<usize>);

fn picks() -> impl Strategy<Value = Pick> {
    (
        any::<usize>(),
        any::<usize>(),
        any::<usize>(),
        any::<usize>(),
        prop::collection::vec(any::<usize>(), 0..6),
    )
}

/// A trace `a →* b` multiplied by a context is a trace `x a y →* x b y`.
pub fn prop_context_splice(runner: &mut TestRunner) -> Result<(), String> {
    let fixtures = certified_fixtures();
    let n = fixtures.len();
    runner
        .run(&(0..n, picks()), |(f, (pa, px, py, _, walk))| {
            let (_, mrs, size) = &fixtures[f];
            let t = random_walk(mrs, sample(mrs, *size, pa), &walk);
            let (x, y) = (sample(mrs, 2, px), sample(mrs, 2, py));
            let m = t.multiplied(&mrs.backend, &x, &y);
            ok(m.validate_in(mrs))?;
            let b = &mrs.backend;
            check(m.start == b.mul3(&x, &t.start, &y), || "start".into())?;
            check(*m.end() == b.mul3(&x, t.end(), &y), || "end".into())?;
            check(m.len() == t.len(), || "length".into())
        })
        .map_err(|e| e.to_string())
}

/// Traces `u →* u'` and `v →* v'` splice into `uv →* u'v'`.
pub fn prop_congruence_splice(runner: &mut TestRunner) -> Result<(), String> {
    let fixtures = certified_fixtures();
    let n = fixtures.len();
    runner
        .run(&(0..n, picks(), prop::collection::vec(any::<usize>(), 0..6)), |(f, (pu, pv, _, _, wu), wv)| {
            let (_, mrs, size) = &fixtures[f];
            let b = &mrs.backend;
            let tu = random_walk(mrs, sample(mrs, *size, pu), &wu);
            let tv = random_walk(mrs, sample(mrs, *size, pv), &wv);
            let one = b.identity();
            let left = tu.multiplied(b, &one, &tv.start);
            let right = tv.multiplied(b, tu.end(), &one);
            let spliced = ok(left.then(right))?;
            ok(spliced.validate_in(mrs))?;
            check(spliced.start == b.mul(&tu.start, &tv.start), || "start".into())?;
            check(*spliced.end() == b.mul(tu.end(), tv.end()), || "end".into())
        })
        .map_err(|e| e.to_string())
}

pub fn prop_nf_product(runner: &mut TestRunner) -> Result<(), String> {
    let fixtures: Vec<(CertifiedMrs, usize)> = certified_fixtures()
        .into_iter()
        .map(|(_, m, s)| (CertifiedMrs::certify(m, &budget()).require().unwrap(), s))
        .collect();
    let n = fixtures.len();
    runner
        .run(&(0..n, picks()), |(f, (pu, pv, _, _, _))| {
            let (c, size) = &fixtures[f];
            let b = &c.mrs.backend;
            let (u, v) = (sample(&c.mrs, *size, pu), sample(&c.mrs, *size, pv));
            let whole = ok(c.nf(&b.mul(&u, &v)))?;
            let parts = ok(c.nf(&b.mul(&ok(c.nf(&u))?, &ok(c.nf(&v))?)))?;
            check(whole == parts, || format!("{} {}", b.format(&u), b.format(&v)))
        })
        .map_err(|e| e.to_string())
}

/// Homomorphisms between certified systems, with a sample size on the
/// source.
pub fn hom_fixtures() -> Vec<(MrsHom, usize)> {
    let to_z2 = MrsHom::from_fn(parity(), z2_empty(), |e| match e {
        Element::Nat(n) => Element::Table((*n % 2) as usize),
        other => other.clone(),
    })
    .unwrap();
    let parity_to_shift = MrsHom::from_fn(parity(), naturals_mod(1), |e| e.clone()).unwrap();
    let mod4_to_parity = MrsHom::from_fn(naturals_mod(4), parity(), |e| e.clone()).unwrap();
    let g = g_z2_literal();
    let g_to_parity = MrsHom::new(g, parity(), vec![Element::Nat(1)]).unwrap();
    let inv = inverse_pair();
    let swap = MrsHom::new(inv.clone(), inv, vec![Element::word([1u32]), Element::word([0u32])]).unwrap();
    let horn = horn_chain();
    let forget = MrsHom::from_fn(powerset_abc(), horn.clone(), |e| match e {
        // {a} ↦ {p}, {b} ↦ {q,r}, {c} ↦ {p,q}: rules map into reachable pairs.
        Element::Set(s) => {
            let mut out = 0;
            if s & 1 != 0 {
                out |= 0b001;
            }
            if s & 2 != 0 {
                out |= 0b110;
            }
            if s & 4 != 0 {
                out |= 0b011;
            }
            Element::Set(out)
        }
        other => other.clone(),
    })
    .unwrap();
    vec![
        (to_z2, 40),
        (parity_to_shift, 40),
        (mod4_to_parity, 40),
        (g_to_parity, 8),
        (swap, 7),
        (forget, 3),
    ]
}

pub fn prop_nf_hom(runner: &mut TestRunner) -> Result<(), String> {
    let b = budget();
    let homs = hom_fixtures();
    let n = homs.len();
    runner
        .run(&(0..n, any::<usize>()), |(h, pick)| {
            let (hom, size) = &homs[h];
            let u = sample(&hom.source, *size, pick);
            let direct = ok(hom.target.nf(&ok(hom.apply(&u))?, &b))?;
            let via = ok(hom.target.nf(&ok(hom.apply(&ok(hom.source.nf(&u, &b))?))?, &b))?;
            check(direct == via, || format!("{}", hom.source.format(&u)))
        })
        .map_err(|e| e.to_string())
}

/// `φ(n) = k n` between `(ℕ, {m -> 0})` and `(ℕ, {d -> 0})` with `d` a
/// divisor of `k m`.
fn scaling(m: u64, k: u64, d: u64) -> MrsHom {
    MrsHom::from_fn(naturals_mod(m), naturals_mod(d), move |e| match e {
        Element::Nat(n) => Element::Nat(k * n),
        other => other.clone(),
    })
    .unwrap()
}

fn divisor(n: u64, pick: usize) -> u64 {
    if n == 0 {
        return 1 + (pick % 6) as u64;
    }
    let ds: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    ds[pick % ds.len()]
}

pub fn prop_induced_functorial(runner: &mut TestRunner) -> Result<(), String> {
    // Moduli reach 6·3·3, past the default size bound.
    let b = budget().with_size(64);
    let strategy = (1u64..7, 0u64..4, any::<usize>(), 0u64..4, any::<usize>());
    runner
        .run(&strategy, |(m, k, pd, j, pe)| {
            let d = divisor(k * m, pd);
            let e = divisor(j * d, pe);
            let phi = scaling(m, k, d);
            let psi = scaling(d, j, e);
            let (sa, sb, sc) = (
                ok(Materialized::new(naturals_mod(m), &b))?,
                ok(Materialized::new(naturals_mod(d), &b))?,
                ok(Materialized::new(naturals_mod(e), &b))?,
            );
            let composite = ok(induced_hom(&ok(phi.then(&psi))?, &sa, &sc))?;
            let stepwise = ok(ok(induced_hom(&phi, &sa, &sb))?.then(&ok(induced_hom(&psi, &sb, &sc))?))?;
            check(composite.map == stepwise.map, || format!("m={m} k={k} d={d} j={j} e={e}"))
        })
        .map_err(|e| e.to_string())
}

fn collapsed_fixtures() -> Vec<(Mrs, Collapsed, usize)> {
    collapse_fixtures()
        .into_iter()
        .map(|(_, mrs, j, size)| {
            let c = collapse(&mrs, &j, &budget()).unwrap();
            (mrs, c, size)
        })
        .collect()
}

/// A step `a → b` of the whole system becomes `nf_J a →* nf_J b` in the
/// collapsed one.
pub fn prop_step_projects(runner: &mut TestRunner) -> Result<(), String> {
    let b = budget();
    let fixtures = collapsed_fixtures();
    let n = fixtures.len();
    runner
        .run(&(0..n, any::<usize>(), any::<usize>()), |(f, pa, ps)| {
            let (mrs, c, size) = &fixtures[f];
            let a = sample(mrs, *size, pa);
            let steps = mrs.one_step(&a, &b).steps;
            if steps.is_empty() {
                return Ok(());
            }
            let s = &steps[ps % steps.len()];
            let (x, y) = (ok(c.project(&s.before))?, ok(c.project(&s.after))?);
            let found = c.system.reaches(&x, &y, &b).found();
            let t = found.ok_or_else(|| TestCaseError::fail(format!("{} -/->* {}", c.system.format(&x), c.system.format(&y))))?;
            ok(t.validate_in(&c.system))
        })
        .map_err(|e| e.to_string())
}

/// A step of the collapsed system lifts to a derivation between the
/// representatives in the whole system.
pub fn prop_lifting(runner: &mut TestRunner) -> Result<(), String> {
    let b = budget();
    let fixtures = collapsed_fixtures();
    let n = fixtures.len();
    runner
        .run(&(0..n, any::<usize>(), any::<usize>()), |(f, px, ps)| {
            let (mrs, c, size) = &fixtures[f];
            let x = sample(&c.system, *size, px);
            let steps = c.system.one_step(&x, &b).steps;
            if steps.is_empty() {
                return Ok(());
            }
            let s = &steps[ps % steps.len()];
            let (u, v) = (ok(c.lift(&s.before))?, ok(c.lift(&s.after))?);
            let t = mrs.equivalent(&u, &v, &b).found();
            check(t.is_some(), || format!("{} and {} are not joined", mrs.format(&u), mrs.format(&v)))?;
            ok(t.unwrap().validate_in(mrs))?;
            check(ok(c.project(&u))? == s.before, || "lift then project".into())
        })
        .map_err(|e| e.to_string())
}

pub fn runner() -> TestRunner {
    TestRunner::new(Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    })
}

pub const PROPERTIES: [(&str, fn(&mut TestRunner) -> Result<(), String>); 7] = [
    ("context splice", prop_context_splice),
    ("congruence splice", prop_congruence_splice),
    ("nf of a product", prop_nf_product),
    ("nf through a homomorphism", prop_nf_hom),
    ("induced maps compose", prop_induced_functorial),
    ("steps project to the collapse", prop_step_projects),
    ("collapsed steps lift", prop_lifting),
];
