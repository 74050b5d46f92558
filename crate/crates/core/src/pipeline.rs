//! Move scripts built from proofs: from a finite monoid with no rules to
//! its canonical presentation, and between two systems whose monoids of
//! irreducibles are identified.

use std::collections::{BTreeSet, HashMap};

use crate::backend::{Alphabet, Backend, Element};
use crate::error::{Error, Result};
use crate::gett::{apply_type3, apply_type4, check_coherent, replay_script, GettMove, GettScript, Replay};
use crate::irreducibles::{monoid_of_irreducibles, IrreducibleMonoid};
use crate::presentation::g_of_monoid;
use crate::rewrite::{Budget, CertifiedMrs, Mrs, Rule};
use crate::table::{find_isomorphism, FiniteMonoid};
use crate::trace::{Direction, Step, Trace};
use crate::verdict::{CheckVerdict, Coverage, Witness};

/// Appends moves while tracking the current system. Types 1 to 3 are
/// validated as they are appended.
struct Builder {
    current: Mrs,
    moves: Vec<GettMove>,
    budget: Budget,
}

impl Builder {
    fn new(initial: Mrs, budget: &Budget) -> Self {
        Builder {
            current: initial,
            moves: Vec::new(),
            budget: *budget,
        }
    }

    fn add(&mut self, rule: Rule, derivation: Trace) -> Result<()> {
        if self.current.has_rule(&rule) {
            return Ok(());
        }
        derivation.proves(&self.current, &rule.lhs, &rule.rhs)?;
        self.current = self.current.with_rule(rule.clone());
        self.moves.push(GettMove::Add { rule, derivation });
        Ok(())
    }

    fn remove(&mut self, rule: Rule, derivation: Trace) -> Result<()> {
        let without = self.current.without_rule(&rule);
        if !self.current.has_rule(&rule) {
            return Err(Error::refused(format!("{} is not a rule", self.current.format_rule(&rule))));
        }
        derivation.proves(&without, &rule.lhs, &rule.rhs)?;
        self.current = without;
        self.moves.push(GettMove::Remove { rule, derivation });
        Ok(())
    }

    fn adjoin(&mut self, letter: &str, target: Element) -> Result<()> {
        let (next, mv) = apply_type3(&self.current, letter, &target)?;
        self.current = next;
        self.moves.push(mv);
        Ok(())
    }

    /// Records the collapse even when `J` is not coherent, so that replay
    /// reports the failure at this index.
    fn collapse(&mut self, j: Vec<Rule>) -> Result<()> {
        match apply_type4(&self.current, &j, &self.budget) {
            Ok((next, mv)) => {
                self.current = next;
                self.moves.push(mv);
                Ok(())
            }
            Err(e) => {
                let evidence = check_coherent(&self.current, &j, &self.budget)
                    .unwrap_or_else(|err| CheckVerdict::Refuted(Witness::Message(err.to_string())));
                self.moves.push(GettMove::Collapse { j, evidence });
                Err(e)
            }
        }
    }

    fn step(&self, rule: &Rule, left: Element, right: Element, direction: Direction) -> Step {
        Step::new(&self.current.backend, rule, left, right, direction)
    }

    fn unit(&self) -> Element {
        self.current.backend.identity()
    }

    fn mul(&self, x: &Element, y: &Element) -> Element {
        self.current.backend.mul(x, y)
    }
}

fn trace(start: Element, steps: Vec<Step>) -> Trace {
    let mut t = Trace::empty(start);
    for s in steps {
        if s.is_proper() {
            t.push(s);
        }
    }
    t
}

/// A fresh prime suffix: one more `'` than any name already ending in primes
/// would clash with.
fn prime_suffix(taken: &BTreeSet<String>, names: &[String]) -> String {
    let mut suffix = "'".to_string();
    while names.iter().any(|n| taken.contains(&format!("{n}{suffix}"))) {
        suffix.push('\'');
    }
    suffix
}

/// Runs the construction from `(M, ∅)` to `G(M)` on the builder, whose
/// current system must be a table `M` without rules. `letters[m]` names
/// the letter adjoined for `m` (unused for the identity).
fn present_table(b: &mut Builder, m: &FiniteMonoid, letters: &[String]) -> Result<()> {
    let base = b.current.backend.clone();
    let plus: Vec<usize> = m.non_identity().collect();
    for &x in &plus {
        let target = b.current.backend.embed_from(&base, &Element::Table(x))?;
        b.adjoin(&letters[x], target)?;
    }
    let backend = b.current.backend.clone();
    let elem = |x: usize| backend.embed_from(&base, &Element::Table(x));
    let letter = |x: usize| -> Result<Element> {
        if x == m.identity() {
            Ok(backend.identity())
        } else {
            backend.letter_element(&letters[x])
        }
    };
    let defining = |x: usize| -> Result<Rule> { Ok(Rule::new(letter(x)?, elem(x)?)) };

    for x in 0..m.order() {
        for y in 0..m.order() {
            let xy = m.mul(x, y);
            let start = b.mul(&letter(x)?, &letter(y)?);
            let mut steps = Vec::new();
            if x != m.identity() {
                steps.push(b.step(&defining(x)?, b.unit(), letter(y)?, Direction::Forward));
            }
            if y != m.identity() {
                steps.push(b.step(&defining(y)?, elem(x)?, b.unit(), Direction::Forward));
            }
            if xy != m.identity() {
                steps.push(b.step(&defining(xy)?, b.unit(), b.unit(), Direction::Backward));
            }
            b.add(Rule::new(start.clone(), letter(xy)?), trace(start, steps))?;
        }
    }
    for &x in &plus {
        let step = b.step(&defining(x)?, b.unit(), b.unit(), Direction::Backward);
        b.add(Rule::new(elem(x)?, letter(x)?), trace(elem(x)?, vec![step]))?;
    }
    for &x in &plus {
        let reverse = Rule::new(elem(x)?, letter(x)?);
        let step = b.step(&reverse, b.unit(), b.unit(), Direction::Backward);
        b.remove(defining(x)?, trace(letter(x)?, vec![step]))?;
    }
    if !plus.is_empty() {
        let j = plus
            .iter()
            .map(|&x| Ok(Rule::new(elem(x)?, letter(x)?)))
            .collect::<Result<Vec<_>>>()?;
        b.collapse(j)?;
    }
    Ok(())
}

/// The letters `name'` used for a table, with enough primes to avoid its
/// element names.
pub fn primed_letters(m: &FiniteMonoid) -> Vec<String> {
    let taken: BTreeSet<String> = m.names().iter().cloned().collect();
    let names = Alphabet::letter_names(m.names());
    let suffix = prime_suffix(&taken, &names);
    names.iter().map(|n| format!("{n}{suffix}")).collect()
}

/// The script from `(M, ·, ∅)` to `G(M)` (up to renaming `m' ↔ m`). When a
/// move cannot be certified the script stops there, with that move last,
/// so that replay reports its index.
pub fn presentation_script(m: &FiniteMonoid, budget: &Budget) -> Result<GettScript> {
    let initial = Mrs::new(Backend::table(m.clone()), Vec::new())?;
    let mut b = Builder::new(initial, budget);
    match present_table(&mut b, m, &primed_letters(m)) {
        Ok(()) | Err(Error::Refused(_)) | Err(Error::Undetermined(_)) => Ok(GettScript { moves: b.moves }),
        Err(e) => Err(e),
    }
}

/// Whether `sys` is `G(M)` after renaming each letter `m'` to `m`.
pub fn equals_canonical(sys: &Mrs, m: &FiniteMonoid) -> Result<bool> {
    let g = g_of_monoid(m)?;
    let letters = primed_letters(m);
    match &sys.backend {
        Backend::Free(al) => {
            let mut rename = Vec::new();
            for l in al.letters() {
                let Some(x) = letters.iter().position(|n| n == al.name(l)) else {
                    return Ok(false);
                };
                rename.push(g.nu(x));
            }
            if rename.len() != m.order() - 1 {
                return Ok(false);
            }
            let map = |e: &Element| -> Element {
                match e {
                    Element::Word(w) => g.mrs.backend.product_of(&w.iter().map(|&l| rename[l as usize].clone()).collect::<Vec<_>>()),
                    other => other.clone(),
                }
            };
            let ours: BTreeSet<Rule> = sys.rules.iter().map(|r| Rule::new(map(&r.lhs), map(&r.rhs))).collect();
            let theirs: BTreeSet<Rule> = g.mrs.rules.iter().cloned().collect();
            Ok(ours == theirs)
        }
        // G of the trivial monoid is the free monoid on no letters, which is
        // the trivial monoid again.
        Backend::Table(t) if t.order() == 1 && m.order() == 1 => {
            Ok(sys.rules.iter().all(|r| r.is_degenerate()) && sys.rules.len() == g.mrs.rules.len())
        }
        _ => Ok(false),
    }
}

#[derive(Clone, Debug)]
pub struct StageReport {
    pub name: &'static str,
    pub moves: usize,
    pub system: Mrs,
}

#[derive(Clone, Debug)]
pub struct PipelineFailure {
    pub stage: usize,
    pub index: usize,
    pub error: Error,
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub initial: Mrs,
    pub script: GettScript,
    pub stages: Vec<StageReport>,
    pub failure: Option<PipelineFailure>,
    /// Replay of the whole script from `initial`, when it was built.
    pub replay: Option<Replay>,
    /// The replayed system is the target up to the identification.
    pub matches_target: bool,
    pub verdict: CheckVerdict,
}

pub const STAGE_NAMES: [&str; 5] = [
    "collapse by all rules of the source",
    "presentation of the irreducibles and fresh letters",
    "add the target rules on letters",
    "add the product rules and remove the auxiliary ones",
    "collapse by the product rules",
];

/// `identification[i]` is the index in `I(B)` matched with element `i` of
/// `I(A)`.
pub fn tietze_path(a: &Mrs, b: &Mrs, identification: Option<Vec<usize>>, budget: &Budget) -> Result<PipelineReport> {
    let ca = CertifiedMrs::certify(a.clone(), budget).require()?;
    let cb = CertifiedMrs::certify(b.clone(), budget).require()?;
    if !b.backend.is_finite() {
        return Err(Error::refused("the target system needs a finite carrier"));
    }
    let ia = monoid_of_irreducibles(&ca)?;
    let ib = monoid_of_irreducibles(&cb)?;
    let iota = match identification {
        Some(map) => {
            check_identification(&ia, &ib, &map)?;
            map
        }
        None => find_isomorphism(&ia.table, &ib.table)
            .ok_or_else(|| Error::refused("the monoids of irreducibles are not isomorphic"))?,
    };
    let one_b = b.backend.identity();
    if cb.nf(&one_b)? != one_b {
        return Err(Error::refused("the identity of the target must be irreducible"));
    }

    let mut builder = Builder::new(a.clone(), budget);
    let mut stages = Vec::new();
    let mut failure = None;
    let outcome = build_path(&mut builder, &mut stages, a, &cb, &ia, &ib, &iota);
    if let Err((stage, error)) = outcome {
        failure = Some(PipelineFailure {
            stage,
            index: builder.moves.len().saturating_sub(1),
            error,
        });
    }
    let script = GettScript { moves: builder.moves };
    if let Some(f) = &failure {
        let verdict = match &f.error {
            Error::Undetermined(_) | Error::BudgetExhausted { .. } => {
                CheckVerdict::unknown(budget.size, format!("stage {}: {}", f.stage, f.error))
            }
            _ => CheckVerdict::Refuted(Witness::Message(format!("stage {}, move {}: {}", f.stage, f.index, f.error))),
        };
        return Ok(PipelineReport {
            initial: a.clone(),
            script,
            stages,
            failure,
            replay: None,
            matches_target: false,
            verdict,
        });
    }
    let replay = replay_script(a, &script, budget);
    let matches_target = replay.verdict.is_verified() && matches_target_system(&replay.system, b)?;
    let verdict = if matches_target {
        replay.verdict.clone()
    } else if replay.verdict.is_verified() {
        CheckVerdict::Refuted(Witness::Message("final system differs from the target".into()))
    } else {
        replay.verdict.clone()
    };
    Ok(PipelineReport {
        initial: a.clone(),
        script,
        stages,
        failure,
        replay: Some(replay),
        matches_target,
        verdict,
    })
}

fn check_identification(ia: &IrreducibleMonoid, ib: &IrreducibleMonoid, map: &[usize]) -> Result<()> {
    let (ma, mb) = (&ia.table, &ib.table);
    let image: BTreeSet<usize> = map.iter().copied().collect();
    if map.len() != ma.order() || ma.order() != mb.order() || image.len() != map.len() || image.iter().any(|&i| i >= mb.order()) {
        return Err(Error::refused("the identification is not a bijection between the irreducibles"));
    }
    for x in 0..ma.order() {
        for y in 0..ma.order() {
            if map[ma.mul(x, y)] != mb.mul(map[x], map[y]) {
                return Err(Error::refused(format!(
                    "the identification does not respect {} * {}",
                    ma.name(x),
                    ma.name(y)
                )));
            }
        }
    }
    Ok(())
}

type StageResult = std::result::Result<(), (usize, Error)>;

fn build_path(
    bld: &mut Builder,
    stages: &mut Vec<StageReport>,
    a: &Mrs,
    cb: &CertifiedMrs,
    ia: &IrreducibleMonoid,
    ib: &IrreducibleMonoid,
    iota: &[usize],
) -> StageResult {
    let b = &cb.mrs;
    let mut mark = 0;
    let close = |bld: &Builder, stages: &mut Vec<StageReport>, mark: &mut usize| {
        stages.push(StageReport {
            name: STAGE_NAMES[stages.len()],
            moves: bld.moves.len() - *mark,
            system: bld.current.clone(),
        });
        *mark = bld.moves.len();
    };

    // (1) Collapse by every rule: the table of irreducibles of the source.
    bld.collapse(a.rules.clone()).map_err(|e| (1, e))?;
    let Backend::Table(t_a) = bld.current.backend.clone() else {
        return Err((1, Error::Inconsistent("collapse by all rules did not give a table".into())));
    };
    close(bld, stages, &mut mark);

    // (2) Letters are the target's element names, primed past every name
    // of the source table.
    let carrier = b.backend.enumerate(cb.budget.size);
    let b_names = Alphabet::letter_names(&carrier.iter().map(|e| b.format(e)).collect::<Vec<_>>());
    let taken: BTreeSet<String> = t_a.names().iter().cloned().collect();
    let suffix = prime_suffix(&taken, &b_names);
    let position: HashMap<&Element, usize> = carrier.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let letter_name = |e: &Element| format!("{}{suffix}", b_names[position[e]]);
    // Rows of the collapsed table and of I(A) carry the same names.
    let ia_of_row = (0..t_a.order())
        .map(|x| ia.table.index_of(t_a.name(x)))
        .collect::<Option<Vec<usize>>>()
        .ok_or_else(|| (1, Error::Inconsistent("collapsed table and I(A) disagree".into())))?;
    let b_of_row = |x: usize| ib.element(iota[ia_of_row[x]]);
    let letters: Vec<String> = (0..t_a.order()).map(|x| letter_name(b_of_row(x))).collect();
    present_table(bld, &t_a, &letters).map_err(|e| (2, e))?;
    let one_b = b.backend.identity();
    let nu = |bld: &Builder, e: &Element| -> Result<Element> {
        if *e == one_b {
            Ok(bld.unit())
        } else {
            bld.current.backend.letter_element(&letter_name(e))
        }
    };
    let irr_b: BTreeSet<&Element> = ib.elements.iter().collect();
    let outside: Vec<&Element> = carrier.iter().filter(|e| !irr_b.contains(e)).collect();
    for e in &outside {
        let target = nu(bld, &cb.nf(e).map_err(|e| (2, e))?).map_err(|e| (2, e))?;
        bld.adjoin(&letter_name(e), target).map_err(|e| (2, e))?;
    }
    let w_rules: Vec<Rule> = outside
        .iter()
        .map(|e| Ok(Rule::new(nu(bld, e)?, nu(bld, &cb.nf(e)?)?)))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| (2, e))?;
    close(bld, stages, &mut mark);

    // ν b rewrites to ν(nf b) by its W rule, or is already there.
    let to_normal = |bld: &Builder, e: &Element, left: Element, right: Element| -> Result<Vec<Step>> {
        if irr_b.contains(e) {
            return Ok(Vec::new());
        }
        let rule = Rule::new(nu(bld, e)?, nu(bld, &cb.nf(e)?)?);
        Ok(vec![bld.step(&rule, left, right, Direction::Forward)])
    };

    // (3) The rules of the target, on letters.
    let l_rules: Vec<Rule> = b
        .rules
        .iter()
        .map(|r| Ok(Rule::new(nu(bld, &r.lhs)?, nu(bld, &r.rhs)?)))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| (3, e))?;
    for (r, lr) in b.rules.iter().zip(&l_rules) {
        let mut go = || -> Result<()> {
            let mut steps = to_normal(bld, &r.lhs, bld.unit(), bld.unit())?;
            let back = to_normal(bld, &r.rhs, bld.unit(), bld.unit())?;
            steps.extend(back.into_iter().rev().map(|s| s.reversed()));
            bld.add(lr.clone(), trace(lr.lhs.clone(), steps))
        };
        go().map_err(|e| (3, e))?;
    }
    close(bld, stages, &mut mark);

    // (4) Product rules ν x ν y -> ν(xy), then the auxiliary rules go.
    let to_row = |e: &Element| -> Result<usize> {
        let i = ib.index_of(&cb.nf(e)?).ok_or_else(|| Error::Inconsistent("untabulated normal form".into()))?;
        (0..t_a.order())
            .find(|&x| iota[ia_of_row[x]] == i)
            .ok_or_else(|| Error::Inconsistent("identification is not onto".into()))
    };
    let mut r_b = Vec::new();
    for x in &carrier {
        for y in &carrier {
            let mut go = || -> Result<Rule> {
                let (nx, ny) = (nu(bld, x)?, nu(bld, y)?);
                let xy = b.backend.mul(x, y);
                let rule = Rule::new(bld.mul(&nx, &ny), nu(bld, &xy)?);
                let (fx, fy) = (cb.nf(x)?, cb.nf(y)?);
                let (vfx, vfy) = (nu(bld, &fx)?, nu(bld, &fy)?);
                let mut steps = to_normal(bld, x, bld.unit(), ny.clone())?;
                steps.extend(to_normal(bld, y, vfx.clone(), bld.unit())?);
                let m_rule = Rule::new(bld.mul(&vfx, &vfy), nu(bld, b_of_row(t_a.mul(to_row(x)?, to_row(y)?)))?);
                steps.push(bld.step(&m_rule, bld.unit(), bld.unit(), Direction::Forward));
                let mut back = to_normal(bld, &xy, bld.unit(), bld.unit())?;
                back.reverse();
                steps.extend(back.into_iter().map(|s| s.reversed()));
                bld.add(rule.clone(), trace(rule.lhs.clone(), steps))?;
                Ok(rule)
            };
            r_b.push(go().map_err(|e| (4, e))?);
        }
    }
    // A path x ->* y of the target lifted through the product rules.
    let lift = |bld: &Builder, path: &Trace| -> Result<Vec<Step>> {
        let mut out = Vec::new();
        for s in &path.steps {
            let (x, y) = (&s.left, &s.right);
            let (lhs, rhs) = match s.direction {
                Direction::Forward => (&s.rule.lhs, &s.rule.rhs),
                Direction::Backward => (&s.rule.rhs, &s.rule.lhs),
            };
            let sy = b.backend.mul(lhs, y);
            let ty = b.backend.mul(rhs, y);
            let unit = bld.unit();
            let split = |p: &Element, q: &Element| -> Result<Rule> {
                Ok(Rule::new(bld.mul(&nu(bld, p)?, &nu(bld, q)?), nu(bld, &b.backend.mul(p, q))?))
            };
            out.push(bld.step(&split(x, &sy)?, unit.clone(), unit.clone(), Direction::Backward));
            out.push(bld.step(&split(lhs, y)?, nu(bld, x)?, unit.clone(), Direction::Backward));
            let l = Rule::new(nu(bld, &s.rule.lhs)?, nu(bld, &s.rule.rhs)?);
            out.push(bld.step(&l, nu(bld, x)?, nu(bld, y)?, s.direction));
            out.push(bld.step(&split(rhs, y)?, nu(bld, x)?, unit.clone(), Direction::Forward));
            out.push(bld.step(&split(x, &ty)?, unit.clone(), unit, Direction::Forward));
        }
        Ok(out)
    };
    for (e, w) in outside.iter().zip(&w_rules) {
        if l_rules.contains(w) {
            continue;
        }
        let mut go = || -> Result<()> {
            let path = b.normal_form(e, &cb.budget)?;
            let steps = lift(bld, &path)?;
            bld.remove(w.clone(), trace(w.lhs.clone(), steps))
        };
        go().map_err(|e| (4, e))?;
    }
    let leftovers: Vec<Rule> = bld
        .current
        .rules
        .iter()
        .filter(|r| !r_b.contains(r) && !l_rules.contains(r))
        .cloned()
        .collect();
    for r in leftovers {
        // ν'x ν'y -> ν'(x∘y) is ν x ν y -> ν(xy) followed by the lifted
        // normal-form path of xy.
        let mut go = || -> Result<()> {
            let (x, y) = split_letters(bld, &r.lhs, &carrier, &nu)?;
            let xy = b.backend.mul(&x, &y);
            let first = Rule::new(r.lhs.clone(), nu(bld, &xy)?);
            let mut steps = vec![bld.step(&first, bld.unit(), bld.unit(), Direction::Forward)];
            steps.extend(lift(bld, &b.normal_form(&xy, &cb.budget)?)?);
            bld.remove(r.clone(), trace(r.lhs.clone(), steps))
        };
        go().map_err(|e| (4, e))?;
    }
    close(bld, stages, &mut mark);

    // (5) Collapse by the product rules.
    bld.collapse(r_b).map_err(|e| (5, e))?;
    close(bld, stages, &mut mark);
    Ok(())
}

/// Reads a left side `ν x ν y` back as the pair `(x, y)`.
fn split_letters(
    bld: &Builder,
    lhs: &Element,
    carrier: &[Element],
    nu: &dyn Fn(&Builder, &Element) -> Result<Element>,
) -> Result<(Element, Element)> {
    for x in carrier {
        for y in carrier {
            if bld.mul(&nu(bld, x)?, &nu(bld, y)?) == *lhs {
                return Ok((x.clone(), y.clone()));
            }
        }
    }
    Err(Error::refused(format!(
        "{} is not a product of two letters",
        bld.current.format(lhs)
    )))
}

/// The replayed system is a table with no more elements than `b`, whose
/// literals are the letters of `b`'s elements, with the same product and
/// the same rules.
fn matches_target_system(sys: &Mrs, b: &Mrs) -> Result<bool> {
    let Backend::Table(t) = &sys.backend else {
        return Ok(false);
    };
    let carrier = b.backend.enumerate(usize::MAX);
    if carrier.len() != t.order() {
        return Ok(false);
    }
    // Names of the final table are literals of one-letter words (or `_`).
    let mut map = Vec::new();
    for e in &carrier {
        let candidates: Vec<usize> = (0..t.order())
            .filter(|&i| {
                let n = t.name(i);
                let bare = n.trim_start_matches('[').trim_end_matches(']').trim_end_matches('\'');
                if b.backend.is_identity(e) {
                    n == "_"
                } else {
                    bare == b.format(e)
                }
            })
            .collect();
        match candidates.as_slice() {
            [i] => map.push((e.clone(), *i)),
            _ => return Ok(false),
        }
    }
    let index = |e: &Element| map.iter().find(|(x, _)| x == e).map(|(_, i)| *i).unwrap_or(usize::MAX);
    for x in &carrier {
        for y in &carrier {
            if t.mul(index(x), index(y)) != index(&b.backend.mul(x, y)) {
                return Ok(false);
            }
        }
    }
    let ours: BTreeSet<Rule> = sys.rules.iter().cloned().collect();
    let theirs: BTreeSet<Rule> = b
        .rules
        .iter()
        .map(|r| Rule::new(Element::Table(index(&r.lhs)), Element::Table(index(&r.rhs))))
        .collect();
    Ok(ours == theirs)
}

/// Per-stage check that each intermediate system still presents `I(A)`:
/// quotient tables on finite carriers, tables of irreducibles otherwise.
pub fn stage_preserves(stage: &StageReport, expected: &FiniteMonoid, budget: &Budget) -> Result<Option<bool>> {
    let sys = &stage.system;
    if sys.backend.is_finite() {
        let q = crate::irreducibles::quotient_monoid(sys, budget)?;
        return Ok(Some(crate::table::isomorphic(&q.table, expected)));
    }
    let c = CertifiedMrs::certify(sys.clone(), budget);
    if !c.is_certified() {
        return Ok(None);
    }
    match monoid_of_irreducibles(&c) {
        Ok(i) => Ok(Some(crate::table::isomorphic(&i.table, expected))),
        Err(_) => Ok(None),
    }
}

impl PipelineReport {
    pub fn coverage(&self) -> Option<&Coverage> {
        match &self.verdict {
            CheckVerdict::Verified(c) => Some(c),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gett::replay_script;

    #[test]
    fn trivial_monoid_script_is_degenerate() {
        let b = Budget::default();
        let m = FiniteMonoid::trivial();
        let script = presentation_script(&m, &b).unwrap();
        assert_eq!(script.len(), 1);
        let start = Mrs::new(Backend::table(m.clone()), vec![]).unwrap();
        let r = replay_script(&start, &script, &b);
        assert!(r.verdict.is_verified());
        assert!(equals_canonical(&r.system, &m).unwrap());
    }

    #[test]
    fn z2_script_shape_and_collapse_failure() {
        let b = Budget::default();
        let m = FiniteMonoid::cyclic(2);
        let script = presentation_script(&m, &b).unwrap();
        let kinds: Vec<u8> = script.moves.iter().map(|mv| mv.kind()).collect();
        assert_eq!(kinds, vec![3, 1, 1, 1, 1, 2, 4]);
        let start = Mrs::new(Backend::table(m), vec![]).unwrap();
        let r = replay_script(&start, &script, &b);
        assert_eq!(r.failed_at, Some(6));
        assert!(r.verdict.is_refuted());
    }

    #[test]
    fn path_between_parity_presentations() {
        let b = Budget::default();
        let a = Mrs::from_literals(Backend::Naturals, &[("1", "0")]).unwrap();
        let target = Mrs::from_literals(Backend::powerset(["a"]).unwrap(), &[("{a}", "{}")]).unwrap();
        let report = tietze_path(&a, &target, None, &b).unwrap();
        assert!(report.failure.is_none(), "{:?}", report.failure);
        assert!(report.verdict.is_verified(), "{:?}", report.verdict);
        assert!(report.matches_target);
        assert_eq!(report.stages.len(), 5);
    }

    #[test]
    fn path_from_g_of_z2_stops_in_the_second_stage() {
        let b = Budget::default();
        let g = g_of_monoid(&FiniteMonoid::cyclic(2)).unwrap();
        let target = Mrs::new(Backend::table(FiniteMonoid::cyclic(2)), vec![]).unwrap();
        let report = tietze_path(&g.mrs, &target, None, &b).unwrap();
        assert_eq!(report.failure.as_ref().map(|f| f.stage), Some(2));
        assert!(report.verdict.is_refuted());
    }
}
