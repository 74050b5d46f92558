//! Termination and confluence verdicts.
//!
//! Finite carriers are decided exactly. Infinite carriers get a weight
//! certificate when one exists, a cycle or pump witness when the bounded
//! search finds one, and otherwise a bounded verdict.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::backend::{Backend, Element, Letter};
use crate::rewrite::{Budget, Mrs, Rule};
use crate::trace::{Step, Trace};
use crate::verdict::{CheckVerdict, Coverage, Witness};

/// Node expansions spent on the divergence search from a single start.
const EXPANSIONS_PER_START: usize = 300;

/// Largest finite carrier on which full reach sets are compared.
const MAX_REACH_CARRIER: usize = 256;

fn active_rules(mrs: &Mrs) -> Vec<&Rule> {
    mrs.rules.iter().filter(|r| !r.is_degenerate()).collect()
}

pub fn check_noetherian(mrs: &Mrs, budget: &Budget) -> CheckVerdict {
    if active_rules(mrs).is_empty() {
        return CheckVerdict::Verified(Coverage::Proven("no non-degenerate rules".into()));
    }
    if mrs.backend.is_finite() {
        return match finite_cycle(mrs, budget) {
            Some(cycle) => CheckVerdict::Refuted(Witness::Cycle(cycle)),
            None => CheckVerdict::Verified(Coverage::Exhaustive),
        };
    }
    if let Some(reason) = weight_certificate(mrs) {
        return CheckVerdict::Verified(Coverage::Proven(reason));
    }
    if let Some(w) = find_divergence(mrs, budget) {
        return CheckVerdict::Refuted(w);
    }
    size_decrease(mrs, budget)
}

/// Depth-first search for a cycle of proper steps over a finite carrier.
fn finite_cycle(mrs: &Mrs, budget: &Budget) -> Option<Trace> {
    let elements = mrs.backend.enumerate(budget.size);
    let mut color: HashMap<Element, u8> = HashMap::new();
    for root in &elements {
        if color.get(root).copied().unwrap_or(0) != 0 {
            continue;
        }
        color.insert(root.clone(), 1);
        let mut stack: Vec<(Element, Vec<Step>, usize)> =
            vec![(root.clone(), mrs.proper_steps(root, budget).steps, 0)];
        let mut entered: Vec<Step> = Vec::new();
        while let Some(top) = stack.last_mut() {
            if top.2 < top.1.len() {
                let step = top.1[top.2].clone();
                top.2 += 1;
                match color.get(&step.after).copied().unwrap_or(0) {
                    0 => {
                        color.insert(step.after.clone(), 1);
                        let succ = mrs.proper_steps(&step.after, budget).steps;
                        stack.push((step.after.clone(), succ, 0));
                        entered.push(step);
                    }
                    1 => {
                        let k = stack.iter().position(|f| f.0 == step.after)?;
                        let mut steps: Vec<Step> = entered[k..].to_vec();
                        steps.push(step.clone());
                        return Some(Trace {
                            start: step.after,
                            steps,
                        });
                    }
                    _ => {}
                }
            } else {
                let done = stack.pop().map(|f| f.0);
                if let Some(d) = done {
                    color.insert(d, 2);
                }
                entered.pop();
            }
        }
    }
    None
}

/// A positive additive weight that strictly decreases along every
/// non-degenerate rule proves termination on the whole carrier.
fn weight_certificate(mrs: &Mrs) -> Option<String> {
    let rules = active_rules(mrs);
    match &mrs.backend {
        Backend::Naturals => rules
            .iter()
            .all(|r| matches!((&r.lhs, &r.rhs), (Element::Nat(s), Element::Nat(t)) if t < s))
            .then(|| "every rule decreases the value".to_string()),
        Backend::Free(al) => {
            let counts: Vec<(Vec<u64>, Vec<u64>)> = rules
                .iter()
                .map(|r| (letter_counts(&r.lhs, al.len()), letter_counts(&r.rhs, al.len())))
                .collect();
            let weights = find_weights(al.len(), &counts)?;
            Some(describe_weights(al.names(), &weights))
        }
        Backend::Product { letters, .. } => {
            let counts: Vec<(Vec<u64>, Vec<u64>)> = rules
                .iter()
                .map(|r| (letter_counts(&r.lhs, letters.len()), letter_counts(&r.rhs, letters.len())))
                .collect();
            let weights = find_weights(letters.len(), &counts)?;
            Some(format!(
                "fresh-letter {} (base syllables weigh 0)",
                describe_weights(letters.names(), &weights)
            ))
        }
        _ => None,
    }
}

fn letter_counts(e: &Element, n: usize) -> Vec<u64> {
    let mut counts = vec![0u64; n];
    let letters: &[Letter] = match e {
        Element::Word(w) => w,
        Element::Product { letters, .. } => letters,
        _ => &[],
    };
    for &l in letters {
        counts[l as usize] += 1;
    }
    counts
}

fn find_weights(n: usize, counts: &[(Vec<u64>, Vec<u64>)]) -> Option<Vec<u64>> {
    let decreases = |w: &[u64]| {
        counts.iter().all(|(l, r)| {
            let dot = |c: &[u64]| c.iter().zip(w).map(|(a, b)| a * b).sum::<u64>();
            dot(l) > dot(r)
        })
    };
    let uniform = vec![1u64; n];
    if decreases(&uniform) {
        return Some(uniform);
    }
    if n == 0 || n > 6 {
        return None;
    }
    let mut w = vec![1u64; n];
    loop {
        if decreases(&w) {
            return Some(w);
        }
        let mut i = 0;
        loop {
            if i == n {
                return None;
            }
            w[i] += 1;
            if w[i] <= 3 {
                break;
            }
            w[i] = 1;
            i += 1;
        }
    }
}

fn describe_weights(names: &[String], weights: &[u64]) -> String {
    if weights.iter().all(|&w| w == 1) {
        return "length decreases along every rule".into();
    }
    let parts: Vec<String> = names
        .iter()
        .zip(weights)
        .map(|(n, w)| format!("{n}={w}"))
        .collect();
    format!("weighted length decreases along every rule ({})", parts.join(" "))
}

/// Bounded search for a cycle or a pump, starting from the generators and
/// then from every element up to the size bound.
pub fn find_divergence(mrs: &Mrs, budget: &Budget) -> Option<Witness> {
    let mut starts: Vec<Element> = Vec::new();
    let mut seen = BTreeSet::new();
    for e in mrs.backend.generators().into_iter().chain(mrs.backend.enumerate(budget.size)) {
        if seen.insert(e.clone()) {
            starts.push(e);
        }
    }
    let mut spent = 0usize;
    for u in starts {
        if spent >= budget.steps {
            break;
        }
        let cap = EXPANSIONS_PER_START.min(budget.steps - spent);
        let (w, used) = divergence_from(mrs, &u, budget, cap);
        spent += used;
        if w.is_some() {
            return w;
        }
    }
    None
}

/// Cycle through `u` or pump of `u`, searching breadth-first.
pub fn divergence_from(mrs: &Mrs, u: &Element, budget: &Budget, cap: usize) -> (Option<Witness>, usize) {
    let backend = &mrs.backend;
    let base_weight = backend.weight(u);
    let mut parent: HashMap<Element, Step> = HashMap::new();
    let mut seen = BTreeSet::from([u.clone()]);
    let mut queue = VecDeque::from([u.clone()]);
    let mut used = 0;
    while let Some(current) = queue.pop_front() {
        if used >= cap {
            break;
        }
        used += 1;
        for step in mrs.proper_steps(&current, budget).steps {
            let target = step.after.clone();
            if target == *u {
                let mut trace = path_to(u, &current, &parent);
                trace.push(step);
                return (Some(Witness::Cycle(trace)), used);
            }
            if !seen.insert(target.clone()) {
                continue;
            }
            parent.insert(target.clone(), step);
            if let (Some(w0), Some(w1)) = (base_weight, backend.weight(&target)) {
                if w1 > w0 {
                    let f = backend.factorizations(&target, u, budget.factors);
                    let hit = f.pairs.into_iter().find(|(p, q)| {
                        backend.weight(p).unwrap_or(0) + backend.weight(q).unwrap_or(0) > 0
                    });
                    if let Some((p, q)) = hit {
                        let trace = path_to(u, &target, &parent);
                        return (
                            Some(Witness::Pump {
                                trace,
                                left: p,
                                right: q,
                            }),
                            used,
                        );
                    }
                }
            }
            queue.push_back(target);
        }
    }
    (None, used)
}

fn path_to(start: &Element, end: &Element, parent: &HashMap<Element, Step>) -> Trace {
    let mut steps = Vec::new();
    let mut cur = end.clone();
    while cur != *start {
        let s = parent[&cur].clone();
        cur = s.before.clone();
        steps.push(s);
    }
    steps.reverse();
    Trace {
        start: start.clone(),
        steps,
    }
}

/// Bounded fallback: every proper step out of every element up to the
/// bound shrinks the size measure.
fn size_decrease(mrs: &Mrs, budget: &Budget) -> CheckVerdict {
    for a in mrs.backend.enumerate(budget.size) {
        let steps = mrs.proper_steps(&a, budget);
        if steps.truncated {
            return CheckVerdict::unknown(
                budget.size,
                format!("successors of {} were truncated", mrs.format(&a)),
            );
        }
        let size = mrs.backend.size(&a);
        if let Some(s) = steps.steps.iter().find(|s| mrs.backend.size(&s.after) >= size) {
            return CheckVerdict::unknown(
                budget.size,
                format!(
                    "no termination certificate and no cycle found; {} -> {} does not shrink",
                    mrs.format(&a),
                    mrs.format(&s.after)
                ),
            );
        }
    }
    CheckVerdict::Verified(Coverage::UpToBound(budget.size))
}

pub fn check_confluent(mrs: &Mrs, budget: &Budget) -> CheckVerdict {
    if active_rules(mrs).is_empty() {
        return CheckVerdict::Verified(Coverage::Proven("no non-degenerate rules".into()));
    }
    let noetherian = check_noetherian(mrs, budget);
    if mrs.backend.is_finite() {
        return if noetherian.is_verified() {
            finite_by_normal_forms(mrs, budget)
        } else {
            finite_by_reach_sets(mrs, budget)
        };
    }
    match noetherian {
        CheckVerdict::Verified(coverage) => local_confluence(mrs, budget, &coverage),
        _ => bounded_joinability(mrs, budget),
    }
}

/// Newman: on a terminating finite carrier, confluence holds iff every
/// step preserves the (deterministic) normal form.
fn finite_by_normal_forms(mrs: &Mrs, budget: &Budget) -> CheckVerdict {
    let mut nf: HashMap<Element, Trace> = HashMap::new();
    let elements = mrs.backend.enumerate(budget.size);
    for a in &elements {
        match mrs.normal_form(a, budget) {
            Ok(t) => {
                nf.insert(a.clone(), t);
            }
            Err(e) => return CheckVerdict::unknown(budget.size, e.to_string()),
        }
    }
    for a in &elements {
        let na = nf[a].end().clone();
        for step in mrs.proper_steps(a, budget).steps {
            let tb = &nf[&step.after];
            if *tb.end() != na {
                let mut left = Trace::empty(a.clone());
                left.push(step);
                let left = left.then(tb.clone()).expect("chained at step target");
                return CheckVerdict::Refuted(Witness::Peak {
                    left,
                    right: nf[a].clone(),
                    note: "distinct irreducible reducts".into(),
                });
            }
        }
    }
    CheckVerdict::Verified(Coverage::Exhaustive)
}

fn reach_tree(mrs: &Mrs, a: &Element, budget: &Budget) -> HashMap<Element, Option<Step>> {
    let mut tree: HashMap<Element, Option<Step>> = HashMap::from([(a.clone(), None)]);
    let mut queue = VecDeque::from([a.clone()]);
    while let Some(cur) = queue.pop_front() {
        for step in mrs.proper_steps(&cur, budget).steps {
            if !tree.contains_key(&step.after) {
                queue.push_back(step.after.clone());
                tree.insert(step.after.clone(), Some(step));
            }
        }
    }
    tree
}

fn tree_path(a: &Element, b: &Element, tree: &HashMap<Element, Option<Step>>) -> Trace {
    let mut steps = Vec::new();
    let mut cur = b.clone();
    while let Some(Some(step)) = tree.get(&cur) {
        cur = step.before.clone();
        steps.push(step.clone());
    }
    steps.reverse();
    Trace {
        start: a.clone(),
        steps,
    }
}

/// Without termination: every two reducts of a common source must share a
/// reduct. Exact on small finite carriers.
fn finite_by_reach_sets(mrs: &Mrs, budget: &Budget) -> CheckVerdict {
    let elements = mrs.backend.enumerate(budget.size);
    if elements.len() > MAX_REACH_CARRIER {
        return CheckVerdict::unknown(
            budget.size,
            format!("carrier of {} elements is too large for reach-set comparison", elements.len()),
        );
    }
    let reach: HashMap<Element, HashMap<Element, Option<Step>>> = elements
        .iter()
        .map(|a| (a.clone(), reach_tree(mrs, a, budget)))
        .collect();
    for a in &elements {
        let from_a: Vec<&Element> = {
            let mut v: Vec<&Element> = reach[a].keys().collect();
            v.sort();
            v
        };
        for (i, b) in from_a.iter().enumerate() {
            for c in &from_a[i + 1..] {
                let joinable = reach[*b].keys().any(|d| reach[*c].contains_key(d));
                if !joinable {
                    return CheckVerdict::Refuted(Witness::Peak {
                        left: tree_path(a, b, &reach[a]),
                        right: tree_path(a, c, &reach[a]),
                        note: "no common reduct".into(),
                    });
                }
            }
        }
    }
    CheckVerdict::Verified(Coverage::Exhaustive)
}

/// Local confluence at every element up to the bound, by normal forms.
fn local_confluence(mrs: &Mrs, budget: &Budget, termination: &Coverage) -> CheckVerdict {
    // With a termination proof, peaks past the overlap size add nothing.
    let covered = match termination {
        Coverage::Proven(_) => overlap_coverage(mrs, budget.size),
        _ => None,
    };
    let limit = match &covered {
        Some((needed, _)) => *needed,
        None => budget.size,
    };
    for a in mrs.backend.enumerate(limit) {
        let steps = mrs.proper_steps(&a, budget);
        if steps.truncated {
            return CheckVerdict::unknown(
                budget.size,
                format!("successors of {} were truncated", mrs.format(&a)),
            );
        }
        let mut first: Option<(Step, Trace)> = None;
        for step in steps.steps {
            let t = match mrs.normal_form(&step.after, budget) {
                Ok(t) => t,
                Err(e) => return CheckVerdict::unknown(budget.size, e.to_string()),
            };
            match &first {
                None => first = Some((step, t)),
                Some((s0, t0)) if t0.end() != t.end() => {
                    let mut left = Trace::empty(a.clone());
                    left.push(s0.clone());
                    let mut right = Trace::empty(a.clone());
                    right.push(step);
                    return CheckVerdict::Refuted(Witness::Peak {
                        left: left.then(t0.clone()).expect("chained"),
                        right: right.then(t).expect("chained"),
                        note: "distinct irreducible reducts".into(),
                    });
                }
                _ => {}
            }
        }
    }
    match covered {
        Some((_, reason)) => CheckVerdict::Verified(Coverage::Proven(reason)),
        None => CheckVerdict::Verified(Coverage::UpToBound(budget.size)),
    }
}

/// For words and naturals every peak that is not trivially joinable lives
/// in an element of size at most `2L - 1`, `L` the longest left side.
fn overlap_coverage(mrs: &Mrs, bound: usize) -> Option<(usize, String)> {
    let longest = active_rules(mrs)
        .iter()
        .map(|r| mrs.backend.size(&r.lhs))
        .max()
        .unwrap_or(0);
    let needed = (2 * longest).saturating_sub(1);
    let kind = match mrs.backend {
        Backend::Free(_) => "every critical overlap",
        Backend::Naturals => "every overlapping pair of rule applications",
        _ => return None,
    };
    (bound >= needed).then(|| {
        (needed, format!("terminating, and local confluence up to size {needed} covers {kind}"))
    })
}

/// Without termination on an infinite carrier: compares bounded reach sets
/// of the two sides of each local peak.
fn bounded_joinability(mrs: &Mrs, budget: &Budget) -> CheckVerdict {
    let cap = EXPANSIONS_PER_START;
    let bounded_reach = |a: &Element| -> (BTreeSet<Element>, bool) {
        let mut seen = BTreeSet::from([a.clone()]);
        let mut queue = VecDeque::from([a.clone()]);
        let mut complete = true;
        let mut used = 0;
        while let Some(cur) = queue.pop_front() {
            if used >= cap {
                complete = false;
                break;
            }
            used += 1;
            let s = mrs.proper_steps(&cur, budget);
            complete &= !s.truncated;
            for step in s.steps {
                if seen.insert(step.after.clone()) {
                    queue.push_back(step.after);
                }
            }
        }
        (seen, complete)
    };
    let mut cache: HashMap<Element, (BTreeSet<Element>, bool)> = HashMap::new();
    for a in mrs.backend.enumerate(budget.size) {
        let steps = mrs.proper_steps(&a, budget).steps;
        for s in &steps {
            if !cache.contains_key(&s.after) {
                let reach = bounded_reach(&s.after);
                cache.insert(s.after.clone(), reach);
            }
        }
        for (i, s1) in steps.iter().enumerate() {
            for s2 in &steps[i + 1..] {
                let (r1, c1) = &cache[&s1.after];
                let (r2, c2) = &cache[&s2.after];
                if *c1 && *c2 && r1.is_disjoint(r2) {
                    let mut left = Trace::empty(a.clone());
                    left.push(s1.clone());
                    let mut right = Trace::empty(a.clone());
                    right.push(s2.clone());
                    return CheckVerdict::Refuted(Witness::Peak {
                        left,
                        right,
                        note: "reach sets are finite and disjoint".into(),
                    });
                }
            }
        }
    }
    CheckVerdict::unknown(
        budget.size,
        "termination not established; local peaks not refuted within the bound",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::FiniteMonoid;

    #[test]
    fn empty_and_degenerate_rule_sets_are_verified() {
        let m = Mrs::from_literals(Backend::free(["a"]).unwrap(), &[("a", "a")]).unwrap();
        let b = Budget::default();
        assert!(check_noetherian(&m, &b).is_verified());
        assert!(check_confluent(&m, &b).is_verified());
    }

    #[test]
    fn finite_cycle_detected() {
        let t = Backend::table(FiniteMonoid::cyclic(2));
        let m = Mrs::from_literals(t, &[("0", "1"), ("1", "0")]).unwrap();
        match check_noetherian(&m, &Budget::default()) {
            CheckVerdict::Refuted(Witness::Cycle(c)) => {
                c.validate_in(&m).unwrap();
                assert_eq!(c.start, *c.end());
            }
            other => panic!("{other:?}"),
        }
        // non-terminating yet confluent: everything is connected both ways
        assert!(check_confluent(&m, &Budget::default()).is_verified());
    }

    #[test]
    fn weighted_certificate_for_mixed_rules() {
        let f = Backend::free(["a", "A", "b", "B"]).unwrap();
        let m = Mrs::from_literals(f, &[("aA", "_"), ("Aa", "Bb"), ("Bb", "_"), ("bB", "_")]).unwrap();
        match check_noetherian(&m, &Budget::default()) {
            CheckVerdict::Verified(Coverage::Proven(why)) => assert!(why.contains("a=2"), "{why}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn naturals_cycle_and_non_confluence() {
        let m = Mrs::from_literals(Backend::Naturals, &[("1", "2"), ("2", "1")]).unwrap();
        assert!(check_noetherian(&m, &Budget::default()).is_refuted());
        let split = Mrs::from_literals(Backend::Naturals, &[("3", "0"), ("2", "0")]).unwrap();
        // 3 -> 0 and 3 -> 1 are both irreducible
        assert!(check_confluent(&split, &Budget::default()).is_refuted());
    }

    #[test]
    fn pump_in_free_product() {
        let base = Backend::table(FiniteMonoid::cyclic(2));
        let p = base.adjoin(&["u".to_string()]).unwrap();
        let m = Mrs::from_literals(p, &[("1", "u")]).unwrap();
        match check_noetherian(&m, &Budget::default().with_size(2)) {
            CheckVerdict::Refuted(w @ Witness::Pump { .. }) => {
                if let Witness::Pump { trace, left, right } = &w {
                    trace.validate_in(&m).unwrap();
                    assert_eq!(m.backend.mul3(left, &trace.start, right), *trace.end());
                }
            }
            other => panic!("{other:?}"),
        }
    }
}
