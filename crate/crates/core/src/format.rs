//! Text formats: systems, tables, homomorphism and identification maps,
//! topology and Horn-theory specs, GETT scripts, and reports.
//!
//! A system file is a `monoid` header, optional body lines for the
//! carrier, then a `rules` section:
//!
//! ```text
//! # parity
//! monoid table elements = 0 1 ; identity = 0
//! 1*1=0
//! rules
//! 1 -> 0
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::backend::{Alphabet, Backend, Letter, Reduced};
use crate::error::{Error, Result};
use crate::generators::{HornSpec, TopologySpec};
use crate::gett::{apply_type1, apply_type1_with, apply_type2, apply_type2_with, apply_type3, apply_type4, rejected, GettMove, Replay};
use crate::irreducibles::MrsHom;
use crate::rewrite::{Budget, Mrs, Rule};
use crate::table::FiniteMonoid;
use crate::trace::{Direction, Step, Trace};
use crate::verdict::{CheckVerdict, Coverage};

/// Non-empty lines with comments stripped, numbered from 1.
fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect()
}

fn column_of(line: &str, needle: &str) -> usize {
    line.find(needle).map_or(1, |p| p + 1)
}

/// Splits `lhs -> rhs`.
fn split_arrow(line: usize, text: &str) -> Result<(String, String)> {
    let (l, r) = text
        .split_once("->")
        .ok_or_else(|| Error::parse(line, 1, format!("expected `lhs -> rhs`, found `{text}`")))?;
    let (l, r) = (l.trim(), r.trim());
    if l.is_empty() {
        return Err(Error::parse(line, 1, "missing left-hand side"));
    }
    if r.is_empty() {
        return Err(Error::parse(line, column_of(text, "->") + 2, "missing right-hand side"));
    }
    Ok((l.to_string(), r.to_string()))
}

/// `key = a b c` with optional commas.
fn list_after(line: usize, text: &str, key: &str) -> Result<Vec<String>> {
    let rest = text
        .strip_prefix(key)
        .map(str::trim_start)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| Error::parse(line, 1, format!("expected `{key} = ...`")))?;
    Ok(rest
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect())
}

struct Cursor<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<(usize, &'a str)> {
        self.lines.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let l = self.peek();
        self.pos += 1;
        l
    }
}

fn parse_carrier(cur: &mut Cursor<'_>, line: usize, header: &str) -> Result<Backend> {
    let (kind, rest) = header.split_once(char::is_whitespace).unwrap_or((header, ""));
    let rest = rest.trim();
    match kind {
        "free" => {
            let names = list_after(line, rest, "letters")?;
            Ok(Backend::Free(Alphabet::new(names).map_err(|e| e.at_line(line))?))
        }
        "naturals" => Ok(Backend::Naturals),
        "powerset" => Backend::powerset(list_after(line, rest, "base")?).map_err(|e| e.at_line(line)),
        "table" => {
            let (elements, identity) = rest
                .split_once(';')
                .ok_or_else(|| Error::parse(line, 1, "expected `elements = ... ; identity = e`"))?;
            let names = list_after(line, elements.trim(), "elements")?;
            let identity = list_after(line, identity.trim(), "identity")?;
            let [identity] = identity.as_slice() else {
                return Err(Error::parse(line, column_of(header, "identity"), "exactly one identity expected"));
            };
            let e = names
                .iter()
                .position(|n| n == identity)
                .ok_or_else(|| Error::parse(line, column_of(header, "identity"), format!("identity `{identity}` is not an element")))?;
            let mut entries = BTreeMap::new();
            while let Some((l, text)) = cur.peek() {
                let Some((lhs, z)) = text.split_once('=') else { break };
                let Some((x, y)) = lhs.split_once('*') else { break };
                cur.next();
                let idx = |n: &str, col: usize| {
                    names
                        .iter()
                        .position(|m| m == n.trim())
                        .ok_or_else(|| Error::parse(l, col, format!("`{}` is not an element", n.trim())))
                };
                let key = (idx(x, 1)?, idx(y, column_of(text, "*") + 1)?);
                let value = idx(z, column_of(text, "=") + 1)?;
                if entries.insert(key, value).is_some_and(|old| old != value) {
                    return Err(Error::parse(l, 1, format!("conflicting entries for {}*{}", x.trim(), y.trim())));
                }
            }
            let n = names.len();
            let mut table = vec![vec![usize::MAX; n]; n];
            for a in 0..n {
                for b in 0..n {
                    table[a][b] = match entries.get(&(a, b)) {
                        Some(&v) => v,
                        None if a == e => b,
                        None if b == e => a,
                        None => {
                            return Err(Error::InvalidTable(format!("missing entry {}*{}", names[a], names[b])))
                        }
                    };
                }
            }
            Ok(Backend::table(FiniteMonoid::new(names, e, table)?))
        }
        "reduced" => {
            let alphabet = Alphabet::new(list_after(line, rest, "letters")?).map_err(|e| e.at_line(line))?;
            let mut rules: Vec<(Vec<Letter>, Vec<Letter>)> = Vec::new();
            while let Some((l, text)) = cur.peek() {
                let Some(body) = text.strip_prefix("reduce ") else { break };
                cur.next();
                let (lhs, rhs) = split_arrow(l, body)?;
                rules.push((
                    alphabet.parse_word(&lhs).map_err(|e| e.at_line(l))?,
                    alphabet.parse_word(&rhs).map_err(|e| e.at_line(l))?,
                ));
            }
            Ok(Backend::Reduced(Arc::new(Reduced::new(alphabet, rules))))
        }
        "product" => {
            let letters = Alphabet::new(list_after(line, rest, "letters")?).map_err(|e| e.at_line(line))?;
            let (l, text) = cur
                .next()
                .ok_or_else(|| Error::parse(line + 1, 1, "expected a `base` line after a product header"))?;
            let inner = text
                .strip_prefix("base ")
                .ok_or_else(|| Error::parse(l, 1, "expected `base <carrier>`"))?;
            let base = parse_carrier(cur, l, inner.trim())?;
            let fresh: Vec<String> = letters.names().to_vec();
            base.adjoin(&fresh).map_err(|e| e.at_line(l))
        }
        other => Err(Error::parse(
            line,
            column_of(header, other),
            format!("unknown carrier `{other}` (free, naturals, powerset, table, reduced, product)"),
        )),
    }
}

pub fn parse_mrs(text: &str) -> Result<Mrs> {
    let mut cur = Cursor {
        lines: content_lines(text),
        pos: 0,
    };
    let (line, header) = cur.next().ok_or_else(|| Error::parse(1, 1, "empty system file"))?;
    let header = header
        .strip_prefix("monoid ")
        .ok_or_else(|| Error::parse(line, 1, "expected a `monoid <carrier>` header"))?;
    let backend = parse_carrier(&mut cur, line, header.trim())?;
    let mut rules = Vec::new();
    match cur.next() {
        None => {}
        Some((_, "rules")) => {
            while let Some((l, text)) = cur.next() {
                let (lhs, rhs) = split_arrow(l, text)?;
                let lhs = backend.parse(&lhs).map_err(|e| e.at_line(l))?;
                let rhs = backend.parse(&rhs).map_err(|e| e.at_line(l))?;
                rules.push(Rule::new(lhs, rhs));
            }
        }
        Some((l, text)) => return Err(Error::parse(l, 1, format!("expected `rules`, found `{text}`"))),
    }
    Mrs::new(backend, rules)
}

fn print_carrier(backend: &Backend, out: &mut Vec<String>, prefix: &str) {
    match backend {
        Backend::Free(al) => out.push(format!("{prefix}free letters = {}", al.names().join(" "))),
        Backend::Naturals => out.push(format!("{prefix}naturals")),
        Backend::Powerset(base) => out.push(format!("{prefix}powerset base = {}", base.join(" "))),
        Backend::Table(m) => {
            out.push(format!(
                "{prefix}table elements = {} ; identity = {}",
                m.names().join(" "),
                m.name(m.identity())
            ));
            for a in m.non_identity() {
                for b in m.non_identity() {
                    out.push(format!("{}*{}={}", m.name(a), m.name(b), m.name(m.mul(a, b))));
                }
            }
        }
        Backend::Reduced(r) => {
            out.push(format!("{prefix}reduced letters = {}", r.alphabet.names().join(" ")));
            for (l, t) in &r.rules {
                out.push(format!("reduce {} -> {}", r.alphabet.format_word(l), r.alphabet.format_word(t)));
            }
        }
        Backend::Product { base, letters } => {
            out.push(format!("{prefix}product letters = {}", letters.names().join(" ")));
            print_carrier(base, out, "base ");
        }
    }
}

pub fn print_mrs(mrs: &Mrs) -> String {
    let mut out = Vec::new();
    print_carrier(&mrs.backend, &mut out, "monoid ");
    out.push("rules".into());
    out.extend(mrs.rules.iter().map(|r| mrs.format_rule(r)));
    out.join("\n") + "\n"
}

/// A table given as a system file with a `table` carrier.
pub fn parse_table(text: &str) -> Result<FiniteMonoid> {
    match parse_mrs(text)?.backend {
        Backend::Table(m) => Ok((*m).clone()),
        other => Err(Error::usage(format!("expected a table carrier, found {}", other.kind_name()))),
    }
}

/// `map x -> y` lines.
fn parse_map_lines(text: &str) -> Result<Vec<(usize, String, String)>> {
    content_lines(text)
        .into_iter()
        .map(|(l, t)| {
            let body = t
                .strip_prefix("map ")
                .ok_or_else(|| Error::parse(l, 1, "expected `map <source> -> <target>`"))?;
            let (x, y) = split_arrow(l, body)?;
            Ok((l, x, y))
        })
        .collect()
}

/// A homomorphism given by the images of the source generators.
pub fn parse_hom(text: &str, source: &Mrs, target: &Mrs) -> Result<MrsHom> {
    let gens = source.backend.generators();
    let mut images = vec![None; gens.len()];
    for (l, x, y) in parse_map_lines(text)? {
        let g = source.backend.parse(&x).map_err(|e| e.at_line(l))?;
        let i = gens
            .iter()
            .position(|h| *h == g)
            .ok_or_else(|| Error::parse(l, 5, format!("`{x}` is not a generator of the source")))?;
        images[i] = Some(target.backend.parse(&y).map_err(|e| e.at_line(l))?);
    }
    let images = images
        .into_iter()
        .zip(&gens)
        .map(|(img, g)| img.ok_or_else(|| Error::usage(format!("no image given for generator {}", source.format(g)))))
        .collect::<Result<Vec<_>>>()?;
    MrsHom::new(source.clone(), target.clone(), images)
}

pub fn print_hom(h: &MrsHom) -> String {
    h.source
        .backend
        .generators()
        .iter()
        .zip(h.generators())
        .map(|(g, img)| format!("map {} -> {}\n", h.source.format(g), h.target.format(img)))
        .collect()
}

/// `map a -> b` lines between element names of two tables, as an index map.
pub fn parse_identification(text: &str, from: &FiniteMonoid, to: &FiniteMonoid) -> Result<Vec<usize>> {
    let mut map = vec![None; from.order()];
    for (l, x, y) in parse_map_lines(text)? {
        let i = from.index_of(&x).ok_or_else(|| Error::parse(l, 5, format!("`{x}` is not an irreducible of the source")))?;
        let j = to.index_of(&y).ok_or_else(|| Error::parse(l, 1, format!("`{y}` is not an irreducible of the target")))?;
        map[i] = Some(j);
    }
    map.into_iter()
        .enumerate()
        .map(|(i, j)| j.ok_or_else(|| Error::usage(format!("`{}` is not identified", from.name(i)))))
        .collect()
}

fn atom_set(line: usize, atoms: &[String], names: &str) -> Result<u64> {
    let mut set = 0u64;
    for a in names.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()) {
        let i = atoms
            .iter()
            .position(|b| b == a)
            .ok_or_else(|| Error::parse(line, 1, format!("undeclared atom `{a}`")))?;
        set |= 1 << i;
    }
    Ok(set)
}

/// `points a b c` then `open {a,b}` lines.
pub fn parse_topology(text: &str) -> Result<TopologySpec> {
    let lines = content_lines(text);
    let Some(&(l0, head)) = lines.first() else {
        return Err(Error::parse(1, 1, "empty topology file"));
    };
    let points: Vec<String> = head
        .strip_prefix("points")
        .ok_or_else(|| Error::parse(l0, 1, "expected `points ...`"))?
        .split_whitespace()
        .map(str::to_string)
        .collect();
    let mut opens = Vec::new();
    for &(l, t) in &lines[1..] {
        let body = t
            .strip_prefix("open")
            .map(str::trim)
            .and_then(|b| b.strip_prefix('{'))
            .and_then(|b| b.strip_suffix('}'))
            .ok_or_else(|| Error::parse(l, 1, "expected `open {a,b,...}`"))?;
        opens.push(atom_set(l, &points, body)?);
    }
    TopologySpec::new(points, opens)
}

/// `atoms p q r` then `sequent p q |- r` lines.
pub fn parse_horn(text: &str) -> Result<HornSpec> {
    let lines = content_lines(text);
    let Some(&(l0, head)) = lines.first() else {
        return Err(Error::parse(1, 1, "empty theory file"));
    };
    let atoms: Vec<String> = head
        .strip_prefix("atoms")
        .ok_or_else(|| Error::parse(l0, 1, "expected `atoms ...`"))?
        .split_whitespace()
        .map(str::to_string)
        .collect();
    let mut sequents = Vec::new();
    for &(l, t) in &lines[1..] {
        let body = t
            .strip_prefix("sequent")
            .ok_or_else(|| Error::parse(l, 1, "expected `sequent <premises> |- <conclusions>`"))?;
        let (p, c) = body
            .split_once("|-")
            .ok_or_else(|| Error::parse(l, 1, "missing `|-`"))?;
        sequents.push((atom_set(l, &atoms, p)?, atom_set(l, &atoms, c)?));
    }
    HornSpec::new(atoms, sequents)
}

/// A move as written in a script, before it is read against a system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawKind {
    Add(String, String),
    Remove(String, String),
    Adjoin(String, String),
    Collapse(Vec<(String, String)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawStep {
    pub line: usize,
    pub direction: Direction,
    pub left: String,
    pub lhs: String,
    pub rhs: String,
    pub right: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawMove {
    pub line: usize,
    pub kind: RawKind,
    pub steps: Vec<RawStep>,
}

pub fn parse_script(text: &str) -> Result<Vec<RawMove>> {
    let mut moves: Vec<RawMove> = Vec::new();
    for (l, t) in content_lines(text) {
        let (verb, rest) = t.split_once(char::is_whitespace).unwrap_or((t, ""));
        let rest = rest.trim();
        let kind = match verb {
            "step" => {
                let Some(last) = moves.last_mut() else {
                    return Err(Error::parse(l, 1, "certificate step before any move"));
                };
                if !matches!(last.kind, RawKind::Add(..) | RawKind::Remove(..)) {
                    return Err(Error::parse(l, 1, "only add and remove moves take certificate steps"));
                }
                let (sign, body) = rest.split_at(rest.find(char::is_whitespace).unwrap_or(rest.len()));
                let direction = match sign {
                    "+" => Direction::Forward,
                    "-" => Direction::Backward,
                    _ => return Err(Error::parse(l, 6, "step direction must be `+` or `-`")),
                };
                let parts: Vec<&str> = body.split('|').map(str::trim).collect();
                let [left, rule, right] = parts.as_slice() else {
                    return Err(Error::parse(l, 1, "expected `step <+|-> x | lhs -> rhs | y`"));
                };
                let (lhs, rhs) = split_arrow(l, rule)?;
                last.steps.push(RawStep {
                    line: l,
                    direction,
                    left: left.to_string(),
                    lhs,
                    rhs,
                    right: right.to_string(),
                });
                continue;
            }
            "add" => {
                let (a, b) = split_arrow(l, rest)?;
                RawKind::Add(a, b)
            }
            "remove" => {
                let (a, b) = split_arrow(l, rest)?;
                RawKind::Remove(a, b)
            }
            "adjoin" => {
                let (a, b) = split_arrow(l, rest)?;
                RawKind::Adjoin(a, b)
            }
            "collapse" => {
                let open = rest.find('{').ok_or_else(|| Error::parse(l, 1, "expected `collapse { ... }`"))?;
                let close = rest.rfind('}').filter(|&c| c > open).ok_or_else(|| Error::parse(l, t.len(), "missing `}`"))?;
                let inner = &rest[open + 1..close];
                let sides = inner
                    .split(';')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| split_arrow(l, s))
                    .collect::<Result<Vec<_>>>()?;
                RawKind::Collapse(sides)
            }
            other => return Err(Error::parse(l, 1, format!("unknown move `{other}`"))),
        };
        moves.push(RawMove {
            line: l,
            kind,
            steps: Vec::new(),
        });
    }
    Ok(moves)
}

fn read_rule(mrs: &Mrs, line: usize, lhs: &str, rhs: &str) -> Result<Rule> {
    Ok(Rule::new(
        mrs.element(lhs).map_err(|e| e.at_line(line))?,
        mrs.element(rhs).map_err(|e| e.at_line(line))?,
    ))
}

fn read_trace(mrs: &Mrs, start: &crate::Element, steps: &[RawStep]) -> Result<Trace> {
    let mut t = Trace::empty(start.clone());
    for s in steps {
        let rule = read_rule(mrs, s.line, &s.lhs, &s.rhs)?;
        let left = mrs.element(&s.left).map_err(|e| e.at_line(s.line))?;
        let right = mrs.element(&s.right).map_err(|e| e.at_line(s.line))?;
        t.push(Step::new(&mrs.backend, &rule, left, right, s.direction));
    }
    Ok(t)
}

/// Reads a move against the current system and applies it. Type 1 and 2
/// moves without certificate steps get one by search; given steps are
/// checked as written.
pub fn apply_raw(mrs: &Mrs, raw: &RawMove, budget: &Budget) -> Result<(Mrs, GettMove)> {
    let l = raw.line;
    match &raw.kind {
        RawKind::Add(a, b) => {
            let rule = read_rule(mrs, l, a, b)?;
            if raw.steps.is_empty() {
                apply_type1(mrs, &rule.lhs, &rule.rhs, budget)
            } else {
                let t = read_trace(mrs, &rule.lhs, &raw.steps)?;
                apply_type1_with(mrs, rule, t)
            }
        }
        RawKind::Remove(a, b) => {
            let rule = read_rule(mrs, l, a, b)?;
            if raw.steps.is_empty() {
                apply_type2(mrs, &rule, budget)
            } else {
                let t = read_trace(mrs, &rule.lhs, &raw.steps)?;
                apply_type2_with(mrs, rule, t)
            }
        }
        RawKind::Adjoin(v, a) => {
            let target = mrs.element(a).map_err(|e| e.at_line(l))?;
            apply_type3(mrs, v, &target)
        }
        RawKind::Collapse(sides) => {
            let j = sides
                .iter()
                .map(|(a, b)| read_rule(mrs, l, a, b))
                .collect::<Result<Vec<_>>>()?;
            apply_type4(mrs, &j, budget)
        }
    }
}

/// Replays a parsed script, stopping at the first move that fails.
pub fn replay_raw(initial: &Mrs, moves: &[RawMove], budget: &Budget) -> (Replay, Vec<GettMove>) {
    let mut current = initial.clone();
    let mut applied = Vec::new();
    let mut coverage = Coverage::Proven("every certificate revalidated".into());
    for (i, raw) in moves.iter().enumerate() {
        match apply_raw(&current, raw, budget) {
            Ok((next, mv)) => {
                if let GettMove::Collapse {
                    evidence: CheckVerdict::Verified(Coverage::UpToBound(b)),
                    ..
                } = &mv
                {
                    coverage = Coverage::UpToBound(*b);
                }
                applied.push(mv);
                current = next;
            }
            Err(e) => return (rejected(current, i, e), applied),
        }
    }
    let replay = Replay {
        system: current,
        verdict: CheckVerdict::Verified(coverage),
        failed_at: None,
        accepted: moves.len(),
    };
    (replay, applied)
}

/// A command outcome in a stable textual form, also serializable.
#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct Report {
    pub command: String,
    pub status: String,
    pub bound: usize,
    pub steps: usize,
    pub details: Vec<(String, String)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<String>,
}

impl Report {
    pub fn new(command: &str, budget: &Budget) -> Self {
        Report {
            command: command.into(),
            status: "ok".into(),
            bound: budget.size,
            steps: budget.steps,
            ..Default::default()
        }
    }

    pub fn detail(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.details.push((key.into(), value.into()));
        self
    }

    pub fn verdict(&mut self, key: &str, v: &CheckVerdict, backend: &Backend) -> &mut Self {
        if self.status == "ok" || self.status == "verified" || (self.status == "unknown" && v.is_refuted()) {
            self.status = v.status().into();
        }
        self.detail(key, v.render(backend))
    }

    pub fn render(&self) -> String {
        let mut out = format!("{}: {} (bound {}, steps {})\n", self.command, self.status, self.bound, self.steps);
        for (k, v) in &self.details {
            out.push_str(&format!("  {k}: {v}\n"));
        }
        for line in &self.trace {
            out.push_str(&format!("  | {line}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PARITY: &str = "# parity\nmonoid table elements = 0 1 ; identity = 0\n1*1=0\nrules\n1 -> 0\n";

    #[test]
    fn round_trips() {
        let fixtures = [
            PARITY.to_string(),
            "monoid free letters = a b\nrules\nab -> _\nba -> _\n".into(),
            "monoid naturals\nrules\n2 -> 0\n".into(),
            "monoid powerset base = a b c\nrules\n{b} -> {a,b}\n".into(),
            "monoid reduced letters = a b\nreduce ab -> _\nrules\nba -> _\n".into(),
            "monoid product letters = u\nbase table elements = 0 1 ; identity = 0\n1*1=0\nrules\nu -> 1\n".into(),
        ];
        for f in fixtures {
            let m = parse_mrs(&f).unwrap();
            let printed = print_mrs(&m);
            assert_eq!(parse_mrs(&printed).unwrap().rules, m.rules);
            assert_eq!(parse_mrs(&printed).unwrap().backend, m.backend);
        }
    }

    #[test]
    fn diagnostics() {
        let e = parse_mrs("monoid free letters = a b\nrules\nab ->\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
        let e = parse_mrs("monoid table elements = e x y ; identity = e\nx*x=y\nx*y=e\ny*x=e\ny*y=y\n").unwrap_err();
        assert!(e.to_string().contains("not associative"), "{e}");
        let e = parse_mrs("monoid table elements = e x ; identity = e\n").unwrap_err();
        assert!(e.to_string().contains("missing entry x*x"), "{e}");
    }

    #[test]
    fn scripts_parse_and_replay() {
        let m = parse_mrs("monoid naturals\nrules\n2 -> 0\n").unwrap();
        let text = "add 4 -> 0\n  step + 2 | 2 -> 0 | 0\n  step + 0 | 2 -> 0 | 0\nremove 4 -> 0\n";
        let raw = parse_script(text).unwrap();
        assert_eq!(raw.len(), 2);
        let (r, moves) = replay_raw(&m, &raw, &Budget::default());
        assert!(r.verdict.is_verified());
        assert_eq!(moves.len(), 2);
        let bad = parse_script("add 4 -> 1\n  step + 2 | 2 -> 0 | 0\n").unwrap();
        let (r, _) = replay_raw(&m, &bad, &Budget::default());
        assert_eq!(r.failed_at, Some(0));
    }

    #[test]
    fn topology_and_horn_files() {
        let t = parse_topology("points a b\nopen {}\nopen {a}\nopen {a,b}\n").unwrap();
        assert_eq!(t.points.len(), 2);
        let h = parse_horn("atoms p q r\nsequent p |- q\nsequent q |- r\n").unwrap();
        assert_eq!(h.sequents, vec![(1, 2), (2, 4)]);
        assert!(parse_horn("atoms p\nsequent p |- z\n").is_err());
    }
}
