//! Ambient monoids. Every backend exposes the same surface: identity,
//! product, a size measure, enumeration, literal syntax and, most
//! importantly, factorization of an element around a sub-element. The
//! rewrite engine derives one-step successors from factorizations alone.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::table::FiniteMonoid;

pub type Letter = u32;

/// Default cap on the number of factor pairs a single call may produce.
pub const DEFAULT_FACTOR_BUDGET: usize = 200_000;

/// Largest base set the powerset backend accepts.
pub const MAX_POWERSET_BASE: usize = 20;

/// An element of some backend. The variant must match the backend kind;
/// [`Backend::contains`] checks membership.
///
/// A free-product element is kept in padded form: `slots` has one more
/// entry than `letters`, slots may hold the base identity, and the value
/// denoted is `slots[0] letters[0] slots[1] ... letters[n-1] slots[n]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Word(Vec<Letter>),
    Nat(u64),
    Set(u64),
    Table(usize),
    Product { slots: Vec<Element>, letters: Vec<Letter> },
}

impl Element {
    pub fn word(letters: impl Into<Vec<Letter>>) -> Self {
        Element::Word(letters.into())
    }

    /// A base element viewed as a single-syllable free-product element.
    pub fn syllable(base: Element) -> Self {
        Element::Product {
            slots: vec![base],
            letters: Vec::new(),
        }
    }
}

/// A finite alphabet of named letters.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, Letter>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut alphabet = Alphabet {
            names: Vec::new(),
            index: HashMap::new(),
        };
        for name in names {
            alphabet.push(name.into())?;
        }
        Ok(alphabet)
    }

    fn push(&mut self, name: String) -> Result<Letter> {
        if name.is_empty()
            || name == "_"
            || name
                .chars()
                .any(|c| c.is_whitespace() || matches!(c, '[' | ']' | '#' | ';' | '|'))
            || name.contains("->")
        {
            return Err(Error::usage(format!("`{name}` is not a valid letter name")));
        }
        if self.index.contains_key(&name) {
            return Err(Error::usage(format!("letter `{name}` declared twice")));
        }
        let letter = self.names.len() as Letter;
        self.index.insert(name.clone(), letter);
        self.names.push(name);
        Ok(letter)
    }

    /// Letter names standing for arbitrary element names: brackets become
    /// parentheses, other reserved characters become `_`, and collisions
    /// get primes.
    pub fn letter_names(names: &[String]) -> Vec<String> {
        let mut out: Vec<String> = Vec::with_capacity(names.len());
        for name in names {
            let mut n: String = name
                .replace("->", "-")
                .chars()
                .map(|c| match c {
                    '[' => '(',
                    ']' => ')',
                    c if c.is_whitespace() || matches!(c, '#' | ';' | '|') => '_',
                    c => c,
                })
                .collect();
            if n.is_empty() || n == "_" {
                n = "e".into();
            }
            while out.contains(&n) || (n != *name && names.contains(&n)) {
                n.push('\'');
            }
            out.push(n);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, letter: Letter) -> &str {
        &self.names[letter as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.index.get(name).copied()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        0..self.names.len() as Letter
    }

    /// This alphabet followed by `fresh`; fails on any clash.
    pub fn extended(&self, fresh: &[String]) -> Result<Alphabet> {
        let mut out = self.clone();
        for name in fresh {
            if out.index.contains_key(name) {
                return Err(Error::usage(format!("letter `{name}` is not fresh")));
            }
            out.push(name.clone())?;
        }
        Ok(out)
    }

    /// Letters print bare when they are one character long and bracketed
    /// otherwise; the empty word prints as `_`.
    pub fn format_word(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "_".to_string();
        }
        let mut out = String::new();
        for &l in word {
            let name = self.name(l);
            if name.chars().count() == 1 {
                out.push_str(name);
            } else {
                out.push('[');
                out.push_str(name);
                out.push(']');
            }
        }
        out
    }

    pub fn parse_word(&self, text: &str) -> Result<Vec<Letter>> {
        let text = text.trim();
        if text == "_" {
            return Ok(Vec::new());
        }
        if text.is_empty() {
            return Err(Error::parse(0, 1, "empty literal (use `_` for the empty word)"));
        }
        let mut word = Vec::new();
        let mut chars = text.char_indices().peekable();
        while let Some((pos, c)) = chars.next() {
            let name = if c == '[' {
                let mut name = String::new();
                loop {
                    match chars.next() {
                        Some((_, ']')) => break,
                        Some((_, ch)) => name.push(ch),
                        None => return Err(Error::parse(0, pos + 1, "unclosed `[` in word")),
                    }
                }
                name
            } else {
                c.to_string()
            };
            match self.letter(&name) {
                Some(l) => word.push(l),
                None => {
                    return Err(Error::ForeignElement {
                        element: text.to_string(),
                        backend: "free".into(),
                    })
                }
            }
        }
        Ok(word)
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.names.join(" "))
    }
}

/// Factor pairs `(x, y)` with `x·s·y = a`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Factorizations {
    pub pairs: Vec<(Element, Element)>,
    pub truncated: bool,
}

/// Results `x·t·y` over factor pairs `x·s·y = a`, one witness pair per
/// distinct result.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Rewrites {
    pub hits: Vec<(Element, Element, Element)>,
    pub truncated: bool,
}

/// Free monoid modulo a terminating set of word rules, with elements the
/// irreducible words and product "concatenate then reduce". Used for
/// collapsed systems over free ambients.
#[derive(Clone, PartialEq, Eq)]
pub struct Reduced {
    pub alphabet: Alphabet,
    pub rules: Vec<(Vec<Letter>, Vec<Letter>)>,
    /// `Some((p, q))` when the rules are exactly `pq -> _` over the two
    /// letters `p`, `q`: the bicyclic monoid, whose elements are `q^m p^n`
    /// and which gets exact successor computation.
    pub bicyclic: Option<(Letter, Letter)>,
}

impl Reduced {
    pub fn new(alphabet: Alphabet, rules: Vec<(Vec<Letter>, Vec<Letter>)>) -> Self {
        let bicyclic = match (alphabet.len(), rules.as_slice()) {
            (2, [(lhs, rhs)]) if rhs.is_empty() && lhs.len() == 2 && lhs[0] != lhs[1] => {
                Some((lhs[0], lhs[1]))
            }
            _ => None,
        };
        Reduced {
            alphabet,
            rules,
            bicyclic,
        }
    }

    pub fn reduce(&self, word: &[Letter]) -> Vec<Letter> {
        if let Some((p, q)) = self.bicyclic {
            let (m, n) = self.exponents_of_word(word, p, q);
            return bicyclic_word(p, q, m, n);
        }
        let mut current = word.to_vec();
        'outer: loop {
            for start in 0..=current.len() {
                for (lhs, rhs) in &self.rules {
                    if lhs != rhs && current[start..].starts_with(lhs) {
                        current.splice(start..start + lhs.len(), rhs.iter().copied());
                        continue 'outer;
                    }
                }
            }
            return current;
        }
    }

    pub fn is_reduced(&self, word: &[Letter]) -> bool {
        (0..=word.len()).all(|start| {
            self.rules
                .iter()
                .all(|(lhs, rhs)| lhs == rhs || !word[start..].starts_with(lhs))
        })
    }

    /// `(m, n)` with `word = q^m p^n` in the bicyclic monoid.
    fn exponents_of_word(&self, word: &[Letter], p: Letter, _q: Letter) -> (u64, u64) {
        let (mut m, mut n) = (0u64, 0u64);
        for &l in word {
            if l == p {
                n += 1;
            } else if n > 0 {
                n -= 1;
            } else {
                m += 1;
            }
        }
        (m, n)
    }
}

fn bicyclic_word(p: Letter, q: Letter, m: u64, n: u64) -> Vec<Letter> {
    let mut w = vec![q; m as usize];
    w.extend(std::iter::repeat(p).take(n as usize));
    w
}

fn bicyclic_mul(x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
    let c = x.1.min(y.0);
    (x.0 + y.0 - c, x.1 + y.1 - c)
}

impl fmt::Debug for Reduced {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Reduced{:?}", self.alphabet)
    }
}

/// An ambient monoid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Backend {
    Free(Alphabet),
    Naturals,
    Powerset(Vec<String>),
    Table(Arc<FiniteMonoid>),
    /// `base * F_letters`; the base is never itself free or a product.
    Product { base: Arc<Backend>, letters: Alphabet },
    Reduced(Arc<Reduced>),
}

impl Backend {
    pub fn free<S: Into<String>>(letters: impl IntoIterator<Item = S>) -> Result<Self> {
        Ok(Backend::Free(Alphabet::new(letters)?))
    }

    pub fn powerset<S: Into<String>>(base: impl IntoIterator<Item = S>) -> Result<Self> {
        let base: Vec<String> = base.into_iter().map(Into::into).collect();
        if base.len() > MAX_POWERSET_BASE {
            return Err(Error::usage(format!(
                "powerset base is limited to {MAX_POWERSET_BASE} atoms"
            )));
        }
        let mut seen = BTreeSet::new();
        for atom in &base {
            if atom.is_empty()
                || atom
                    .chars()
                    .any(|c| c.is_whitespace() || matches!(c, '{' | '}' | ',' | '#' | '.'))
                || !seen.insert(atom.clone())
            {
                return Err(Error::usage(format!("invalid or repeated atom `{atom}`")));
            }
        }
        Ok(Backend::Powerset(base))
    }

    pub fn table(monoid: FiniteMonoid) -> Self {
        Backend::Table(Arc::new(monoid))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Backend::Free(_) => "free",
            Backend::Naturals => "naturals",
            Backend::Powerset(_) => "powerset",
            Backend::Table(_) => "table",
            Backend::Product { .. } => "free-product",
            Backend::Reduced(r) if r.bicyclic.is_some() => "bicyclic",
            Backend::Reduced(_) => "reduced",
        }
    }

    /// Carriers that can be enumerated exhaustively.
    pub fn is_finite(&self) -> bool {
        matches!(self, Backend::Powerset(_) | Backend::Table(_))
    }

    pub fn identity(&self) -> Element {
        match self {
            Backend::Free(_) | Backend::Reduced(_) => Element::Word(Vec::new()),
            Backend::Naturals => Element::Nat(0),
            Backend::Powerset(_) => Element::Set(0),
            Backend::Table(m) => Element::Table(m.identity()),
            Backend::Product { base, .. } => Element::syllable(base.identity()),
        }
    }

    pub fn is_identity(&self, a: &Element) -> bool {
        *a == self.identity()
    }

    pub fn contains(&self, a: &Element) -> bool {
        match (self, a) {
            (Backend::Free(al), Element::Word(w)) => w.iter().all(|&l| (l as usize) < al.len()),
            (Backend::Reduced(r), Element::Word(w)) => {
                w.iter().all(|&l| (l as usize) < r.alphabet.len()) && r.is_reduced(w)
            }
            (Backend::Naturals, Element::Nat(_)) => true,
            (Backend::Powerset(base), Element::Set(s)) => {
                base.len() >= 64 || *s >> base.len() == 0
            }
            (Backend::Table(m), Element::Table(i)) => *i < m.order(),
            (Backend::Product { base, letters }, Element::Product { slots, letters: ls }) => {
                slots.len() == ls.len() + 1
                    && slots.iter().all(|s| base.contains(s))
                    && ls.iter().all(|&l| (l as usize) < letters.len())
            }
            _ => false,
        }
    }

    pub fn check(&self, a: &Element) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::ForeignElement {
                element: format!("{a:?}"),
                backend: self.kind_name().into(),
            })
        }
    }

    /// Checked product.
    pub fn op(&self, x: &Element, y: &Element) -> Result<Element> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.mul(x, y))
    }

    /// Product of members of this backend; membership is the caller's
    /// responsibility.
    pub fn mul(&self, x: &Element, y: &Element) -> Element {
        match (self, x, y) {
            (Backend::Free(_), Element::Word(a), Element::Word(b)) => {
                let mut w = a.clone();
                w.extend_from_slice(b);
                Element::Word(w)
            }
            (Backend::Reduced(r), Element::Word(a), Element::Word(b)) => {
                if let Some((p, q)) = r.bicyclic {
                    let ea = r.exponents_of_word(a, p, q);
                    let eb = r.exponents_of_word(b, p, q);
                    let (m, n) = bicyclic_mul(ea, eb);
                    return Element::Word(bicyclic_word(p, q, m, n));
                }
                let mut w = a.clone();
                w.extend_from_slice(b);
                Element::Word(r.reduce(&w))
            }
            (Backend::Naturals, Element::Nat(a), Element::Nat(b)) => Element::Nat(a + b),
            (Backend::Powerset(_), Element::Set(a), Element::Set(b)) => Element::Set(a | b),
            (Backend::Table(m), Element::Table(a), Element::Table(b)) => {
                Element::Table(m.mul(*a, *b))
            }
            (
                Backend::Product { base, .. },
                Element::Product { slots: sa, letters: la },
                Element::Product { slots: sb, letters: lb },
            ) => {
                let mut slots = sa[..sa.len() - 1].to_vec();
                slots.push(base.mul(&sa[sa.len() - 1], &sb[0]));
                slots.extend_from_slice(&sb[1..]);
                let mut letters = la.clone();
                letters.extend_from_slice(lb);
                Element::Product { slots, letters }
            }
            _ => panic!("mul: {x:?} and {y:?} do not belong to the {} backend", self.kind_name()),
        }
    }

    pub fn mul3(&self, x: &Element, s: &Element, y: &Element) -> Element {
        self.mul(&self.mul(x, s), y)
    }

    /// The size measure used for enumeration bounds.
    pub fn size(&self, a: &Element) -> usize {
        match (self, a) {
            (_, Element::Word(w)) => w.len(),
            (_, Element::Nat(n)) => *n as usize,
            (_, Element::Set(s)) => s.count_ones() as usize,
            (Backend::Table(m), Element::Table(i)) => usize::from(*i != m.identity()),
            (Backend::Product { base, .. }, Element::Product { slots, letters }) => {
                letters.len() + slots.iter().map(|s| base.size(s)).sum::<usize>()
            }
            _ => 0,
        }
    }

    /// An additive weight into the naturals (a monoid homomorphism), when
    /// the backend has a natural one: word length, numeric value, or the
    /// number of fresh letters in a free product.
    pub fn weight(&self, a: &Element) -> Option<u64> {
        match (self, a) {
            (Backend::Free(_), Element::Word(w)) => Some(w.len() as u64),
            (Backend::Naturals, Element::Nat(n)) => Some(*n),
            (Backend::Product { .. }, Element::Product { letters, .. }) => {
                Some(letters.len() as u64)
            }
            _ => None,
        }
    }

    /// All elements for finite carriers; all elements of size at most
    /// `bound` otherwise. Each element appears once, in a canonical order.
    pub fn enumerate(&self, bound: usize) -> Vec<Element> {
        match self {
            Backend::Free(al) => words_up_to(al.len(), bound)
                .into_iter()
                .map(Element::Word)
                .collect(),
            Backend::Reduced(r) => words_up_to(r.alphabet.len(), bound)
                .into_iter()
                .filter(|w| r.is_reduced(w))
                .map(Element::Word)
                .collect(),
            Backend::Naturals => (0..=bound as u64).map(Element::Nat).collect(),
            Backend::Powerset(base) => {
                let mut sets: Vec<u64> = (0..1u64 << base.len()).collect();
                sets.sort_by_key(|s| (s.count_ones(), *s));
                sets.into_iter().map(Element::Set).collect()
            }
            Backend::Table(m) => (0..m.order()).map(Element::Table).collect(),
            Backend::Product { base, letters } => {
                let mut out = Vec::new();
                for n in 0..=bound {
                    for word in words_of_length(letters.len(), n) {
                        let mut slots = Vec::new();
                        product_slots(base, &word, bound - n, &mut slots, &mut out);
                    }
                }
                out.sort_by_key(|e| self.size(e));
                out
            }
        }
    }

    /// Pairs `(x, y)` with `x·s·y = a`.
    pub fn factorizations(&self, a: &Element, s: &Element, budget: usize) -> Factorizations {
        let mut out = Factorizations::default();
        match (self, a, s) {
            (Backend::Free(_), Element::Word(aw), Element::Word(sw)) => {
                if sw.len() <= aw.len() {
                    for i in 0..=aw.len() - sw.len() {
                        if aw[i..].starts_with(sw) {
                            out.pairs.push((
                                Element::Word(aw[..i].to_vec()),
                                Element::Word(aw[i + sw.len()..].to_vec()),
                            ));
                        }
                    }
                }
            }
            (Backend::Naturals, Element::Nat(a), Element::Nat(s)) => {
                if s <= a {
                    let room = a - s;
                    for k in 0..=room {
                        if out.pairs.len() >= budget {
                            out.truncated = true;
                            break;
                        }
                        out.pairs.push((Element::Nat(k), Element::Nat(room - k)));
                    }
                }
            }
            (Backend::Powerset(_), Element::Set(a), Element::Set(_)) => {
                out.pairs = self
                    .left_cofactors(&Element::Set(*a), s)
                    .into_iter()
                    .map(|x| (x, Element::Set(0)))
                    .collect();
            }
            (Backend::Table(m), Element::Table(a), Element::Table(s)) => {
                for x in 0..m.order() {
                    let xs = m.mul(x, *s);
                    for y in 0..m.order() {
                        if m.mul(xs, y) == *a {
                            out.pairs.push((Element::Table(x), Element::Table(y)));
                        }
                    }
                }
            }
            (Backend::Product { .. }, Element::Product { .. }, Element::Product { .. }) => {
                self.product_factorizations(a, s, budget, &mut out);
            }
            (Backend::Reduced(r), Element::Word(_), Element::Word(sw)) => {
                // Unbounded in general; search short cofactors only.
                let limit = self.size(a) + sw.len() + 1;
                let candidates = self.enumerate(limit);
                for x in &candidates {
                    let xs = self.mul(x, s);
                    for y in &candidates {
                        if self.mul(&xs, y) == *a {
                            out.pairs.push((x.clone(), y.clone()));
                        }
                    }
                }
                let _ = r;
                out.truncated = true;
            }
            _ => {}
        }
        if out.pairs.len() > budget {
            out.pairs.truncate(budget);
            out.truncated = true;
        }
        out
    }

    /// Distinct elements `x·t·y` over factorizations `x·s·y = a`, each with
    /// one witnessing pair.
    pub fn rewrites(&self, a: &Element, s: &Element, t: &Element, budget: usize) -> Rewrites {
        if let Backend::Reduced(r) = self {
            return self.reduced_rewrites(r, a, s, t);
        }
        let f = self.factorizations(a, s, budget);
        let mut seen = BTreeSet::new();
        let mut hits = Vec::new();
        for (x, y) in f.pairs {
            let b = self.mul3(&x, t, &y);
            if seen.insert(b.clone()) {
                hits.push((x, y, b));
            }
        }
        Rewrites {
            hits,
            truncated: f.truncated,
        }
    }

    fn reduced_rewrites(&self, r: &Reduced, a: &Element, s: &Element, t: &Element) -> Rewrites {
        let mut seen = BTreeSet::new();
        let mut hits = Vec::new();
        let Some((p, q)) = r.bicyclic else {
            // Generic reduced carriers: short cofactors only, flagged.
            let limit = self.size(a) + 1;
            let candidates = self.enumerate(limit);
            for x in &candidates {
                let xs = self.mul(x, s);
                for y in &candidates {
                    if self.mul(&xs, y) == *a {
                        let b = self.mul3(x, t, y);
                        if seen.insert(b.clone()) {
                            hits.push((x.clone(), y.clone(), b));
                        }
                    }
                }
            }
            return Rewrites {
                hits,
                truncated: true,
            };
        };
        let exps = |e: &Element| match e {
            Element::Word(w) => r.exponents_of_word(w, p, q),
            _ => (0, 0),
        };
        let (am, an) = exps(a);
        let es = exps(s);
        let et = exps(t);
        // The first coordinate of a product dominates that of its left
        // factor and the second that of its right factor, which bounds i
        // and l; pairs with j or k beyond `cap` reproduce results already
        // seen at smaller exponents.
        let cap = am + an + es.0 + es.1 + et.0 + et.1 + 2;
        for i in 0..=am {
            for j in 0..=cap {
                let xs = bicyclic_mul((i, j), es);
                for k in 0..=cap {
                    for l in 0..=an {
                        if bicyclic_mul(xs, (k, l)) != (am, an) {
                            continue;
                        }
                        let (bm, bn) = bicyclic_mul(bicyclic_mul((i, j), et), (k, l));
                        let b = Element::Word(bicyclic_word(p, q, bm, bn));
                        if seen.insert(b.clone()) {
                            hits.push((
                                Element::Word(bicyclic_word(p, q, i, j)),
                                Element::Word(bicyclic_word(p, q, k, l)),
                                b,
                            ));
                        }
                    }
                }
            }
        }
        Rewrites {
            hits,
            truncated: false,
        }
    }

    /// `{x : x·s = a}` for base-capable backends.
    pub fn left_cofactors(&self, a: &Element, s: &Element) -> Vec<Element> {
        match (self, a, s) {
            (Backend::Naturals, Element::Nat(a), Element::Nat(s)) if s <= a => {
                vec![Element::Nat(a - s)]
            }
            (Backend::Powerset(_), Element::Set(a), Element::Set(s)) if s & !a == 0 => {
                let rest = a & !s;
                subsets(*s).into_iter().map(|sub| Element::Set(rest | sub)).collect()
            }
            (Backend::Table(m), Element::Table(a), Element::Table(s)) => (0..m.order())
                .filter(|&x| m.mul(x, *s) == *a)
                .map(Element::Table)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// `{y : s·y = a}` for base-capable backends.
    pub fn right_cofactors(&self, a: &Element, s: &Element) -> Vec<Element> {
        match (self, a, s) {
            (Backend::Table(m), Element::Table(a), Element::Table(s)) => (0..m.order())
                .filter(|&y| m.mul(*s, y) == *a)
                .map(Element::Table)
                .collect(),
            _ => self.left_cofactors(a, s),
        }
    }

    fn product_factorizations(
        &self,
        a: &Element,
        s: &Element,
        budget: usize,
        out: &mut Factorizations,
    ) {
        let Backend::Product { base, .. } = self else { return };
        let (Element::Product { slots: asl, letters: ale }, Element::Product { slots: ssl, letters: sle }) =
            (a, s)
        else {
            return;
        };
        let mut seen = BTreeSet::new();
        let mut push = |x: Element, y: Element, out: &mut Factorizations| {
            if out.pairs.len() >= budget {
                out.truncated = true;
            } else if seen.insert((x.clone(), y.clone())) {
                out.pairs.push((x, y));
            }
        };
        let k = sle.len();
        if k == 0 {
            // s is a base element: it sits inside one slot of a.
            let m = &ssl[0];
            for i in 0..asl.len() {
                let inner = base.factorizations(&asl[i], m, budget);
                out.truncated |= inner.truncated;
                for (xi, yi) in inner.pairs {
                    let mut xs = asl[..i].to_vec();
                    xs.push(xi);
                    let x = Element::Product {
                        slots: xs,
                        letters: ale[..i].to_vec(),
                    };
                    let mut ys = vec![yi];
                    ys.extend_from_slice(&asl[i + 1..]);
                    let y = Element::Product {
                        slots: ys,
                        letters: ale[i..].to_vec(),
                    };
                    push(x, y, out);
                }
            }
            return;
        }
        if k > ale.len() {
            return;
        }
        for i in 0..=ale.len() - k {
            if ale[i..i + k] != sle[..] || asl[i + 1..i + k] != ssl[1..k] {
                continue;
            }
            for xl in base.left_cofactors(&asl[i], &ssl[0]) {
                for yf in base.right_cofactors(&asl[i + k], &ssl[k]) {
                    let mut xs = asl[..i].to_vec();
                    xs.push(xl.clone());
                    let x = Element::Product {
                        slots: xs,
                        letters: ale[..i].to_vec(),
                    };
                    let mut ys = vec![yf];
                    ys.extend_from_slice(&asl[i + k + 1..]);
                    let y = Element::Product {
                        slots: ys,
                        letters: ale[i + k..].to_vec(),
                    };
                    push(x, y, out);
                }
            }
        }
    }

    /// `self * F_fresh`. Free backends just grow their alphabet.
    pub fn adjoin(&self, fresh: &[String]) -> Result<Backend> {
        for name in fresh {
            if name.contains('.') || name.contains('^') || name.contains('_') {
                return Err(Error::usage(format!(
                    "letter `{name}` may not contain `.`, `^` or `_`"
                )));
            }
            if self.letter_collides(name) {
                return Err(Error::usage(format!(
                    "letter `{name}` collides with an element of the {} backend",
                    self.kind_name()
                )));
            }
        }
        match self {
            Backend::Free(al) => Ok(Backend::Free(al.extended(fresh)?)),
            // 1 * F is F itself.
            Backend::Table(m) if m.order() == 1 => Ok(Backend::Free(Alphabet::new(fresh.iter().cloned())?)),
            Backend::Product { base, letters } => Ok(Backend::Product {
                base: base.clone(),
                letters: letters.extended(fresh)?,
            }),
            Backend::Naturals | Backend::Powerset(_) | Backend::Table(_) => {
                if let Backend::Table(m) = self {
                    let bad = |(i, n): (usize, &String)| n.contains('.') || n.contains('^') || (n == "_" && i != m.identity());
                    if m.names().iter().enumerate().any(bad) {
                        return Err(Error::refused(
                            "table names containing `.` or `^`, or a non-identity named `_`, cannot be written as free-product syllables",
                        ));
                    }
                }
                Ok(Backend::Product {
                    base: Arc::new(self.clone()),
                    letters: Alphabet::new(fresh.iter().cloned())?,
                })
            }
            Backend::Reduced(_) => Err(Error::refused(
                "fresh letters cannot be adjoined to a collapsed word carrier",
            )),
        }
    }

    fn letter_collides(&self, name: &str) -> bool {
        match self {
            Backend::Free(al) => al.letter(name).is_some(),
            Backend::Product { base, letters } => {
                letters.letter(name).is_some() || base.parse(name).is_ok()
            }
            other => other.parse(name).is_ok(),
        }
    }

    /// Image of an element of `old` under the inclusion `old ↪ self`, where
    /// `self` was obtained from `old` by [`Backend::adjoin`].
    pub fn embed_from(&self, old: &Backend, a: &Element) -> Result<Element> {
        old.check(a)?;
        let out = match (old, self) {
            (Backend::Free(_), Backend::Free(_)) => a.clone(),
            (Backend::Table(m), Backend::Free(_)) if m.order() == 1 => Element::Word(vec![]),
            (Backend::Product { .. }, Backend::Product { .. }) => a.clone(),
            (_, Backend::Product { base, .. }) if **base == *old => Element::syllable(a.clone()),
            _ if old == self => a.clone(),
            _ => return Err(Error::usage("backend is not an extension of the given one")),
        };
        self.check(&out)?;
        Ok(out)
    }

    pub fn parse(&self, text: &str) -> Result<Element> {
        let text = text.trim();
        let foreign = || Error::ForeignElement {
            element: text.to_string(),
            backend: self.kind_name().into(),
        };
        match self {
            Backend::Free(al) => Ok(Element::Word(al.parse_word(text)?)),
            Backend::Reduced(r) => {
                let w = r.alphabet.parse_word(text)?;
                if r.is_reduced(&w) {
                    Ok(Element::Word(w))
                } else {
                    Err(foreign())
                }
            }
            Backend::Naturals => text.parse::<u64>().map(Element::Nat).map_err(|_| foreign()),
            Backend::Powerset(base) => {
                let inner = text
                    .strip_prefix('{')
                    .and_then(|t| t.strip_suffix('}'))
                    .ok_or_else(foreign)?;
                let mut set = 0u64;
                for atom in inner.split(',').map(str::trim).filter(|a| !a.is_empty()) {
                    let i = base.iter().position(|b| b == atom).ok_or_else(foreign)?;
                    set |= 1 << i;
                }
                Ok(Element::Set(set))
            }
            Backend::Table(m) => m.index_of(text).map(Element::Table).ok_or_else(foreign),
            Backend::Product { base, letters } => {
                let mut acc = self.identity();
                if text == "_" {
                    return Ok(acc);
                }
                for syllable in text.split('.') {
                    let syllable = syllable.trim();
                    let (head, power) = match syllable.rsplit_once('^') {
                        Some((h, p)) => (h, Some(p)),
                        None => (syllable, None),
                    };
                    let piece = if let Some(l) = letters.letter(head) {
                        let n = match power {
                            Some(p) => p.parse::<usize>().map_err(|_| foreign())?,
                            None => 1,
                        };
                        Element::Product {
                            slots: vec![base.identity(); n + 1],
                            letters: vec![l; n],
                        }
                    } else if power.is_none() {
                        Element::syllable(base.parse(syllable)?)
                    } else {
                        return Err(foreign());
                    };
                    acc = self.mul(&acc, &piece);
                }
                Ok(acc)
            }
        }
    }

    pub fn format(&self, a: &Element) -> String {
        match (self, a) {
            (Backend::Free(al), Element::Word(w)) => al.format_word(w),
            (Backend::Reduced(r), Element::Word(w)) => r.alphabet.format_word(w),
            (_, Element::Nat(n)) => n.to_string(),
            (Backend::Powerset(base), Element::Set(s)) => {
                let atoms: Vec<&str> = (0..base.len())
                    .filter(|i| s >> i & 1 == 1)
                    .map(|i| base[i].as_str())
                    .collect();
                format!("{{{}}}", atoms.join(","))
            }
            (Backend::Table(m), Element::Table(i)) => m.name(*i).to_string(),
            (Backend::Product { base, letters }, Element::Product { slots, letters: ls }) => {
                let mut parts: Vec<String> = Vec::new();
                let push_slot = |s: &Element, parts: &mut Vec<String>| {
                    if !base.is_identity(s) {
                        parts.push(base.format(s));
                    }
                };
                push_slot(&slots[0], &mut parts);
                let mut i = 0;
                while i < ls.len() {
                    let mut j = i;
                    while j + 1 < ls.len() && ls[j + 1] == ls[i] && base.is_identity(&slots[j + 1]) {
                        j += 1;
                    }
                    let run = j - i + 1;
                    let name = letters.name(ls[i]);
                    parts.push(if run == 1 {
                        name.to_string()
                    } else {
                        format!("{name}^{run}")
                    });
                    push_slot(&slots[j + 1], &mut parts);
                    i = j + 1;
                }
                if parts.is_empty() {
                    "_".to_string()
                } else {
                    parts.join(".")
                }
            }
            _ => format!("{a:?}"),
        }
    }

    /// The one-letter element for a letter name of a word or free-product
    /// carrier.
    pub fn letter_element(&self, name: &str) -> Result<Element> {
        let found = match self {
            Backend::Free(al) => al.letter(name).map(|l| Element::Word(vec![l])),
            Backend::Reduced(r) => r.alphabet.letter(name).map(|l| Element::Word(vec![l])),
            Backend::Product { base, letters } => letters.letter(name).map(|l| Element::Product {
                slots: vec![base.identity(), base.identity()],
                letters: vec![l],
            }),
            _ => None,
        };
        found.ok_or_else(|| Error::ForeignElement {
            element: name.to_string(),
            backend: self.kind_name().to_string(),
        })
    }

    /// Generators of the carrier as a monoid.
    pub fn generators(&self) -> Vec<Element> {
        match self {
            Backend::Free(al) => al.letters().map(|l| Element::Word(vec![l])).collect(),
            Backend::Reduced(r) => r.alphabet.letters().map(|l| Element::Word(vec![l])).collect(),
            Backend::Naturals => vec![Element::Nat(1)],
            Backend::Powerset(base) => (0..base.len()).map(|i| Element::Set(1 << i)).collect(),
            Backend::Table(m) => m.generating_set().into_iter().map(Element::Table).collect(),
            Backend::Product { base, letters } => {
                let mut gens: Vec<Element> =
                    base.generators().into_iter().map(Element::syllable).collect();
                gens.extend(letters.letters().map(|l| Element::Product {
                    slots: vec![base.identity(), base.identity()],
                    letters: vec![l],
                }));
                gens
            }
        }
    }

    /// Writes `a` as a product of elements of [`Backend::generators`].
    pub fn decompose(&self, a: &Element) -> Option<Vec<Element>> {
        if !self.contains(a) {
            return None;
        }
        match (self, a) {
            (Backend::Free(_) | Backend::Reduced(_), Element::Word(w)) => {
                Some(w.iter().map(|&l| Element::Word(vec![l])).collect())
            }
            (Backend::Naturals, Element::Nat(n)) => Some(vec![Element::Nat(1); *n as usize]),
            (Backend::Powerset(base), Element::Set(s)) => Some(
                (0..base.len())
                    .filter(|i| s >> i & 1 == 1)
                    .map(|i| Element::Set(1 << i))
                    .collect(),
            ),
            (Backend::Table(m), Element::Table(i)) => {
                let gens = m.generating_set();
                let words = m.generator_words(&gens);
                words[*i]
                    .as_ref()
                    .map(|w| w.iter().map(|&g| Element::Table(gens[g])).collect())
            }
            (Backend::Product { base, .. }, Element::Product { slots, letters }) => {
                let mut out = Vec::new();
                for (i, slot) in slots.iter().enumerate() {
                    out.extend(base.decompose(slot)?.into_iter().map(Element::syllable));
                    if let Some(&l) = letters.get(i) {
                        out.push(Element::Product {
                            slots: vec![base.identity(), base.identity()],
                            letters: vec![l],
                        });
                    }
                }
                Some(out)
            }
            _ => None,
        }
    }

    pub fn product_of(&self, parts: &[Element]) -> Element {
        parts.iter().fold(self.identity(), |acc, p| self.mul(&acc, p))
    }
}

fn subsets(mask: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut sub = mask;
    loop {
        out.push(sub);
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & mask;
    }
    out.reverse();
    out
}

fn words_of_length(letters: usize, n: usize) -> Vec<Vec<Letter>> {
    let mut words = vec![Vec::new()];
    for _ in 0..n {
        words = words
            .into_iter()
            .flat_map(|w| {
                (0..letters as Letter).map(move |l| {
                    let mut w = w.clone();
                    w.push(l);
                    w
                })
            })
            .collect();
    }
    words
}

fn words_up_to(letters: usize, bound: usize) -> Vec<Vec<Letter>> {
    let mut out = Vec::new();
    for n in 0..=bound {
        let words = words_of_length(letters, n);
        if letters == 0 && n > 0 {
            break;
        }
        out.extend(words);
    }
    out
}

/// Fills the `word.len() + 1` slots of a product element with base elements
/// whose sizes sum to at most `budget`.
fn product_slots(
    base: &Backend,
    word: &[Letter],
    budget: usize,
    slots: &mut Vec<Element>,
    out: &mut Vec<Element>,
) {
    let position = slots.len();
    if position == word.len() + 1 {
        out.push(Element::Product {
            slots: slots.clone(),
            letters: word.to_vec(),
        });
        return;
    }
    for candidate in base.enumerate(budget) {
        let size = base.size(&candidate);
        if size > budget {
            continue;
        }
        slots.push(candidate);
        product_slots(base, word, budget - size, slots, out);
        slots.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_factorizations(b: &Backend, a: &Element, s: &Element, bound: usize) -> BTreeSet<(Element, Element)> {
        let all = b.enumerate(bound);
        let mut out = BTreeSet::new();
        for x in &all {
            for y in &all {
                if b.mul3(x, s, y) == *a {
                    out.insert((x.clone(), y.clone()));
                }
            }
        }
        out
    }

    #[test]
    fn naturals_factorizations_and_enumeration() {
        let n = Backend::Naturals;
        let f = n.factorizations(&Element::Nat(5), &Element::Nat(2), DEFAULT_FACTOR_BUDGET);
        let expected: Vec<_> = (0..=3).map(|k| (Element::Nat(k), Element::Nat(3 - k))).collect();
        assert_eq!(f.pairs, expected);
        assert!(!f.truncated);
        assert_eq!(n.enumerate(3).len(), 4);
        let small = n.factorizations(&Element::Nat(50), &Element::Nat(0), 10);
        assert!(small.truncated);
        assert_eq!(small.pairs.len(), 10);
    }

    #[test]
    fn free_factorizations_and_enumeration() {
        let f = Backend::free(["a", "b"]).unwrap();
        let aabb = f.parse("aabb").unwrap();
        let ab = f.parse("ab").unwrap();
        let pairs = f.factorizations(&aabb, &ab, DEFAULT_FACTOR_BUDGET).pairs;
        assert_eq!(pairs, vec![(f.parse("a").unwrap(), f.parse("b").unwrap())]);
        assert_eq!(f.enumerate(2).len(), 7);
        assert_eq!(f.format(&f.mul(&ab, &f.parse("ba").unwrap())), "abba");
    }

    #[test]
    fn powerset_literals_and_one_sided_factorizations() {
        let p = Backend::powerset(["a", "b", "c"]).unwrap();
        assert_eq!(p.enumerate(0).len(), 8);
        let a = p.parse("{a}").unwrap();
        let ac = p.parse("{a,c}").unwrap();
        assert_eq!(p.format(&p.mul(&a, &ac)), "{a,c}");
        let f = p.factorizations(&ac, &a, DEFAULT_FACTOR_BUDGET);
        let xs: BTreeSet<String> = f.pairs.iter().map(|(x, _)| p.format(x)).collect();
        assert_eq!(xs, BTreeSet::from(["{c}".to_string(), "{a,c}".to_string()]));
        assert!(p.factorizations(&a, &ac, 100).pairs.is_empty());
    }

    #[test]
    fn table_factorizations_match_brute_force() {
        let t = Backend::table(FiniteMonoid::cyclic(3));
        for a in t.enumerate(0) {
            for s in t.enumerate(0) {
                let got: BTreeSet<_> =
                    t.factorizations(&a, &s, DEFAULT_FACTOR_BUDGET).pairs.into_iter().collect();
                assert_eq!(got, brute_factorizations(&t, &a, &s, 0));
            }
        }
    }

    #[test]
    fn product_normal_form_and_literals() {
        let p = Backend::Naturals.adjoin(&["v".to_string()]).unwrap();
        let two = p.parse("2").unwrap();
        let v3 = p.parse("v.3").unwrap();
        assert_eq!(p.format(&p.mul(&two, &v3)), "2.v.3");
        assert_eq!(p.format(&p.parse("v.v.1.1").unwrap()), "v^2.2");
        assert_eq!(p.format(&p.identity()), "_");
        assert!(Backend::Naturals.adjoin(&["7".to_string()]).is_err());
        let twice = p.adjoin(&["v".to_string()]);
        assert!(twice.is_err());
    }

    #[test]
    fn product_factorizations_match_brute_force() {
        let base = Backend::table(FiniteMonoid::cyclic(2));
        let p = base.adjoin(&["u".to_string()]).unwrap();
        let elems = p.enumerate(3);
        for a in elems.iter().filter(|e| p.size(e) <= 2) {
            for s in elems.iter().filter(|e| p.size(e) <= 2) {
                let got: BTreeSet<_> =
                    p.factorizations(a, s, DEFAULT_FACTOR_BUDGET).pairs.into_iter().collect();
                let brute = brute_factorizations(&p, a, s, 3);
                // every pair found is genuine, and every short pair is found
                for pair in &got {
                    assert_eq!(p.mul3(&pair.0, s, &pair.1), *a);
                }
                for pair in &brute {
                    assert!(got.contains(pair), "missing {pair:?} for {a:?} around {s:?}");
                }
            }
        }
    }

    #[test]
    fn bicyclic_rewrites_stable_under_larger_cap() {
        let r = Reduced::new(Alphabet::new(["a", "b"]).unwrap(), vec![(vec![0, 1], vec![])]);
        let b = Backend::Reduced(Arc::new(r));
        let ba = b.parse("ba").unwrap();
        let eps = b.identity();
        let elems = b.enumerate(4);
        for a in &elems {
            let got = b.rewrites(a, &ba, &eps, DEFAULT_FACTOR_BUDGET);
            let results: BTreeSet<_> = got.hits.iter().map(|h| h.2.clone()).collect();
            // brute force with generous cofactor lengths
            let wide = b.enumerate(b.size(a) + 6);
            let mut brute = BTreeSet::new();
            for x in &wide {
                for y in &wide {
                    if b.mul3(x, &ba, y) == *a {
                        brute.insert(b.mul3(x, &eps, y));
                    }
                }
            }
            assert_eq!(results, brute, "at {}", b.format(a));
        }
    }

    #[test]
    fn decompose_round_trips() {
        let backends = vec![
            Backend::free(["a", "b"]).unwrap(),
            Backend::Naturals,
            Backend::powerset(["a", "b"]).unwrap(),
            Backend::table(FiniteMonoid::cyclic(4)),
            Backend::table(FiniteMonoid::cyclic(2)).adjoin(&["u".to_string()]).unwrap(),
        ];
        for b in backends {
            for a in b.enumerate(3) {
                let parts = b.decompose(&a).unwrap();
                assert_eq!(b.product_of(&parts), a);
                assert_eq!(b.parse(&b.format(&a)).unwrap(), a, "{}", b.format(&a));
            }
        }
    }
}
