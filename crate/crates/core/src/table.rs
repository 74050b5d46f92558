//! Finite monoids given by an explicit multiplication table, together with
//! table homomorphisms and the brute-force searches (isomorphism, hom-set
//! enumeration, small-order monoid enumeration) used by the functor checks.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Characters that may not appear in a table element name.
const RESERVED: &[char] = &['*', '=', ';', '|', '#'];

/// A finite monoid: named elements, a distinguished identity and a full
/// multiplication table. Construction checks closure, the unit laws and
/// associativity exhaustively.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteMonoid {
    names: Vec<String>,
    identity: usize,
    products: Vec<usize>,
    index: HashMap<String, usize>,
}

impl FiniteMonoid {
    pub fn new(names: Vec<String>, identity: usize, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidTable("a monoid needs at least one element".into()));
        }
        if identity >= n {
            return Err(Error::InvalidTable("identity is not a declared element".into()));
        }
        let mut index = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            validate_name(name)?;
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidTable(format!("element `{name}` declared twice")));
            }
        }
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidTable(format!("table must be {n}x{n}")));
        }
        let mut products = Vec::with_capacity(n * n);
        for row in &table {
            for &entry in row {
                if entry >= n {
                    return Err(Error::InvalidTable(format!("entry {entry} is not a declared element")));
                }
                products.push(entry);
            }
        }
        let monoid = FiniteMonoid {
            names,
            identity,
            products,
            index,
        };
        monoid.check_laws()?;
        Ok(monoid)
    }

    /// Builds a table by evaluating `mul` on every pair of indices.
    pub fn from_fn(
        names: Vec<String>,
        identity: usize,
        mul: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let n = names.len();
        let table = (0..n).map(|a| (0..n).map(|b| mul(a, b)).collect()).collect();
        FiniteMonoid::new(names, identity, table)
    }

    /// The additive group Z/nZ with elements named `0`..`n-1`.
    pub fn cyclic(n: usize) -> Self {
        let names = (0..n).map(|i| i.to_string()).collect();
        FiniteMonoid::from_fn(names, 0, |a, b| (a + b) % n).expect("cyclic group table is valid")
    }

    pub fn trivial() -> Self {
        FiniteMonoid::from_fn(vec!["1".to_string()], 0, |_, _| 0).expect("trivial monoid is valid")
    }

    fn check_laws(&self) -> Result<()> {
        let n = self.order();
        let e = self.identity;
        for x in 0..n {
            if self.mul(e, x) != x || self.mul(x, e) != x {
                return Err(Error::InvalidTable(format!(
                    "`{}` is not a two-sided unit for `{}`",
                    self.names[e], self.names[x]
                )));
            }
        }
        for x in 0..n {
            for y in 0..n {
                let xy = self.mul(x, y);
                for z in 0..n {
                    if self.mul(xy, z) != self.mul(x, self.mul(y, z)) {
                        return Err(Error::InvalidTable(format!(
                            "not associative on ({}, {}, {})",
                            self.names[x], self.names[y], self.names[z]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.products[a * self.order() + b]
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Non-identity elements in declaration order.
    pub fn non_identity(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.order()).filter(move |&a| a != self.identity)
    }

    /// Same table with new element names.
    pub fn renamed(&self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.order() {
            return Err(Error::usage("renaming must cover every element"));
        }
        FiniteMonoid::from_fn(names, self.identity, |a, b| self.mul(a, b))
    }

    /// A greedy generating set: non-identity elements not already produced
    /// by the previously chosen generators.
    pub fn generating_set(&self) -> Vec<usize> {
        let mut reached = vec![false; self.order()];
        reached[self.identity] = true;
        let mut gens = Vec::new();
        for a in self.non_identity() {
            if !reached[a] {
                gens.push(a);
                self.close(&gens, &mut reached);
            }
        }
        gens
    }

    fn close(&self, gens: &[usize], reached: &mut [bool]) {
        let mut queue: VecDeque<usize> = (0..self.order()).filter(|&a| reached[a]).collect();
        while let Some(a) = queue.pop_front() {
            for &g in gens {
                let b = self.mul(a, g);
                if !reached[b] {
                    reached[b] = true;
                    queue.push_back(b);
                }
            }
        }
    }

    /// Expresses every element as a product of `gens`, returning for each
    /// element a word over generator positions (None when unreachable).
    pub fn generator_words(&self, gens: &[usize]) -> Vec<Option<Vec<usize>>> {
        let mut words: Vec<Option<Vec<usize>>> = vec![None; self.order()];
        words[self.identity] = Some(Vec::new());
        let mut queue = VecDeque::from([self.identity]);
        while let Some(a) = queue.pop_front() {
            for (pos, &g) in gens.iter().enumerate() {
                let b = self.mul(a, g);
                if words[b].is_none() {
                    let mut w = words[a].clone().unwrap_or_default();
                    w.push(pos);
                    words[b] = Some(w);
                    queue.push_back(b);
                }
            }
        }
        words
    }
}

fn validate_name(name: &str) -> Result<()> {
    if name.is_empty() || name.chars().any(|c| c.is_whitespace() || RESERVED.contains(&c)) || name.contains("->") {
        return Err(Error::InvalidTable(format!("`{name}` is not a valid element name")));
    }
    Ok(())
}

impl fmt::Debug for FiniteMonoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteMonoid[{}; 1={}]", self.names.join(" "), self.names[self.identity])
    }
}

/// A map between finite monoids, stored as the image of every element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableHom {
    pub source: Arc<FiniteMonoid>,
    pub target: Arc<FiniteMonoid>,
    pub map: Vec<usize>,
}

impl TableHom {
    pub fn new(source: Arc<FiniteMonoid>, target: Arc<FiniteMonoid>, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.order() || map.iter().any(|&m| m >= target.order()) {
            return Err(Error::usage("map must send every source element to a target element"));
        }
        Ok(TableHom { source, target, map })
    }

    pub fn identity(monoid: Arc<FiniteMonoid>) -> Self {
        let map = (0..monoid.order()).collect();
        TableHom {
            source: monoid.clone(),
            target: monoid,
            map,
        }
    }

    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    /// The first pair violating the homomorphism law, if any; a broken unit
    /// is reported as the pair (identity, identity).
    pub fn law_violation(&self) -> Option<(usize, usize)> {
        let s = &self.source;
        let t = &self.target;
        if self.map[s.identity()] != t.identity() {
            return Some((s.identity(), s.identity()));
        }
        for a in 0..s.order() {
            for b in 0..s.order() {
                if self.map[s.mul(a, b)] != t.mul(self.map[a], self.map[b]) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn is_homomorphism(&self) -> bool {
        self.law_violation().is_none()
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &TableHom) -> Result<TableHom> {
        if *self.target != *next.source {
            return Err(Error::usage("maps are not composable"));
        }
        let map = self.map.iter().map(|&a| next.map[a]).collect();
        Ok(TableHom {
            source: self.source.clone(),
            target: next.target.clone(),
            map,
        })
    }
}

/// All monoid homomorphisms `source → target`, by brute force over the
/// images of a generating set of `source`.
pub fn homomorphisms(source: &FiniteMonoid, target: &FiniteMonoid) -> Vec<Vec<usize>> {
    let gens = source.generating_set();
    let words = source.generator_words(&gens);
    let mut found = Vec::new();
    let mut images = vec![0usize; gens.len()];
    loop {
        if let Some(map) = extend(source, target, &words, &images) {
            found.push(map);
        }
        if !advance(&mut images, target.order()) {
            break;
        }
    }
    found
}

fn extend(
    source: &FiniteMonoid,
    target: &FiniteMonoid,
    words: &[Option<Vec<usize>>],
    images: &[usize],
) -> Option<Vec<usize>> {
    let map: Vec<usize> = words
        .iter()
        .map(|w| {
            w.as_ref()
                .expect("generating set reaches every element")
                .iter()
                .fold(target.identity(), |acc, &g| target.mul(acc, images[g]))
        })
        .collect();
    let hom = (0..source.order()).all(|a| {
        (0..source.order()).all(|b| map[source.mul(a, b)] == target.mul(map[a], map[b]))
    });
    hom.then_some(map)
}

fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// An isomorphism `a → b` if one exists.
pub fn find_isomorphism(a: &FiniteMonoid, b: &FiniteMonoid) -> Option<Vec<usize>> {
    if a.order() != b.order() {
        return None;
    }
    homomorphisms(a, b).into_iter().find(|map| {
        let mut seen = vec![false; b.order()];
        map.iter().all(|&m| !std::mem::replace(&mut seen[m], true))
    })
}

pub fn isomorphic(a: &FiniteMonoid, b: &FiniteMonoid) -> bool {
    find_isomorphism(a, b).is_some()
}

/// Every monoid table on the elements `0..order` with identity `0`
/// (labelled tables, not isomorphism classes).
pub fn enumerate_monoids(order: usize) -> Vec<FiniteMonoid> {
    if order == 0 {
        return Vec::new();
    }
    let names: Vec<String> = (0..order).map(|i| format!("m{i}")).collect();
    let free_cells: Vec<(usize, usize)> = (1..order)
        .flat_map(|a| (1..order).map(move |b| (a, b)))
        .collect();
    let mut digits = vec![0usize; free_cells.len()];
    let mut out = Vec::new();
    loop {
        let mut table = vec![vec![0usize; order]; order];
        for (x, row) in table.iter_mut().enumerate() {
            for (y, cell) in row.iter_mut().enumerate() {
                *cell = if x == 0 { y } else if y == 0 { x } else { 0 };
            }
        }
        for (&(x, y), &d) in free_cells.iter().zip(&digits) {
            table[x][y] = d;
        }
        if let Ok(m) = FiniteMonoid::new(names.clone(), 0, table) {
            out.push(m);
        }
        if !advance(&mut digits, order) {
            break;
        }
    }
    out
}
