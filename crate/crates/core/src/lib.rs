//! Monoidal rewriting systems over arbitrary ambient monoids.
//!
//! A system is a monoid together with a set of rules `(s, t)`; an element
//! `a = x·s·y` rewrites to `x·t·y`. On top of the engine sit the monoid of
//! irreducibles, the canonical presentation of a finite monoid, the four
//! Tietze-style moves and a pipeline producing certified move scripts
//! between presentations of the same monoid.

pub mod backend;
pub mod check;
pub mod error;
pub mod format;
pub mod generators;
pub mod gett;
pub mod irreducibles;
pub mod pipeline;
pub mod presentation;
pub mod rewrite;
pub mod table;
pub mod trace;
pub mod verdict;

pub use backend::{Alphabet, Backend, Element, Factorizations, Letter, Reduced, Rewrites};
pub use check::{check_confluent, check_noetherian};
pub use error::{Error, Result};
pub use rewrite::{Budget, CertifiedMrs, Mrs, OneStep, Rule};
pub use table::{FiniteMonoid, TableHom};
pub use trace::{Direction, Step, Trace};
pub use verdict::{CheckVerdict, Coverage, Search, Witness};
