//! Colored-graph algebra toolkit.
//!
//! The crate turns straight-line graph-build instructions (words of
//! AddVertex/Recolor steps) into tree-shaped decompositions whose width is
//! bounded independently of the word length. The machinery behind that —
//! a derivation semigroup with a finite abstraction, factorization forests
//! of bounded depth over it, and block-order decision procedures on flipped
//! graphs — is exposed module by module, together with bottom-up term
//! automata that recognize graph properties directly on decompositions.

pub mod abstraction;
pub mod derivation;
pub mod error;
pub mod forest;
pub mod gen;
pub mod graph;
pub mod decompose;
pub mod orderlab;
pub mod powergen;
pub mod semigroup;
pub mod term;
pub mod word;

pub use error::{Error, Result};
