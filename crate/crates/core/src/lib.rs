//! Symbolic computation in the automorphism group of a free group.
//!
//! Words, endomorphisms given by basis images, the standard generators,
//! Nielsen reduction, integer and mod-`m` abelianization, finite subgroup
//! enumeration, and a catalog of checked relations between generators.

pub mod cli;
pub mod endo;
pub mod error;
pub mod expr;
pub mod finite;
pub mod generators;
pub mod matrix;
pub mod nielsen;
pub mod suite;
pub mod word;

pub use endo::Endo;
pub use error::{Error, Result};
pub use expr::{GenExpr, Orientation};
pub use generators::{Perm, Special};
pub use matrix::{IntMatrix, ModMatrix};
pub use word::{Letter, Word};
