//! Symbolic computation with finitely presented Lawvere theories.

pub mod backend;
pub mod catalogue;
pub mod dsl;
pub mod error;
pub mod group;
pub mod kronecker;
pub mod kzero;
pub mod linearization;
pub mod models;
pub mod multicat;
pub mod ncpoly;
pub mod rewrite;
pub mod term;
pub mod theory;

pub use error::{Error, Result};
pub use term::{Equation, Op, Presentation, Signature, Term};
