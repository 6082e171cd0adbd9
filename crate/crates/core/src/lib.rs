//! Exact computer algebra for the orbifold algebraic index theorem.

pub mod cocycle;
pub mod crossed;
pub mod error;
pub mod expr;
pub mod homology;
pub mod index;
pub mod lie;
pub mod linalg;
pub mod sample;
pub mod scalar;
pub mod symplectic;
pub mod weyl;

pub use error::{Error, ErrorKind, Result};
pub use scalar::{rat, rat_int, CycloScalar, HbarSeries, Rational, TruncSeries};
