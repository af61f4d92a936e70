//! Exact and numeric machinery for the Kannappan-cosine equation
//! `g(xyz₀) = g(x)g(y) − f(x)f(y)` on finite semigroups and on a window of
//! the additive naturals.
//!
//! The crate is `no_std` + `alloc`; file formats and the command line live
//! in the companion `kannappan-cli` crate.

#![no_std]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod characters;
pub mod corpus;
pub mod cyclotomic;
pub mod linalg;
pub mod oracle;
pub mod scalar;
pub mod semigroup;
pub mod solutions;
pub mod tol;

pub use characters::{CharacterError, CharacterFunction};
pub use cyclotomic::Cyclotomic;
pub use oracle::{CoverageReport, OracleError};
pub use scalar::{Scalar, Table};
pub use semigroup::{DomainKind, ElementSubset, SemigroupDomain, SemigroupError};
pub use solutions::{FamilySpec, SolutionPair};
pub use tol::Tolerance;
