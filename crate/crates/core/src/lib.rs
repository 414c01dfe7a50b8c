//! Apolarity toolkit: graded forms over exact and floating fields, perp
//! spaces, point schemes, Gröbner bases and Betti tables, zero-dimensional
//! solving, intersection numbers on symmetric products of elliptic curves,
//! and constructions of polar polyhedra.

pub mod apolarity;
pub mod betti;
pub mod cohomology;
pub mod constructions;
pub mod error;
pub mod field;
pub mod groebner;
pub mod json;
pub mod linalg;
pub mod monomial;
pub mod points;
pub mod poly;
pub mod random;
pub mod solve;

pub use error::{Error, Result};
pub use field::{ComplexDouble, Field, FieldTag, PrimeField, Rationals};
pub use linalg::{Matrix, Subspace};
pub use monomial::Monomial;
pub use poly::{GradedForm, Poly, Side};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
