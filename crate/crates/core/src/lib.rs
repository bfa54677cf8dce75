//! Exact analysis of plane curve germs: Newton–Puiseux expansion over
//! dynamically built number fields, topological invariants and Kuo–Lu trees.

pub mod arith;
pub mod error;
pub mod factor;
pub mod numfield;
pub mod parse;
pub mod poly;
pub mod invariants;
pub mod puiseux;
pub mod tree;

pub use arith::{Field, Gaussian, Rational, Ring};
pub use error::{GermError, Result};

/// Coefficient field of input germs.
pub type Scalar = Gaussian;
/// Germ polynomial over [`Scalar`].
pub type BiPoly = poly::Bivariate<Scalar>;
