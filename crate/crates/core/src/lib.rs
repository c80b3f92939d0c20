//! Exact generalized mirror transformations for toric complete intersections.

pub mod algebra;
pub mod bigrecon;
pub mod birkhoff;
pub mod connection;
pub mod encoding;
pub mod error;
pub mod geometry;
pub mod ifunction;
pub mod laurent;
pub mod matrix;
pub mod mirrormap;
pub mod novikov;
pub mod pipeline;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{ExactScalar, Rational, Scalar};

/// `ℚ[λ][ħ, ħ⁻¹]`.
pub type CoeffScalar = laurent::Laurent<Rational>;
/// Square matrix over [`CoeffScalar`].
pub type CoeffMatrix = matrix::Matrix<Rational>;
/// Column vector over [`CoeffScalar`].
pub type CoeffVector = matrix::Vector<Rational>;
/// Novikov series of [`CoeffMatrix`].
pub type MatrixSeries = novikov::NovikovSeries<CoeffMatrix>;
