//! Numerical Voronoi-summation machinery over number fields.
//!
//! The crate provides exact arithmetic in small number fields, Fourier
//! coefficient providers (Ramanujan tau and its symmetric-square lift),
//! Bessel kernels evaluated by Mellin-Barnes contour integrals, Hankel
//! transforms of compactly supported test functions, Kloosterman sums,
//! both sides of the classical GL(2)/GL(3) Voronoi summation formula,
//! and additively twisted coefficient sums with empirical exponent fits.

pub mod bessel;
pub mod coeffs;
pub mod hankel;
pub mod kloosterman;
pub mod numberfield;
pub mod quad;
pub mod voronoi;
pub mod special;
pub mod twistsums;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
