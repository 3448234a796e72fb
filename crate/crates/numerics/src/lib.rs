//! Numerical building blocks for the fracvol workspace.
//!
//! Gauss–Legendre and Gauss–Hermite rules, an adaptive Gauss–Kronrod
//! integrator, thin wrappers over `libm` special functions, and the
//! handful of statistics (regression, Anderson–Darling) used by the
//! validation studies.

pub mod quad;
pub mod special;
pub mod stats;

pub use quad::{adaptive, adaptive_semi_infinite, GaussHermite, GaussLegendre, QuadError};
