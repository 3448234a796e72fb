//! The normalised t-T correction field ψ_{t,T}: a unit-variance Gaussian
//! field indexed by current time t and maturity T whose correlation is a
//! ratio of kernel-difference integrals.

mod correlation;
mod grid;
mod increments;
mod integral;

pub use correlation::{
    corr_fixed_maturity, corr_fixed_time, corr_fixed_ttm, corr_fixed_ttm_tail, cphi, delta_fixed_maturity,
    delta_fixed_time, delta_maturities,
};
pub use grid::{sample_field, FieldSamples, TTCovarianceGrid};
pub use increments::{increment_scalings, unnormalized_covariance, IncrementScalings};
pub use integral::kernel_difference_integral;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FieldError {
    #[error("zero or negative time to maturity: (t, T) = ({t}, {maturity}), (t', T') = ({t2}, {maturity2})")]
    Degenerate { t: f64, maturity: f64, t2: f64, maturity2: f64 },
    #[error("relative separation {0} outside (-1, 1)")]
    OutOfDomain(f64),
    #[error("covariance not positive semidefinite after jitter {jitter:e}; smallest eigenvalue {min_eigenvalue:e}")]
    NotPositiveDefinite { jitter: f64, min_eigenvalue: f64 },
    #[error("invalid field input: {0}")]
    Invalid(String),
}
