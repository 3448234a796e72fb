//! Monte Carlo pricing under the full model dX = F(Z^ε)X dW*, conditional
//! on a stored factor history, with convergence and moment studies.

mod config;
mod moments;
mod simulate;
mod study;

pub use config::{MCConfig, Scheme, MIN_PATHS, MIN_STEPS_WARNING};
pub use moments::{
    fourth_moments, moment_study, phi_statistics, FourthMomentRung, MomentReport, PhiCovariance, PhiVariance,
};
pub use simulate::{mc_price, mc_price_on, Forward, McEstimate};
pub use study::{
    convergence_study, history_cells_for_ladder, ConvergenceReport, LadderMarket, Rung, SlopeFit, Verdict,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum McError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Sampler(#[from] fou_sampler::SamplerError),
    #[error(transparent)]
    Pricer(#[from] asymptotic_pricer::PricerError),
    #[error(transparent)]
    Model(#[from] fou_core::ModelError),
    #[error(transparent)]
    Field(#[from] tt_field::FieldError),
    #[error(transparent)]
    Quadrature(#[from] fracvol_numerics::QuadError),
}
