//! First-order corrected European option prices when the volatility is a
//! function of a fast, long-memory fOU factor.
//!
//! The price is the Black–Scholes value at the effective volatility σ̄
//! plus two terms of order ε^{1−H}: a random one driven by the observed
//! factor history through φ, and a deterministic skew term proportional to
//! the leverage correlation ρ.

pub mod bs;
mod payoff;
mod phi;
mod price;
mod skew;

pub use bs::{bs_call, bs_put, call_greeks, put_greeks, Greeks};
pub use payoff::{OptionSpec, Payoff};
pub use phi::{graded_edges, graded_nodes, phi_correction, PhiIntegrator};
pub use price::{
    corrected_price, corrected_price_with, decompose, normalized_correction, MarketState, NormalizedCorrection,
    PriceDecomposition, DUAL_FORM_TOLERANCE,
};
pub use skew::{phi_linear_variance, ConstantsConvention, SkewConstants};

use fou_sampler::SamplerError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PricerError {
    #[error("invalid pricing input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error("raw and normalised corrections disagree: {raw:e} vs {normalized:e}")]
    DualFormMismatch { raw: f64, normalized: f64 },
}
