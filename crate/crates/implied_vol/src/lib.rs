//! Implied volatility: Black–Scholes inversion and the first-order
//! expansion I = σ̄(1 + δI) with its maturity asymptotes.

mod expansion;
mod invert;

pub use expansion::{
    iv_asymptotes, iv_expansion, iv_from_phi, iv_mixing_limit, matched_mixing_coefficient, relative_iv_correction,
    Asymptotes, IvExpansion, IvPoint, VALIDITY_LIMIT,
};
pub use invert::{invert_bs, invert_bs_put, PRICE_TOLERANCE};

use asymptotic_pricer::PricerError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IvError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("price {price} outside the no-arbitrage band ({lower}, {upper})")]
    NoArbitrage { price: f64, lower: f64, upper: f64 },
    #[error("inversion did not converge: σ = {sigma}, residual {residual:e}")]
    NotConverged { sigma: f64, residual: f64 },
    #[error(transparent)]
    Pricer(#[from] PricerError),
}
