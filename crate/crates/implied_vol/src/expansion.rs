//! The relative implied-volatility correction δI with I = σ̄(1 + δI).

use crate::IvError;
use asymptotic_pricer::{phi_correction, ConstantsConvention, MarketState, OptionSpec, SkewConstants};
use fou_core::HurstModel;
use serde::Serialize;
use vol_model::VolFunction;

/// Points with |δI| above this are outside the regime of the expansion.
pub const VALIDITY_LIMIT: f64 = 0.5;

/// One point of the implied-volatility surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IvPoint {
    pub tau_rel: f64,
    pub log_moneyness: f64,
    pub iv_total: f64,
    pub delta_iv_random: f64,
    pub delta_iv_skew: f64,
    /// False where |δI| exceeds [`VALIDITY_LIMIT`]; such points are reported, not clamped.
    pub valid: bool,
}

impl IvPoint {
    pub fn delta_iv(&self) -> f64 {
        self.delta_iv_random + self.delta_iv_skew
    }
}

/// δI split into its random and skew parts, in relative maturity τ/τ̄ > 0.
pub fn relative_iv_correction(tau_rel: f64, log_moneyness: f64, h: f64, a_f: f64, phi: f64) -> (f64, f64) {
    let random = 0.5 * phi / tau_rel;
    let skew = a_f * (tau_rel.powf(h - 0.5) + tau_rel.powf(h - 1.5) * log_moneyness);
    (random, skew)
}

/// The expansion together with its forward-volatility repackaging.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IvExpansion {
    pub point: IvPoint,
    pub phi: f64,
    /// E[(1/τ)∫_t^T σ_s² ds | F_t]^{1/2} = (σ̄² + 2φ/τ)^{1/2}.
    pub forward_rms: f64,
    /// forward_rms + σ̄·(skew part of δI).
    pub iv_repackaged: f64,
}

/// Expansion for a given φ and constants, at time to maturity τ > 0.
pub fn iv_from_phi(constants: &SkewConstants, tau: f64, log_moneyness: f64, phi: f64) -> Result<IvExpansion, IvError> {
    if !(tau > 0.0) {
        return Err(IvError::Invalid(format!("the expansion is singular at zero time to maturity, got τ = {tau}")));
    }
    let tau_rel = tau / constants.tau_bar;
    let (random, skew) = relative_iv_correction(tau_rel, log_moneyness, constants.h, constants.a_f, phi);
    let sigma_bar = constants.sigma_bar;
    let forward_sq = sigma_bar * sigma_bar + 2.0 * phi / tau;
    let forward_rms = forward_sq.max(0.0).sqrt();
    Ok(IvExpansion {
        point: IvPoint {
            tau_rel,
            log_moneyness,
            iv_total: sigma_bar * (1.0 + random + skew),
            delta_iv_random: random,
            delta_iv_skew: skew,
            valid: (random + skew).abs() <= VALIDITY_LIMIT,
        },
        phi,
        forward_rms,
        iv_repackaged: forward_rms + sigma_bar * skew,
    })
}

/// Expansion at the state's time for the option's strike and maturity.
pub fn iv_expansion(
    state: &MarketState,
    option: &OptionSpec,
    f: &VolFunction,
    model: &HurstModel,
) -> Result<IvExpansion, IvError> {
    state.validate()?;
    option.validate()?;
    let tau = option.maturity - state.t;
    if !(tau > 0.0) {
        return Err(IvError::Invalid(format!("the expansion is singular at zero time to maturity, got τ = {tau}")));
    }
    let constants = SkewConstants::new(f, model, state.rho, ConstantsConvention::default());
    let phi = phi_correction(state.path, state.t, option.maturity, f, fou_sampler::DEFAULT_TOLERANCE)?;
    iv_from_phi(&constants, tau, (option.strike / state.x).ln(), phi)
}

/// Short- and long-maturity asymptotes of the skew part of δI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Asymptotes {
    /// a_F (τ/τ̄)^{H−3/2} log(K/X), dominant for τ ≪ τ̄ away from the money.
    pub short: f64,
    /// a_F (τ/τ̄)^{H−1/2}.
    pub long: f64,
}

pub fn iv_asymptotes(h: f64, a_f: f64, tau_rel: f64, log_moneyness: f64) -> Asymptotes {
    Asymptotes { short: a_f * tau_rel.powf(h - 1.5) * log_moneyness, long: a_f * tau_rel.powf(h - 0.5) }
}

/// Implied volatility of the mixing (ordinary OU) case,
/// σ̄ − V3[1/(2σ̄) + log(K/X)/(σ̄³τ)].
pub fn iv_mixing_limit(v3: f64, sigma_bar: f64, tau: f64, log_moneyness: f64) -> f64 {
    sigma_bar - v3 * (0.5 / sigma_bar + log_moneyness / (sigma_bar.powi(3) * tau))
}

/// V3 that makes the mixing formula match the H → 1/2 form of the expansion.
pub fn matched_mixing_coefficient(sigma_bar: f64, a_f: f64) -> f64 {
    -2.0 * sigma_bar * sigma_bar * a_f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn at_the_money_has_no_log_term() {
        let (r, s) = relative_iv_correction(0.3, 0.0, 0.6, 0.1, 0.02);
        assert!((r - 0.02 / 0.6).abs() < 1e-15);
        assert!((s - 0.1 * 0.3f64.powf(0.1)).abs() < 1e-15);
    }

    #[test]
    fn caption_parameters_at_unit_maturity() {
        let (r, s) = relative_iv_correction(1.0, 0.0, 0.6, 0.1, 0.0);
        assert_eq!(r + s, 0.1);
    }

    #[test]
    fn mixing_limit_structure() {
        assert_eq!(iv_mixing_limit(0.0, 0.3, 1.0, 0.2), 0.3);
        let a = iv_mixing_limit(0.01, 0.3, 1.0, 0.0);
        let b = iv_mixing_limit(0.01, 0.3, 5.0, 0.0);
        assert_eq!(a, b);
        assert!((a - (0.3 - 0.01 / 0.6)).abs() < 1e-15);
    }
}
