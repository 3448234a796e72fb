//! Corrected price: Black–Scholes at σ̄, plus the random term φ·x²∂²Q^(0),
//! plus the deterministic skew term.

use crate::bs::d1;
use crate::phi::phi_correction;
use crate::skew::{ConstantsConvention, SkewConstants};
use crate::{OptionSpec, PricerError};
use fou_core::HurstModel;
use fou_sampler::FouPath;
use serde::Serialize;
use std::f64::consts::PI;
use vol_model::VolFunction;

/// Tolerance of the standing agreement check between the raw-greeks and
/// normalised forms of the correction.
pub const DUAL_FORM_TOLERANCE: f64 = 1e-10;

/// Observed state at the pricing time.
#[derive(Debug, Clone, Copy)]
pub struct MarketState<'a> {
    pub t: f64,
    pub x: f64,
    pub rho: f64,
    /// Factor history up to `t`; `t` must be one of its grid times.
    pub path: &'a FouPath,
}

impl MarketState<'_> {
    pub fn validate(&self) -> Result<(), PricerError> {
        if !(self.x > 0.0 && self.x.is_finite()) {
            return Err(PricerError::Invalid(format!("spot must be positive, got {}", self.x)));
        }
        check_rho(self.rho)
    }
}

pub(crate) fn check_rho(rho: f64) -> Result<(), PricerError> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(PricerError::Invalid(format!("correlation must lie in [-1, 1], got {rho}")));
    }
    Ok(())
}

/// Components of the corrected price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriceDecomposition {
    pub q0: f64,
    pub phi: f64,
    pub random_term: f64,
    pub skew_term: f64,
    pub total: f64,
    pub d1: f64,
    pub tau_bar: f64,
    #[serde(rename = "a_F")]
    pub a_f: f64,
}

/// The correction divided by the strike, written in moneyness and relative maturity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedCorrection {
    /// (x/K)e^{−d1²/2}/√π.
    pub prefactor: f64,
    /// Prefactor times (φ/2)(τ/τ̄)^{−1/2}.
    pub random: f64,
    /// Prefactor times a_F[(τ/τ̄)^H + (τ/τ̄)^{H−1} ln(K/x)].
    pub skew: f64,
}

impl NormalizedCorrection {
    pub fn total(&self) -> f64 {
        self.random + self.skew
    }
}

/// Correction per unit strike for moneyness K/x and relative maturity τ/τ̄ > 0.
pub fn normalized_correction(moneyness: f64, tau_rel: f64, h: f64, a_f: f64, phi: f64) -> NormalizedCorrection {
    let log_m = moneyness.ln();
    let d1 = (tau_rel - log_m) / (2.0 * tau_rel).sqrt();
    let prefactor = (-0.5 * d1 * d1).exp() / (moneyness * PI.sqrt());
    NormalizedCorrection {
        prefactor,
        random: prefactor * 0.5 * phi / tau_rel.sqrt(),
        skew: prefactor * a_f * (tau_rel.powf(h) + tau_rel.powf(h - 1.0) * log_m),
    }
}

/// Corrected price for a given value of φ.
pub fn decompose(
    option: &OptionSpec,
    x: f64,
    t: f64,
    phi: f64,
    constants: &SkewConstants,
) -> Result<PriceDecomposition, PricerError> {
    option.validate()?;
    let tau = option.maturity - t;
    if tau < 0.0 {
        return Err(PricerError::Invalid(format!("maturity {} precedes current time {t}", option.maturity)));
    }
    let sigma = constants.sigma_bar;
    let tau_bar = constants.tau_bar;
    if tau == 0.0 {
        let h = option.payoff_at(x);
        return Ok(PriceDecomposition {
            q0: h,
            phi: 0.0,
            random_term: 0.0,
            skew_term: 0.0,
            total: h,
            d1: f64::NAN,
            tau_bar,
            a_f: constants.a_f,
        });
    }
    let portfolio = option.portfolio();
    let q0 = portfolio.price(x, tau, sigma);
    let g = portfolio.greeks(x, tau, sigma);
    let random_term = phi * g.gamma_x2;
    let skew_term = constants.skew_scale() * g.skew_x * constants.d_of_tau(tau);

    let k = option.strike;
    let tau_rel = tau / tau_bar;
    let (mut normalized, mut scale) = (0.0, 0.0);
    for &(strike, w) in &portfolio.legs {
        let n = normalized_correction(strike / x, tau_rel, constants.h, constants.a_f, phi);
        normalized += w * strike / k * n.total();
        scale += (w * strike / k).abs()
            * (n.random.abs()
                + n.prefactor
                    * constants.a_f.abs()
                    * (tau_rel.powf(constants.h) + tau_rel.powf(constants.h - 1.0) * (strike / x).ln().abs()));
    }
    let raw = (random_term + skew_term) / k;
    if (raw - normalized).abs() > DUAL_FORM_TOLERANCE * scale {
        return Err(PricerError::DualFormMismatch { raw, normalized });
    }
    Ok(PriceDecomposition {
        q0,
        phi,
        random_term,
        skew_term,
        total: q0 + random_term + skew_term,
        d1: d1(x, k, tau, sigma),
        tau_bar,
        a_f: constants.a_f,
    })
}

/// Corrected price of `option` given the factor history in `state`.
pub fn corrected_price(
    state: &MarketState,
    option: &OptionSpec,
    f: &VolFunction,
    model: &HurstModel,
) -> Result<PriceDecomposition, PricerError> {
    corrected_price_with(state, option, f, model, ConstantsConvention::default(), fou_sampler::DEFAULT_TOLERANCE)
}

/// As [`corrected_price`] with an explicit constants convention and history tolerance.
pub fn corrected_price_with(
    state: &MarketState,
    option: &OptionSpec,
    f: &VolFunction,
    model: &HurstModel,
    convention: ConstantsConvention,
    tol: f64,
) -> Result<PriceDecomposition, PricerError> {
    state.validate()?;
    option.validate()?;
    if state.path.model() != model {
        return Err(PricerError::Invalid("path was sampled under a different model".into()));
    }
    let constants = SkewConstants::new(f, model, state.rho, convention);
    let phi =
        if option.maturity > state.t { phi_correction(state.path, state.t, option.maturity, f, tol)? } else { 0.0 };
    decompose(option, state.x, state.t, phi, &constants)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bs::bs_call;

    fn constants(rho: f64) -> SkewConstants {
        let model = HurstModel::new(0.6, 0.01).unwrap();
        let f = VolFunction::paper_appendix(&model.hurst);
        SkewConstants::new(&f, &model, rho, ConstantsConvention::ModelConsistent)
    }

    #[test]
    fn expiry_returns_payoff() {
        let c = constants(-0.5);
        let d = decompose(&OptionSpec::call(100.0, 1.0), 120.0, 1.0, 0.3, &c).unwrap();
        assert_eq!(d.total, 20.0);
    }

    #[test]
    fn no_corrections_gives_black_scholes() {
        let c = constants(0.0);
        let d = decompose(&OptionSpec::call(100.0, 1.0), 95.0, 0.0, 0.0, &c).unwrap();
        assert_eq!(d.skew_term, 0.0);
        assert_eq!(d.random_term, 0.0);
        assert_eq!(d.total, bs_call(95.0, 100.0, 1.0, c.sigma_bar));
    }

    #[test]
    fn at_the_money_normalised_form() {
        // K = x: ln K/x = 0, d1 = √(τ/τ̄/2).
        let n = normalized_correction(1.0, 2.0, 0.6, 0.1, 0.0);
        assert!((n.prefactor - (-0.5f64).exp() / PI.sqrt()).abs() < 1e-15);
        assert!((n.skew - n.prefactor * 0.1 * 2f64.powf(0.6)).abs() < 1e-15);
    }

    #[test]
    fn put_and_call_share_the_correction() {
        let c = constants(-0.5);
        let call = decompose(&OptionSpec::call(110.0, 1.0), 100.0, 0.0, 0.02, &c).unwrap();
        let put = decompose(&OptionSpec::put(110.0, 1.0), 100.0, 0.0, 0.02, &c).unwrap();
        assert!((call.random_term - put.random_term).abs() < 1e-14);
        assert!((call.skew_term - put.skew_term).abs() < 1e-14);
        assert!((call.q0 - put.q0 - (100.0 - 110.0)).abs() < 1e-12);
    }
}
