//! Scaled fractional Ornstein–Uhlenbeck process: constants, moving-average
//! kernel and stationary autocorrelation.
//!
//! Times handled by [`Hurst`] methods are dimensionless (units of the
//! mean-reversion time ε). [`HurstModel`] carries ε and converts calendar
//! times at its boundary.

mod correlation;
mod kernel;

pub use correlation::CorrelationForm;

use fracvol_numerics::special::gamma;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("Hurst exponent must lie strictly inside (1/2, 1), got {0}")]
    HurstOutOfRange(f64),
    #[error("mean-reversion time eps must be positive and finite, got {0}")]
    BadEpsilon(f64),
}

/// A validated Hurst exponent in (1/2, 1) with the constants derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hurst {
    h: f64,
    /// H - 1/2.
    a: f64,
    gamma_a: f64,
    gamma_a1: f64,
    sigma_h_sq: f64,
    sigma_ou_sq: f64,
}

impl Hurst {
    pub fn new(h: f64) -> Result<Self, ModelError> {
        if !(h > 0.5 && h < 1.0) {
            return Err(ModelError::HurstOutOfRange(h));
        }
        let (sigma_h_sq, sigma_ou_sq) = constants_unchecked(h);
        let a = h - 0.5;
        Ok(Self { h, a, gamma_a: gamma(a), gamma_a1: gamma(a + 1.0), sigma_h_sq, sigma_ou_sq })
    }

    pub fn value(&self) -> f64 {
        self.h
    }

    /// The kernel exponent H - 1/2.
    pub fn alpha(&self) -> f64 {
        self.a
    }

    /// fBm scale constant 1/(Γ(2H+1) sin πH).
    pub fn sigma_h_sq(&self) -> f64 {
        self.sigma_h_sq
    }

    /// Stationary fOU variance 1/(2 sin πH).
    pub fn sigma_ou_sq(&self) -> f64 {
        self.sigma_ou_sq
    }

    pub fn sigma_ou(&self) -> f64 {
        self.sigma_ou_sq.sqrt()
    }

    /// Γ(H - 1/2).
    pub fn gamma_alpha(&self) -> f64 {
        self.gamma_a
    }

    /// Γ(H + 1/2).
    pub fn gamma_alpha1(&self) -> f64 {
        self.gamma_a1
    }

    /// Constant c in the correlation tail C_Z(s) ~ c·s^{2H-2}, namely 1/Γ(2H-1).
    pub fn correlation_tail_constant(&self) -> f64 {
        1.0 / gamma(2.0 * self.h - 1.0)
    }

    /// Closed form of ∫_0^∞ ((1+u)^{H-1/2} - u^{H-1/2})² du.
    pub fn increment_l2_closed(&self) -> f64 {
        self.gamma_a1 * self.gamma_a1 * self.sigma_h_sq - 1.0 / (2.0 * self.h)
    }
}

fn constants_unchecked(h: f64) -> (f64, f64) {
    let s = (PI * h).sin();
    let sigma_h_sq = 1.0 / (gamma(2.0 * h + 1.0) * s);
    // Written through σ_H² so the two constants are tied by construction.
    let sigma_ou_sq = 0.5 * gamma(2.0 * h + 1.0) * sigma_h_sq;
    (sigma_h_sq, sigma_ou_sq)
}

/// Returns (σ_H², σ_ou²) for a Hurst exponent in (1/2, 1).
pub fn hurst_constants(h: f64) -> Result<(f64, f64), ModelError> {
    let hu = Hurst::new(h)?;
    Ok((hu.sigma_h_sq, hu.sigma_ou_sq))
}

/// Covariance of standard fBm with the σ_H² normalisation.
pub fn fbm_covariance(t: f64, s: f64, h: f64) -> Result<f64, ModelError> {
    let hu = Hurst::new(h)?;
    let p = 2.0 * h;
    Ok(0.5 * hu.sigma_h_sq * (t.abs().powf(p) + s.abs().powf(p) - (t - s).abs().powf(p)))
}

/// Hurst exponent together with the mean-reversion time ε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurstModel {
    pub hurst: Hurst,
    pub eps: f64,
}

impl HurstModel {
    pub fn new(h: f64, eps: f64) -> Result<Self, ModelError> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(ModelError::BadEpsilon(eps));
        }
        Ok(Self { hurst: Hurst::new(h)?, eps })
    }

    pub fn h(&self) -> f64 {
        self.hurst.value()
    }

    pub fn sigma_h_sq(&self) -> f64 {
        self.hurst.sigma_h_sq()
    }

    pub fn sigma_ou_sq(&self) -> f64 {
        self.hurst.sigma_ou_sq()
    }

    pub fn sigma_ou(&self) -> f64 {
        self.hurst.sigma_ou()
    }

    /// Calendar-time kernel K^ε(v) = ε^{-1/2} K(v/ε).
    pub fn kernel_calendar(&self, v: f64) -> f64 {
        self.hurst.kernel(v / self.eps) / self.eps.sqrt()
    }

    /// ∫_{v0}^{v1} K^ε(v) dv for calendar lags 0 ≤ v0 ≤ v1.
    pub fn kernel_mass_calendar(&self, v0: f64, v1: f64) -> f64 {
        self.eps.sqrt() * (self.hurst.kernel_primitive(v1 / self.eps) - self.hurst.kernel_primitive(v0 / self.eps))
    }

    /// Stationary covariance σ_ou² C_Z(lag/ε) at a calendar lag.
    pub fn covariance_calendar(&self, lag: f64) -> f64 {
        self.sigma_ou_sq() * self.hurst.correlation(lag / self.eps)
    }
}
