//! Local regularity of the un-normalised correction process in t and T.

use crate::correlation::cphi;
use crate::FieldError;
use asymptotic_pricer::ConstantsConvention;
use fou_core::Hurst;
use serde::Serialize;

/// Leading coefficients of the mean-square increments
/// E[(Φ_{t,T} − Φ_{t+h,T})²] ≈ dt_coeff·h and E[(Φ_{t,T+h} − Φ_{t,T})²] ≈ dT_coeff·h².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IncrementScalings {
    pub dt_coeff: f64,
    #[serde(rename = "dT_coeff")]
    pub maturity_coeff: f64,
}

fn scale_sq(hurst: &Hurst, convention: ConstantsConvention) -> f64 {
    match convention {
        ConstantsConvention::ModelConsistent => 1.0,
        ConstantsConvention::Literal => hurst.sigma_ou_sq(),
    }
}

/// Coefficients for Φ = ε^{H−1}φ/⟨G′⟩ at (t, T), requiring 0 ≤ t < t + h < T.
pub fn increment_scalings(
    t: f64,
    maturity: f64,
    h: f64,
    hurst: &Hurst,
    convention: ConstantsConvention,
) -> Result<IncrementScalings, FieldError> {
    if !(t >= 0.0 && h > 0.0 && t + h < maturity) {
        return Err(FieldError::Invalid(format!("need 0 ≤ t < t + h < T, got t = {t}, h = {h}, T = {maturity}")));
    }
    let hv = hurst.value();
    let tau = maturity - t;
    let c = scale_sq(hurst, convention);
    Ok(IncrementScalings {
        dt_coeff: c * tau.powf(2.0 * hv - 1.0) / hurst.gamma_alpha1().powi(2),
        maturity_coeff: c * tau.powf(2.0 * hv - 2.0) / ((2.0 - 2.0 * hv) * hurst.gamma_alpha().powi(2)),
    })
}

/// Cov(Φ_{t,T}, Φ_{t',T'}) = (σ_φ/⟨G′⟩)²(T−t)^H(T′−t′)^H C_φ.
pub fn unnormalized_covariance(
    t: f64,
    t2: f64,
    maturity: f64,
    maturity2: f64,
    hurst: &Hurst,
    convention: ConstantsConvention,
) -> Result<f64, FieldError> {
    let hv = hurst.value();
    let amplitude = scale_sq(hurst, convention) * hurst.increment_l2_closed() / hurst.gamma_alpha1().powi(2);
    let c = cphi(t, t2, maturity, maturity2, hurst)?;
    Ok(amplitude * ((maturity - t) * (maturity2 - t2)).powf(hv) * c)
}
