//! Constants of the first-order correction: skewness factor, deterministic
//! correction amplitude, and the fluctuation scale of the random term.

use fou_core::HurstModel;
use fracvol_numerics::quad::{adaptive_semi_infinite, QuadError};
use fracvol_numerics::special::gamma;
use serde::{Deserialize, Serialize};
use vol_model::VolFunction;

/// Which placement of σ_ou the constants use.
///
/// With the factor written as Z = σ_ou∫K^ε dW and ∫K² = 1, the martingale
/// expansion yields constants without a leading σ_ou (σ_ou² for variances).
/// The literal convention keeps that extra factor; it is retained for
/// comparison and is not consistent with the simulated model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantsConvention {
    #[default]
    ModelConsistent,
    Literal,
}

/// Dimensionless and dimensional constants of the correction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SkewConstants {
    pub h: f64,
    pub eps: f64,
    pub rho: f64,
    pub sigma_bar: f64,
    pub sigma_tilde: f64,
    /// Characteristic diffusion time 2/σ̄².
    pub tau_bar: f64,
    /// Dimensionless skewness factor a_F.
    pub a_f: f64,
    /// D̄, with D(τ) = D̄·τ^{H+1/2}.
    pub d_bar: f64,
    /// θ̄, the amplitude of the conditional drift of the factor function.
    pub theta_bar: f64,
    /// σ_φ, with sd(φ) ≈ ε^{1−H} σ_φ τ^H.
    pub sigma_phi: f64,
    pub convention: ConstantsConvention,
}

impl SkewConstants {
    pub fn new(f: &VolFunction, model: &HurstModel, rho: f64, convention: ConstantsConvention) -> Self {
        let h = model.h();
        let m = f.moments();
        let sigma_bar = m.sigma_bar();
        let tau_bar = 2.0 / m.sigma_bar_sq;
        let scale = match convention {
            ConstantsConvention::ModelConsistent => 1.0,
            ConstantsConvention::Literal => model.sigma_ou(),
        };
        let d_bar = scale * m.ff_prime / gamma(h + 1.5);
        let theta_bar = scale * m.ff_prime / model.hurst.gamma_alpha1();
        let sigma_phi_sq =
            (scale * m.ff_prime).powi(2) * (model.sigma_h_sq() - 1.0 / (2.0 * h * model.hurst.gamma_alpha1().powi(2)));
        let a_f =
            model.eps.powf(1.0 - h) * m.sigma_tilde * rho * d_bar * tau_bar.powf(h) / (2f64.powf(1.5) * sigma_bar);
        Self {
            h,
            eps: model.eps,
            rho,
            sigma_bar,
            sigma_tilde: m.sigma_tilde,
            tau_bar,
            a_f,
            d_bar,
            theta_bar,
            sigma_phi: sigma_phi_sq.max(0.0).sqrt(),
            convention,
        }
    }

    /// D(τ) = D̄·τ^{H+1/2}.
    pub fn d_of_tau(&self, tau: f64) -> f64 {
        self.d_bar * tau.max(0.0).powf(self.h + 0.5)
    }

    /// Leading standard deviation of φ for time to maturity τ.
    pub fn phi_std(&self, tau: f64) -> f64 {
        self.eps.powf(1.0 - self.h) * self.sigma_phi * tau.max(0.0).powf(self.h)
    }

    /// The skew coefficient ε^{1−H}σ̃ρ multiplying Q^(1).
    pub fn skew_scale(&self) -> f64 {
        self.eps.powf(1.0 - self.h) * self.sigma_tilde * self.rho
    }
}

/// Exact variance of the linear part ⟨G′⟩∫_t^T E[Z_s|F_t] ds at finite ε,
/// ⟨G′⟩²ε∫_0^∞ (P((τ+v)/ε) − P(v/ε))² dv with P the primitive of the
/// unnormalised kernel (model-consistent convention).
///
/// The leading-order ε^{2−2H}σ_φ²τ^{2H} is approached with a relative
/// correction of order ε/τ whose constant is large for H near 1/2
/// (about 27ε/τ at H = 0.6).
pub fn phi_linear_variance(f: &VolFunction, model: &HurstModel, tau: f64) -> Result<f64, QuadError> {
    let hu = model.hurst;
    let eps = model.eps;
    let p = |x: f64| if x <= 0.0 { 0.0 } else { hu.kernel_primitive_unnormalized(x) };
    let head = fracvol_numerics::quad::adaptive(|v| (p((tau + v) / eps) - p(v / eps)).powi(2), 0.0, tau, 0.0, 1e-11)?;
    let tail = adaptive_semi_infinite(|v| (p((tau + v) / eps) - p(v / eps)).powi(2), tau, 0.0, 1e-11)?;
    Ok(f.moments().ff_prime.powi(2) * eps * (head.value + tail.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn setup(h: f64, eps: f64) -> (HurstModel, VolFunction) {
        let model = HurstModel::new(h, eps).unwrap();
        (model, VolFunction::paper_appendix(&model.hurst))
    }

    #[test]
    fn no_leverage_no_skew() {
        let (model, f) = setup(0.6, 0.01);
        assert_eq!(SkewConstants::new(&f, &model, 0.0, ConstantsConvention::ModelConsistent).a_f, 0.0);
    }

    #[test]
    fn fluctuation_scale_matches_integral_form() {
        for h in [0.55, 0.6, 0.75, 0.9] {
            let (model, f) = setup(h, 0.01);
            for conv in [ConstantsConvention::ModelConsistent, ConstantsConvention::Literal] {
                let c = SkewConstants::new(&f, &model, -0.5, conv);
                let scale = if conv == ConstantsConvention::Literal { model.sigma_ou() } else { 1.0 };
                let integral =
                    (scale * f.moments().ff_prime / model.hurst.gamma_alpha1()).powi(2) * model.hurst.increment_l2();
                assert_relative_eq!(c.sigma_phi.powi(2), integral, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn fluctuation_scale_vanishes_towards_half() {
        let (model, f) = setup(0.5 + 1e-7, 0.01);
        let c = SkewConstants::new(&f, &model, -0.5, ConstantsConvention::Literal);
        assert!(c.sigma_phi < 1e-3, "σ_φ = {}", c.sigma_phi);
    }

    #[test]
    fn finite_eps_variance_approaches_leading_order() {
        let mut last = f64::INFINITY;
        for eps in [1e-2, 1e-3, 1e-4] {
            let (model, f) = setup(0.6, eps);
            let c = SkewConstants::new(&f, &model, 0.0, ConstantsConvention::ModelConsistent);
            let ratio = phi_linear_variance(&f, &model, 1.0).unwrap() / c.phi_std(1.0).powi(2);
            assert!(ratio > 1.0 && ratio < last, "ε = {eps}: ratio {ratio}");
            last = ratio;
        }
        assert!(last - 1.0 < 0.01, "ratio {last} at ε = 1e-4");
    }

    #[test]
    fn literal_convention_scales_by_sigma_ou() {
        let (model, f) = setup(0.6, 0.01);
        let a = SkewConstants::new(&f, &model, -0.5, ConstantsConvention::ModelConsistent);
        let b = SkewConstants::new(&f, &model, -0.5, ConstantsConvention::Literal);
        let s = model.sigma_ou();
        assert_relative_eq!(b.a_f, s * a.a_f, max_relative = 1e-14);
        assert_relative_eq!(b.d_bar, s * a.d_bar, max_relative = 1e-14);
        assert_relative_eq!(b.sigma_phi, s * a.sigma_phi, max_relative = 1e-12);
    }

    #[test]
    fn skew_factor_from_raw_gamma_values() {
        let (model, f) = setup(0.6, 0.01);
        let c = SkewConstants::new(&f, &model, -0.5, ConstantsConvention::Literal);
        // Re-derived from Γ(2.1) = 1.046485..., σ_ou² = 1/(2 sin 0.6π) and the cached moments.
        let m = f.moments();
        let sigma_ou = (0.5 / (0.6 * std::f64::consts::PI).sin()).sqrt();
        let g = gamma_2_1_reference();
        let tau_bar = 2.0 / m.sigma_bar_sq;
        let expected = 0.01f64.powf(0.4) * m.sigma_tilde * sigma_ou * (-0.5) * m.ff_prime * tau_bar.powf(0.6)
            / (8f64.sqrt() * m.sigma_bar_sq.sqrt() * g);
        assert_relative_eq!(c.a_f, expected, max_relative = 1e-12);
    }

    /// Γ(2.1) = 1.1·Γ(1.1) from the tabulated Γ(1.1).
    fn gamma_2_1_reference() -> f64 {
        1.1 * 0.951_350_769_866_873_2
    }
}
