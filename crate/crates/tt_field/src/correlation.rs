//! Correlation C_φ of the normalised field at two (t, T) points and its
//! restrictions to fixed maturity, fixed time to maturity and fixed time.

use crate::integral::kernel_difference_integral;
use crate::FieldError;
use fou_core::Hurst;
use fracvol_numerics::special::gamma;

/// The (r, q, s) arguments for the ordered pair t ≤ t'.
fn arguments(t: f64, t2: f64, maturity: f64, maturity2: f64) -> (f64, f64, f64) {
    let tau = maturity - t;
    let tau2 = maturity2 - t2;
    let g = (tau * tau2).sqrt();
    ((tau / tau2).sqrt(), (t2 - t) / g, (maturity2 - t) / g)
}

fn ratio(r: f64, q: f64, s: f64, hurst: &Hurst) -> f64 {
    // Quadrature error can push the diagonal a few ulps past 1.
    (kernel_difference_integral(r, q, s, hurst.value()) / hurst.increment_l2_closed()).clamp(-1.0, 1.0)
}

/// C_φ(t, t'; T, T'): correlation of the field at (t, T) and (t', T').
pub fn cphi(t: f64, t2: f64, maturity: f64, maturity2: f64, hurst: &Hurst) -> Result<f64, FieldError> {
    if !(maturity > t && maturity2 > t2) {
        return Err(FieldError::Degenerate { t, maturity, t2, maturity2 });
    }
    let (t, t2, maturity, maturity2) =
        if t <= t2 { (t, t2, maturity, maturity2) } else { (t2, t, maturity2, maturity) };
    let (r, q, s) = arguments(t, t2, maturity, maturity2);
    Ok(ratio(r, q, s, hurst))
}

/// Relative separation (t' − t)/|2T − (t + t')| at fixed maturity.
pub fn delta_fixed_maturity(t: f64, t2: f64, maturity: f64) -> f64 {
    (t2 - t) / (2.0 * maturity - (t + t2)).abs()
}

/// Relative separation (τ − τ')/(τ + τ') of two times to maturity.
pub fn delta_maturities(tau: f64, tau2: f64) -> f64 {
    (tau - tau2) / (tau + tau2).abs()
}

/// Relative separation (τ − τ')/(τ ∧ τ') at fixed current time.
pub fn delta_fixed_time(tau: f64, tau2: f64) -> f64 {
    (tau - tau2) / tau.min(tau2)
}

/// C(Δ): correlation at fixed maturity as a function of Δ ∈ (−1, 1).
pub fn corr_fixed_maturity(delta: f64, hurst: &Hurst) -> Result<f64, FieldError> {
    if !(delta.abs() < 1.0) {
        return Err(FieldError::OutOfDomain(delta));
    }
    let d = delta.abs();
    let root = (1.0 - d * d).sqrt();
    let r = (1.0 + d) / root;
    Ok(ratio(r, 2.0 * d / root, r, hurst))
}

/// C_2(Δ): correlation at fixed time to maturity, Δ = (t' − t)/τ.
pub fn corr_fixed_ttm(delta: f64, hurst: &Hurst) -> f64 {
    let d = delta.abs();
    ratio(1.0, d, 1.0 + d, hurst)
}

/// Large-separation asymptote of C_2: a²Γ(a)Γ(1 − 2a)/(Γ(1 − a)·I)·|Δ|^{2H−2}, a = H − 1/2.
pub fn corr_fixed_ttm_tail(delta: f64, hurst: &Hurst) -> f64 {
    let a = hurst.alpha();
    let amplitude = a * a * gamma(a) * gamma(1.0 - 2.0 * a) / gamma(1.0 - a) / hurst.increment_l2_closed();
    amplitude * delta.abs().powf(2.0 * hurst.value() - 2.0)
}

/// C_3(Δ): correlation at fixed current time, Δ = (τ' − τ)/(τ ∧ τ').
pub fn corr_fixed_time(delta: f64, hurst: &Hurst) -> f64 {
    let w = (1.0 + delta.abs()).sqrt();
    ratio(1.0 / w, 0.0, w, hurst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h06() -> Hurst {
        Hurst::new(0.6).unwrap()
    }

    #[test]
    fn unit_on_the_diagonal() {
        assert!((cphi(0.3, 0.3, 1.0, 1.0, &h06()).unwrap() - 1.0).abs() < 1e-12);
        assert!((corr_fixed_maturity(0.0, &h06()).unwrap() - 1.0).abs() < 1e-12);
        assert!((corr_fixed_ttm(0.0, &h06()) - 1.0).abs() < 1e-12);
        assert!((corr_fixed_time(0.0, &h06()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_in_the_two_points() {
        let a = cphi(0.2, 0.5, 1.3, 0.9, &h06()).unwrap();
        let b = cphi(0.5, 0.2, 0.9, 1.3, &h06()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(cphi(1.0, 0.0, 1.0, 1.0, &h06()).is_err());
        assert!(corr_fixed_maturity(1.0, &h06()).is_err());
    }

    #[test]
    fn separations_are_scale_invariant() {
        for a in [0.1, 2.0, 7.0] {
            assert!((delta_maturities(a * 0.3, a * 0.8) - delta_maturities(0.3, 0.8)).abs() < 1e-15);
            assert!((delta_fixed_time(a * 0.3, a * 0.8) - delta_fixed_time(0.3, 0.8)).abs() < 1e-15);
        }
    }
}
