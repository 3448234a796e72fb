//! Special functions used across the workspace.

use std::f64::consts::{PI, SQRT_2};

/// Γ(x).
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal distribution function, accurate in both tails.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Generalised binomial coefficient C(a, k) for real `a`.
pub fn binomial(a: f64, k: usize) -> f64 {
    let mut c = 1.0;
    for j in 0..k {
        c *= (a - j as f64) / (j as f64 + 1.0);
    }
    c
}

/// `(x + d)^a - x^a` without cancellation when `d << x`.
pub fn pow_diff(x: f64, d: f64, a: f64) -> f64 {
    if x <= 0.0 {
        return d.powf(a) - if x == 0.0 { 0.0 } else { x.powf(a) };
    }
    x.powf(a) * (a * (d / x).ln_1p()).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_tails_and_symmetry() {
        assert!((norm_cdf(0.0) - 0.5).abs() < 1e-16);
        for &x in &[0.3, 1.0, 2.5, 6.0] {
            assert!((norm_cdf(x) + norm_cdf(-x) - 1.0).abs() < 1e-15);
        }
        // Mills-ratio asymptote for the far left tail.
        let x = -30.0_f64;
        let mills = norm_pdf(x) / -x * (1.0 - 1.0 / (x * x) + 3.0 / x.powi(4));
        assert!((norm_cdf(x) / mills - 1.0).abs() < 1e-5);
    }

    #[test]
    fn binomial_matches_integer_case() {
        assert_eq!(binomial(5.0, 2), 10.0);
        assert!((binomial(0.5, 2) + 0.125).abs() < 1e-16);
    }

    #[test]
    fn pow_diff_is_stable() {
        let a = 0.1;
        let x: f64 = 1e8;
        let d = 1e-3;
        let exact = a * x.powf(a - 1.0) * d * (1.0 + (a - 1.0) * d / (2.0 * x));
        assert!((pow_diff(x, d, a) / exact - 1.0).abs() < 1e-10);
        assert!((pow_diff(2.0, 1.0, 0.3) - (3f64.powf(0.3) - 2f64.powf(0.3))).abs() < 1e-15);
        assert_eq!(pow_diff(0.0, 4.0, 0.5), 2.0);
    }
}
