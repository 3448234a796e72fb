use fou_core::{Hurst, HurstModel};
use fou_sampler::{FouSampler, UniformGrid};
use fracvol_numerics::special::{ln_gamma, norm_cdf};
use fracvol_numerics::stats::Moments;
use std::f64::consts::PI;
use vol_model::{VolFunction, VolSpec};

fn h06() -> Hurst {
    Hurst::new(0.6).unwrap()
}

/// Composite trapezoid rule for E[g(Z)] on [−10, 10].
fn trapezoid(g: impl Fn(f64) -> f64) -> f64 {
    let n = 200_000;
    let h = 20.0 / n as f64;
    let p = |z: f64| (-0.5 * z * z).exp() / (2.0 * PI).sqrt();
    let mut s = 0.5 * (g(-10.0) * p(-10.0) + g(10.0) * p(10.0));
    for i in 1..n {
        let z = -10.0 + h * i as f64;
        s += g(z) * p(z);
    }
    s * h
}

#[test]
fn gaussian_mass_mean_square_matches_trapezoid_oracle() {
    let h = h06();
    let f = VolFunction::paper_appendix(&h);
    let s = h.sigma_ou();
    // F(x)² = 2√π Φ(x/(σ_ou√2)) at x = σ_ou z.
    let oracle = trapezoid(|z| 2.0 * PI.sqrt() * norm_cdf((s * z) / (s * 2f64.sqrt())));
    assert!((f.moments().sigma_bar_sq - oracle).abs() < 1e-8);
    assert!((f.moments().sigma_bar_sq - PI.sqrt()).abs() < 1e-12);
}

#[test]
fn gaussian_mass_hermite_coefficients_match_closed_form() {
    // C_0 = √π, C_{2m+1} = √(2/3)(−1)^m (2m−1)!!/3^m, even k ≥ 2 vanish.
    let f = VolFunction::paper_appendix(&h06());
    let c = f.hermite_coefficients(40).unwrap();
    assert!((c.coefficient(0) - f.moments().sigma_bar_sq).abs() < 1e-12);
    for k in 1..=40usize {
        let want_norm = if k % 2 == 0 {
            0.0
        } else {
            let m = (k - 1) / 2;
            // ln (2m−1)!! = ln (2m)! − m ln 2 − ln m!
            let ln_dfact = ln_gamma(2.0 * m as f64 + 1.0) - m as f64 * 2f64.ln() - ln_gamma(m as f64 + 1.0);
            let mag = (2.0f64 / 3.0).sqrt() * (ln_dfact - m as f64 * 3f64.ln() - 0.5 * ln_gamma(k as f64 + 1.0)).exp();
            if m % 2 == 0 {
                mag
            } else {
                -mag
            }
        };
        assert!((c.normalized()[k] - want_norm).abs() < 1e-12, "k={k}");
    }
}

#[test]
fn gaussian_mass_coefficients_satisfy_three_to_the_minus_k_bound() {
    let f = VolFunction::paper_appendix(&h06());
    let c = f.hermite_coefficients(30).unwrap();
    let scaled: Vec<f64> = (0..=30).map(|k| c.energy(k) * 3f64.powi(k as i32)).collect();
    let bound = scaled.iter().cloned().fold(0.0, f64::max);
    assert!(bound.is_finite() && bound <= std::f64::consts::PI + 1e-12);
    // Odd-order scaled energies decrease, so the fitted constant does not grow with k.
    for k in (3..=29).step_by(2) {
        assert!(scaled[k] < scaled[k - 2]);
    }
}

#[test]
fn logistic_coefficients_decay_faster_than_one_over_two_and_a_half() {
    let f = VolFunction::logistic_default(&h06());
    let c = f.hermite_coefficients(30).unwrap();
    let r = c.geometric_ratio(1..=30, 0.0).unwrap();
    assert!(r < 1.0 / 2.5, "ratio {r}");
}

#[test]
fn parseval_identity() {
    for f in [VolFunction::paper_appendix(&h06()), VolFunction::logistic_default(&h06())] {
        let c = f.hermite_coefficients(60).unwrap();
        let want = f.expect_standard(|z| f.f_tilde(z).powi(2));
        assert!((c.parseval_sum() - want).abs() < 1e-8 * want);
    }
}

#[test]
fn integration_by_parts_route_for_mean_g_prime() {
    let h = h06();
    let table = VolSpec::UserTable {
        x: (0..=40).map(|i| -4.0 + 0.2 * i as f64).collect(),
        sigma: (0..=40).map(|i| 0.1 + 0.3 / (1.0 + (-(-4.0 + 0.2 * i as f64) * 1.5f64).exp())).collect(),
    };
    for f in [VolFunction::paper_appendix(&h), VolFunction::logistic_default(&h), VolFunction::new(table, &h).unwrap()]
    {
        let direct = f.moments().ff_prime;
        let parts = f.ff_prime_by_parts();
        assert!((direct - parts).abs() < 1e-10, "{direct} vs {parts}");
    }
}

#[test]
fn jensen_gap_is_positive() {
    let f = VolFunction::logistic_default(&h06());
    let m = f.moments();
    assert!(m.sigma_tilde.powi(2) < m.sigma_bar_sq);
    assert!(m.variance() > 0.0);
}

#[test]
fn psi_basic_shape() {
    let f = VolFunction::paper_appendix(&h06());
    assert!(f.psi(0.0).abs() < 1e-12);
    assert_eq!(f.psi(1.0), f.moments().variance());
    let mut prev = f.psi(0.0);
    for i in 1..100 {
        let c = i as f64 / 100.0;
        let v = f.psi(c);
        assert!(v > prev && v <= f.moments().variance());
        prev = v;
    }
    for &c in &[0.05, 0.3, 0.8] {
        assert!((f.psi(c) - f.psi_by_series(c, 60)).abs() < 1e-10);
    }
}

#[test]
fn volatility_autocovariance_tail() {
    let h = h06();
    let m = HurstModel::new(0.6, 0.1).unwrap();
    for f in [VolFunction::paper_appendix(&h), VolFunction::logistic_default(&h)] {
        let s = 100.0 * m.eps;
        let got = f.vol_autocovariance(&m, s);
        let want = f.vol_autocovariance_tail(&m, s);
        assert!((got / want - 1.0).abs() < 0.05, "{got} vs {want}");
        assert_eq!(f.vol_autocovariance(&m, 0.0), f.moments().variance());
    }
}

#[test]
fn sampled_volatility_covariance_matches_quadrature() {
    let m = HurstModel::new(0.6, 0.1).unwrap();
    let f = VolFunction::paper_appendix(&m.hurst);
    let grid = UniformGrid::new(0.0, m.eps / 20.0, 512).unwrap();
    let sampler = FouSampler::with_default_history(m, grid).unwrap();
    let mean = f.moments().sigma_tilde;
    let lags = [20usize, 100, 400];
    let mut acc = vec![Moments::new(); lags.len()];
    for i in 0..4000 {
        let p = sampler.path(21, i);
        let v: Vec<f64> = p.z().iter().map(|&z| f.evaluate(z) - mean).collect();
        for (a, &l) in acc.iter_mut().zip(&lags) {
            let n = v.len() - l;
            a.push((0..n).map(|j| v[j] * v[j + l]).sum::<f64>() / n as f64);
        }
    }
    for (a, &l) in acc.iter().zip(&lags) {
        let want = f.vol_autocovariance(&m, l as f64 * grid.dt);
        assert!((a.mean() - want).abs() < 3.0 * a.std_error(), "lag {l}: {} vs {want} ± {}", a.mean(), a.std_error());
    }
}
