use fou_core::{fbm_covariance, Hurst, HurstModel};
use fracvol_numerics::quad::{adaptive, geometric_edges};
use proptest::prelude::*;

fn integrate(f: impl Fn(f64) -> f64 + Copy, upper: f64) -> f64 {
    let head = adaptive(f, 0.0, 1.0, 1e-14, 1e-12).unwrap().value;
    geometric_edges(1.0, upper, 2.0)
        .windows(2)
        .map(|e| adaptive(f, e[0], e[1], 1e-14, 1e-12).unwrap().value)
        .sum::<f64>()
        + head
}

#[test]
fn kernel_autoconvolution_is_the_correlation() {
    // Z = ∫K(t − u)dW_u, so C_Z(s) = ∫_0^∞ K(u)K(u + s)du with the normalised kernel.
    for h in [0.6, 0.75] {
        let hs = Hurst::new(h).unwrap();
        for s in [0.5, 2.0, 5.0] {
            let upper = 1e6;
            let body = integrate(|u| hs.kernel(u) * hs.kernel(u + s), upper);
            // K(u) ~ κu^{H−3/2} far out, with κ read off the kernel itself.
            let kappa = hs.kernel(upper) / upper.powf(h - 1.5);
            let tail = kappa * kappa * upper.powf(2.0 * h - 2.0) / (2.0 - 2.0 * h);
            let c = hs.correlation(s);
            assert!((body + tail - c).abs() < 1e-5, "H {h} s {s}: {} vs {c}", body + tail);
        }
    }
}

#[test]
fn short_lags_look_like_fractional_brownian_motion() {
    // 2σ_ou²(1 − C_Z(s)) ≈ E[(B^H_s)²] with relative error O(s^{2−2H}).
    for h in [0.55, 0.6, 0.75, 0.9] {
        let m = HurstModel::new(h, 1.0).unwrap();
        let s = 1e-4;
        let structure = 2.0 * (m.sigma_ou_sq() - m.covariance_calendar(s));
        let fbm = fbm_covariance(s, s, h).unwrap();
        assert!((structure / fbm - 1.0).abs() < 5.0 * s.powf(2.0 - 2.0 * h), "H {h}: {structure} vs {fbm}");
    }
}

#[test]
fn calendar_kernel_has_unit_mass_squared() {
    for eps in [0.05, 1.0, 7.0] {
        let m = HurstModel::new(0.6, eps).unwrap();
        let upper = 200.0 * eps;
        let head = adaptive(|v| m.kernel_calendar(v).powi(2), 0.0, eps, 1e-14, 1e-12).unwrap().value;
        let body: f64 = geometric_edges(eps, upper, 2.0)
            .windows(2)
            .map(|e| adaptive(|v| m.kernel_calendar(v).powi(2), e[0], e[1], 1e-14, 1e-12).unwrap().value)
            .sum();
        let total = head + body + m.hurst.kernel_l2_tail(200.0);
        assert!((total - 1.0).abs() < 1e-9, "ε {eps}: {total}");
    }
}

#[test]
fn kernel_mass_is_the_integral_of_the_calendar_kernel() {
    let m = HurstModel::new(0.7, 0.3).unwrap();
    for (v0, v1) in [(0.0, 0.1), (0.2, 1.0), (2.0, 9.0)] {
        let direct = adaptive(|v| m.kernel_calendar(v), v0, v1, 1e-14, 1e-12).unwrap().value;
        assert!((m.kernel_mass_calendar(v0, v1) - direct).abs() < 1e-10);
    }
}

#[test]
fn models_reject_bad_parameters() {
    assert!(HurstModel::new(0.6, 0.0).is_err());
    assert!(HurstModel::new(0.6, f64::INFINITY).is_err());
    assert!(HurstModel::new(0.5, 0.1).is_err());
    assert!(fbm_covariance(1.0, 1.0, 1.0).is_err());
}

proptest! {
    #[test]
    fn covariance_depends_on_lag_over_eps(h in 0.52f64..0.95, eps in 0.01f64..5.0, lag in 0.0f64..20.0, k in 0.1f64..10.0) {
        let a = HurstModel::new(h, eps).unwrap().covariance_calendar(lag);
        let b = HurstModel::new(h, k * eps).unwrap().covariance_calendar(k * lag);
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn correlation_is_positive_and_decreasing(h in 0.52f64..0.95, s in 0.0f64..40.0, ds in 0.05f64..5.0) {
        let hs = Hurst::new(h).unwrap();
        let (c0, c1) = (hs.correlation(s), hs.correlation(s + ds));
        prop_assert!(c1 > 0.0 && c1 < c0 + 1e-12, "{c0} {c1}");
    }
}
