use fracvol_numerics::quad::{adaptive, adaptive_semi_infinite, geometric_edges, GaussHermite, GaussLegendre};
use fracvol_numerics::special::{gamma, ln_gamma, norm_cdf, norm_pdf};
use fracvol_numerics::stats::{anderson_darling_normal, fit_line_weighted, Moments};
use proptest::prelude::*;

#[test]
fn hermite_rule_integrates_lognormal_moments() {
    // E[e^{sZ}] = e^{s²/2}.
    let rule = GaussHermite::new(128);
    for s in [0.5, 1.0, 2.0] {
        let got = rule.expect(|z| (s * z).exp());
        assert!((got / (0.5 * s * s).exp() - 1.0).abs() < 1e-13, "s {s}: {got}");
    }
}

#[test]
fn hermite_and_legendre_agree_on_gaussian_expectations() {
    let gl = GaussLegendre::new(64);
    let edges: Vec<f64> = (-12..=12).map(|k| k as f64).collect();
    let g = |z: f64| (1.0 + z * z).ln();
    let by_legendre = gl.integrate_panels(|z| g(z) * norm_pdf(z), &edges);
    let by_hermite = GaussHermite::new(400).expect(g);
    assert!((by_legendre - by_hermite).abs() < 1e-9, "{by_legendre} vs {by_hermite}");
}

#[test]
fn adaptive_recovers_the_beta_integral() {
    // ∫_0^1 x^{a−1}(1−x)^{b−1} dx = Γ(a)Γ(b)/Γ(a+b); each half is written with its singularity at 0.
    for (a, b) in [(0.3, 0.7), (1.5, 0.4), (2.0, 3.0)] {
        let beta = |x: f64, p: f64, q: f64| x.powf(p - 1.0) * (1.0 - x).powf(q - 1.0);
        let got = adaptive(|x| beta(x, a, b), 0.0, 0.5, 1e-13, 1e-11).unwrap().value
            + adaptive(|y| beta(y, b, a), 0.0, 0.5, 1e-13, 1e-11).unwrap().value;
        let want = gamma(a) * gamma(b) / gamma(a + b);
        assert!((got / want - 1.0).abs() < 1e-10, "({a}, {b}): {got} vs {want}");
    }
}

#[test]
fn semi_infinite_rule_and_geometric_panels_agree() {
    // ∫_0^∞ x^{−1/2}/(1+x)² dx = π/2.
    let f = |x: f64| 1.0 / (x.sqrt() * (1.0 + x).powi(2));
    let want = 0.5 * std::f64::consts::PI;
    let mapped = adaptive_semi_infinite(f, 0.0, 1e-13, 1e-11).unwrap().value;
    let upper = 1e8;
    let panels: f64 = adaptive(f, 0.0, 1.0, 1e-13, 1e-11).unwrap().value
        + geometric_edges(1.0, upper, 4.0)
            .windows(2)
            .map(|e| adaptive(f, e[0], e[1], 1e-13, 1e-11).unwrap().value)
            .sum::<f64>()
        + (2.0 / 3.0) * upper.powf(-1.5);
    assert!((mapped - want).abs() < 1e-10, "{mapped}");
    assert!((panels - want).abs() < 1e-10, "{panels}");
}

#[test]
fn normal_cdf_is_the_integral_of_the_density() {
    for x in [-6.0, -1.3, 0.0, 0.7, 4.0] {
        let tail = adaptive_semi_infinite(norm_pdf, -x, 1e-15, 1e-13).unwrap().value;
        assert!((norm_cdf(x) - tail).abs() < 1e-12, "{x}");
    }
}

#[test]
fn weighted_fit_ignores_points_with_huge_errors() {
    let x = [0.0, 1.0, 2.0, 3.0];
    let y = [1.0, 3.0, 5.0, 100.0];
    let fit = fit_line_weighted(&x, &y, &[1.0, 1.0, 1.0, 1e9]);
    assert!((fit.slope - 2.0).abs() < 1e-8);
}

#[test]
fn anderson_darling_rejects_a_uniform_sample() {
    let sample: Vec<f64> = (0..500).map(|i| (i as f64 + 0.5) / 500.0).collect();
    assert!(!anderson_darling_normal(&sample).accepts_at(0.01));
}

proptest! {
    #[test]
    fn log_gamma_matches_gamma(x in 0.1f64..30.0) {
        prop_assert!((ln_gamma(x) - gamma(x).ln()).abs() < 1e-12 * ln_gamma(x).abs().max(1.0));
    }

    #[test]
    fn gamma_recurrence(x in 0.05f64..20.0) {
        prop_assert!((gamma(x + 1.0) / (x * gamma(x)) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn moments_match_two_pass_formulas(xs in proptest::collection::vec(-50.0f64..50.0, 2..80)) {
        let m: Moments = xs.iter().copied().collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        prop_assert!((m.mean() - mean).abs() < 1e-10);
        prop_assert!((m.variance() - var).abs() < 1e-9 * var.max(1.0));
        prop_assert!((m.std_error() - (var / n).sqrt()).abs() < 1e-9);
    }
}
