use asymptotic_pricer::{bs_call, decompose, ConstantsConvention, OptionSpec, SkewConstants};
use fou_core::HurstModel;
use fracvol_numerics::stats::fit_line;
use implied_vol::*;
use proptest::prelude::*;
use vol_model::VolFunction;

fn constants(eps: f64, rho: f64) -> SkewConstants {
    let model = HurstModel::new(0.6, eps).unwrap();
    let f = VolFunction::paper_appendix(&model.hurst);
    SkewConstants::new(&f, &model, rho, ConstantsConvention::ModelConsistent)
}

/// Caption parameters of the implied-volatility figures.
const H: f64 = 0.6;
const A_F: f64 = 0.1;

#[test]
fn figure_curves_are_ordered_bottom_to_top() {
    for i in 1..=300 {
        let t = 0.01 * i as f64;
        let m: Vec<f64> = [0.9f64, 1.0, 1.1]
            .iter()
            .map(|k| {
                let (r, s) = relative_iv_correction(t, k.ln(), H, A_F, 0.0);
                r + s
            })
            .collect();
        assert!(m[0] < m[1] && m[1] < m[2], "τ/τ̄ = {t}: {m:?}");
    }
}

#[test]
fn skew_direction_follows_sign_of_a_f() {
    for a_f in [-0.1, 0.1] {
        let (_, lo) = relative_iv_correction(0.5, -0.1, H, a_f, 0.0);
        let (_, hi) = relative_iv_correction(0.5, 0.1, H, a_f, 0.0);
        assert_eq!((hi - lo).signum(), a_f.signum());
    }
}

#[test]
fn asymptote_exponents() {
    let taus: Vec<f64> = (0..10).map(|k| 1e-4 * 10f64.powf(k as f64 / 9.0)).collect();
    let x: Vec<f64> = taus.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = taus.iter().map(|&t| iv_asymptotes(H, A_F, t, 0.1).short.ln()).collect();
    assert!((fit_line(&x, &y).slope - (H - 1.5)).abs() < 1e-10);
    let big: Vec<f64> = (0..10).map(|k| 1e2 * 10f64.powf(k as f64 / 9.0)).collect();
    let x: Vec<f64> = big.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = big.iter().map(|&t| iv_asymptotes(H, A_F, t, 0.1).long.ln()).collect();
    assert!((fit_line(&x, &y).slope - (H - 0.5)).abs() < 1e-10);
    assert_eq!(iv_asymptotes(H, A_F, 1e-3, 0.0).short, 0.0);
    // The log-moneyness term dominates the full skew correction at short maturity.
    let (_, s) = relative_iv_correction(1e-3, 0.1, H, A_F, 0.0);
    assert!((s / iv_asymptotes(H, A_F, 1e-3, 0.1).short - 1.0).abs() < 0.02);
}

#[test]
fn random_band_grows_with_maturity_power() {
    // sd(δI) = (1/2)(τ/τ̄)^{−1} sd(φ) with sd(φ) ∝ (τ/τ̄)^H.
    let taus: Vec<f64> = (1..=20).map(|k| 0.05 * k as f64).collect();
    let x: Vec<f64> = taus.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = taus.iter().map(|&t| relative_iv_correction(t, 0.0, H, 0.0, 0.04 * t.powf(H)).0.ln()).collect();
    assert!((fit_line(&x, &y).slope - (H - 1.0)).abs() < 1e-10);
}

#[test]
fn mixing_limit_is_the_formal_limit_of_the_expansion() {
    let c = constants(0.01, -0.5);
    let h = 0.5 + 1e-6;
    let v3 = matched_mixing_coefficient(c.sigma_bar, c.a_f);
    for &tau in &[0.1, 1.0, 5.0] {
        for &lm in &[-0.2, 0.0, 0.15] {
            let (_, s) = relative_iv_correction(tau / c.tau_bar, lm, h, c.a_f, 0.0);
            let expansion = c.sigma_bar * (1.0 + s);
            let mixing = iv_mixing_limit(v3, c.sigma_bar, tau, lm);
            assert!((expansion - mixing).abs() < 1e-5 * c.sigma_bar, "τ={tau} L={lm}: {expansion} vs {mixing}");
        }
    }
}

#[test]
fn forward_rms_repackaging() {
    let c = constants(0.01, -0.5);
    let e = iv_from_phi(&c, 1.0, 0.05, 0.01).unwrap();
    assert!((e.forward_rms - (c.sigma_bar.powi(2) + 0.02).sqrt()).abs() < 1e-15);
    // The two leading terms agree to first order in φ.
    let first_order = c.sigma_bar * (1.0 + e.point.delta_iv_random);
    assert!((e.forward_rms - first_order).abs() < 1e-3 * c.sigma_bar);
    assert!(iv_from_phi(&c, 0.0, 0.0, 0.0).is_err());
}

#[test]
fn validity_flag_marks_blow_up() {
    let (_, s) = relative_iv_correction(1e-4, 0.3, H, A_F, 0.0);
    assert!(s.abs() > VALIDITY_LIMIT);
    let c = SkewConstants { a_f: A_F, ..constants(0.01, -0.5) };
    let e = iv_from_phi(&c, 1e-4 * c.tau_bar, 0.3, 0.0).unwrap();
    assert!(!e.point.valid);
    assert!(iv_from_phi(&c, c.tau_bar, 0.0, 0.0).unwrap().point.valid);
}

/// |invert_bs(corrected price) − σ̄(1 + δI)| for a history one σ_φ-standard-deviation above average.
fn consistency_gap(eps: f64, m: f64, tau: f64) -> f64 {
    let c = constants(eps, -0.5);
    let phi = c.phi_std(tau);
    let x = 100.0;
    let d = decompose(&OptionSpec::call(m * x, tau), x, 0.0, phi, &c).unwrap();
    let implied = invert_bs(d.total, 0.0, x, m * x, tau).unwrap();
    let e = iv_from_phi(&c, tau, m.ln(), phi).unwrap();
    (implied - e.point.iv_total).abs()
}

#[test]
fn expansion_is_consistent_with_inverted_corrected_price() {
    let eps = [0.1, 0.05, 0.025, 0.0125, 0.00625];
    for &(m, tau) in &[(1.0, 1.0), (0.9, 0.5), (1.1, 2.0)] {
        let gaps: Vec<f64> = eps.iter().map(|&e| consistency_gap(e, m, tau)).collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
        let x: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
        let y: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
        let slope = fit_line(&x, &y).slope;
        assert!(slope > 0.4, "slope {slope} at K/x = {m}, τ = {tau}");
    }
}

proptest! {
    #[test]
    fn round_trip(sigma in 0.05f64..1.0, m in 0.7f64..1.4, tau in 0.05f64..3.0) {
        let x = 100.0;
        let p = bs_call(x, m * x, tau, sigma);
        prop_assume!(p - (x - m * x).max(0.0) > 1e-8 * x);
        let s = invert_bs(p, 0.0, x, m * x, tau).unwrap();
        prop_assert!((s - sigma).abs() < 1e-10, "σ = {sigma}, got {s}");
    }
}
