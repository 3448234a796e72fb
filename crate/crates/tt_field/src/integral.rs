//! The kernel-difference integral
//! J(r, q, s) = ∫_0^∞ [(u+r)^α − u^α][(u+s)^α − (u+q)^α] du, α = H − 1/2.

use fracvol_numerics::special::{binomial, pow_diff};
use fracvol_numerics::GaussLegendre;
use std::sync::OnceLock;

/// Ratio between successive panel edges of the head integral.
const PANEL_RATIO: f64 = 3.0;
/// The head integral stops at this multiple of the largest argument.
const SPLIT_FACTOR: f64 = 100.0;
/// Terms kept in each binomial series of the tail.
const TAIL_TERMS: usize = 16;

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(16))
}

fn integrand(u: f64, r: f64, q: f64, s: f64, a: f64) -> f64 {
    pow_diff(u, r, a) * (pow_diff(u + q, s - q, a))
}

/// J(r, q, s) for r > 0 and 0 ≤ q ≤ s.
///
/// Geometric Gauss–Legendre panels on [u₀, u*] with u* = 100·max(1, r, q, s);
/// beyond u* both differences are expanded in binomial series in 1/u and
/// integrated term by term.
pub fn kernel_difference_integral(r: f64, q: f64, s: f64, h: f64) -> f64 {
    assert!(r > 0.0 && q >= 0.0 && s >= q, "need r > 0 and 0 ≤ q ≤ s, got ({r}, {q}, {s})");
    let a = h - 0.5;
    if s == q {
        return 0.0;
    }
    let scale = r.max(s).max(1.0);
    let upper = SPLIT_FACTOR * scale;
    let lower = 1e-16 * r.min(s - q).min(1.0);
    let mut total = 0.0;
    let mut left = lower;
    while left < upper {
        let right = (left * PANEL_RATIO).min(upper);
        total += rule().integrate(|u| integrand(u, r, q, s, a), left, right);
        left = right;
    }
    // [0, u₀]: the integrand is bounded there.
    total += lower * integrand(0.5 * lower, r, q, s, a);
    total + tail(r, q, s, a, upper)
}

/// ∫_U^∞ of the product of the two binomial series.
fn tail(r: f64, q: f64, s: f64, a: f64, upper: f64) -> f64 {
    let b: Vec<f64> = (0..=TAIL_TERMS).map(|k| binomial(a, k)).collect();
    let (x, y, z) = (r / upper, s / upper, q / upper);
    // (u+c)^α − u^α = u^α Σ_{k≥1} C(α,k)(c/u)^k, so with u = U·v the product is
    // U^{2α} v^{2α} Σ_{n≥2} d_n v^{−n} in units where c → c/U.
    let first: Vec<f64> = (0..=TAIL_TERMS).map(|k| if k == 0 { 0.0 } else { b[k] * x.powi(k as i32) }).collect();
    let second: Vec<f64> =
        (0..=TAIL_TERMS).map(|k| if k == 0 { 0.0 } else { b[k] * (y.powi(k as i32) - z.powi(k as i32)) }).collect();
    let mut total = 0.0;
    for n in 2..=TAIL_TERMS {
        let d: f64 = (1..n).map(|k| first[k] * second[n - k]).sum();
        let p = 2.0 * a - n as f64 + 1.0;
        total += d / -p;
    }
    total * upper.powf(2.0 * a + 1.0)
}
