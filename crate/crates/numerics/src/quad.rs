//! Quadrature rules.
//!
//! Gauss–Legendre and Gauss–Hermite nodes are computed by Newton iteration
//! on the three-term recurrences. The adaptive integrator is a globally
//! adaptive 7/15-point Gauss–Kronrod scheme that always bisects the panel
//! with the largest error estimate.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error(
        "adaptive quadrature did not converge: value {value:e}, error estimate {error:e} after {intervals} panels"
    )]
    NotConverged { value: f64, error: f64, intervals: usize },
    #[error("non-finite integrand value at x = {0:e}")]
    NonFinite(f64),
}

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (c + h * x, h * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Sum of the rule applied on each consecutive pair of `edges`.
    pub fn integrate_panels<F: FnMut(f64) -> f64>(&self, mut f: F, edges: &[f64]) -> f64 {
        edges.windows(2).map(|e| self.integrate(&mut f, e[0], e[1])).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Hermite rule for expectations against the standard normal law:
/// `E[f(Z)] ≈ Σ w_i f(x_i)` with `Σ w_i = 1`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Largest supported rule; beyond this the orthonormal recurrence overflows.
    pub const MAX_NODES: usize = 600;

    pub fn new(n: usize) -> Self {
        assert!((1..=Self::MAX_NODES).contains(&n), "Gauss-Hermite rule size must be in 1..={}", Self::MAX_NODES);
        // Roots of the physicists' polynomial H_n are bracketed by a scan of
        // the Hermite function (polynomial times exp(-x^2/2), which cannot
        // overflow) and polished by safeguarded Newton steps.
        let nf = n as f64;
        let upper = (2.0 * nf + 1.0).sqrt() + 1.0;
        let step = 0.2 * PI / (2.0 * nf + 1.0).sqrt();
        let mut roots = Vec::with_capacity(n);
        if n % 2 == 1 {
            roots.push(0.0);
        }
        let mut x0 = if n % 2 == 1 { 0.5 * step } else { 0.0 };
        let mut f0 = hermite_function(n, x0).0;
        while roots.len() < n.div_ceil(2) && x0 < upper {
            let x1 = x0 + step;
            let f1 = hermite_function(n, x1).0;
            if f0 == 0.0 {
                roots.push(x0);
            } else if f0.signum() != f1.signum() {
                roots.push(refine_root(n, x0, x1));
            }
            x0 = x1;
            f0 = f1;
        }
        assert_eq!(roots.len(), n.div_ceil(2), "Hermite root scan missed a root");
        let mut pairs = Vec::with_capacity(n);
        let spi = PI.sqrt();
        let s2 = std::f64::consts::SQRT_2;
        for &z in &roots {
            let (_, prev) = hermite_function(n, z);
            // Physicists' weight exp(-z^2) / (n psi_{n-1}^2), rescaled to the N(0,1) law.
            let w = (-z * z).exp() / (nf * prev * prev) / spi;
            pairs.push((z * s2, w));
            if z != 0.0 {
                pairs.push((-z * s2, w));
            }
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
        Self { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn expect<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Orthonormal Hermite functions psi_n(z), psi_{n-1}(z) including the
/// factor exp(-z^2/2).
fn hermite_function(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = PI.powf(-0.25) * (-0.5 * z * z).exp();
    let mut p2 = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
    }
    (p1, p2)
}

fn refine_root(n: usize, mut lo: f64, mut hi: f64) -> f64 {
    let flo = hermite_function(n, lo).0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..100 {
        let (p, prev) = hermite_function(n, x);
        if p == 0.0 {
            return x;
        }
        if p.signum() == flo.signum() {
            lo = x;
        } else {
            hi = x;
        }
        // H_n' = 2n H_{n-1} in physicists' normalisation, so in orthonormal
        // form p_n' = sqrt(2n) p_{n-1}; the Gaussian factor cancels in the ratio
        // up to the -z p term, which vanishes at the root.
        let d = (2.0 * n as f64).sqrt() * prev - x * p;
        let mut next = x - p / d;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.abs().max(1.0) {
            return next;
        }
        x = next;
    }
    x
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64), QuadError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    if !fc.is_finite() {
        return Err(QuadError::NonFinite(c));
    }
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    // Outer nodes of a tiny panel can round onto an endpoint; keep them inside.
    let (lo, hi) = (a.next_up(), b.next_down());
    for j in 0..7 {
        let dx = h * XGK[j];
        let (x1, x2) = ((c - dx).max(lo), (c + dx).min(hi));
        let f1 = f(x1);
        let f2 = f(x2);
        if !f1.is_finite() {
            return Err(QuadError::NonFinite(x1));
        }
        if !f2.is_finite() {
            return Err(QuadError::NonFinite(x2));
        }
        k += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    Ok((k * h, ((k - g) * h).abs()))
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

const MAX_PANELS: usize = 4000;

/// Globally adaptive Gauss–Kronrod integration of `f` over [a, b].
///
/// Stops when the summed error estimate is below `max(abs_tol, rel_tol·|I|)`.
/// Integrable endpoint singularities are handled by repeated bisection; the
/// integrand is never evaluated at the endpoints. Bisection cannot resolve
/// a singularity finer than the float spacing at the endpoint, so place
/// singularities at 0.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Estimate, QuadError> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let (v, e) = kronrod15(&mut f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value: v, error: e });
    let mut total = v;
    let mut err = e;
    loop {
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(Estimate { value: total, error: err });
        }
        if heap.len() >= MAX_PANELS {
            return Err(QuadError::NotConverged { value: total, error: err, intervals: heap.len() });
        }
        let p = heap.pop().expect("heap is never empty here");
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            // Panel cannot be split further in floating point.
            heap.push(Panel { error: 0.0, ..p });
            err -= p.error;
            continue;
        }
        let (v1, e1) = kronrod15(&mut f, p.a, m)?;
        let (v2, e2) = kronrod15(&mut f, m, p.b)?;
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.error;
        heap.push(Panel { a: p.a, b: m, value: v1, error: e1 });
        heap.push(Panel { a: m, b: p.b, value: v2, error: e2 });
        if heap.len() % 64 == 0 {
            // Refresh the running sums to avoid drift from repeated updates.
            total = heap.iter().map(|q| q.value).sum();
            err = heap.iter().map(|q| q.error).sum();
        }
    }
}

/// Adaptive integration over [a, ∞) via the map u = a + t/(1-t).
///
/// A tail decaying like u^{-p} maps to (1-t)^{p-2} at t = 1, so p < 2
/// leaves an unresolved mass of order ε_mach^{p-1}.
pub fn adaptive_semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Estimate, QuadError> {
    adaptive(
        |t| {
            let one_minus = 1.0 - t;
            let u = a + t / one_minus;
            let g = f(u);
            if g == 0.0 {
                0.0
            } else {
                g / (one_minus * one_minus)
            }
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
    )
}

/// Geometric panel edges `lo, lo·r, lo·r², …` ending exactly at `hi`.
pub fn geometric_edges(lo: f64, hi: f64, ratio: f64) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && ratio > 1.0);
    let n = ((hi / lo).ln() / ratio.ln()).ceil().max(1.0) as usize;
    let r = (hi / lo).powf(1.0 / n as f64);
    let mut edges: Vec<f64> = (0..=n).map(|k| lo * r.powi(k as i32)).collect();
    edges[n] = hi;
    edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 24, 64] {
            let gl = GaussLegendre::new(n);
            let sum_w: f64 = gl.weights().iter().sum();
            assert_relative_eq!(sum_w, 2.0, epsilon = 1e-14);
            for deg in 0..(2 * n) {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let got = gl.integrate(|x| x.powi(deg as i32), -1.0, 1.0);
                assert!((got - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn hermite_reproduces_gaussian_moments() {
        for n in [8usize, 64, 128, 256] {
            let gh = GaussHermite::new(n);
            assert_relative_eq!(gh.expect(|_| 1.0), 1.0, epsilon = 1e-13);
            let mut double_fact = 1.0;
            for k in (2..(2 * n).min(40)).step_by(2) {
                double_fact *= (k - 1) as f64;
                let got = gh.expect(|z| z.powi(k as i32));
                assert_relative_eq!(got, double_fact, max_relative = 1e-11);
            }
            assert!(gh.expect(|z| z.powi(3)).abs() < 1e-12);
        }
    }

    #[test]
    fn hermite_expectation_of_cosine() {
        let gh = GaussHermite::new(64);
        assert_relative_eq!(gh.expect(|z| (2.0 * z).cos()), (-2.0f64).exp(), max_relative = 1e-13);
    }

    #[test]
    fn kronrod_panel_exact_for_degree_22() {
        let mut f = |x: f64| x.powi(22);
        let (v, _) = kronrod15(&mut f, -1.0, 1.0).unwrap();
        assert_relative_eq!(v, 2.0 / 23.0, max_relative = 1e-13);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let est = adaptive(|x| x.powf(-0.8), 0.0, 1.0, 1e-12, 1e-12).unwrap();
        assert_relative_eq!(est.value, 5.0, max_relative = 1e-10);
        let est = adaptive(|x| (1.0 - x).powf(0.1) * x.ln().abs(), 0.0, 1.0, 1e-13, 1e-13).unwrap();
        assert!(est.value > 0.0);
    }

    #[test]
    fn semi_infinite_exponential() {
        let est = adaptive_semi_infinite(|x| (-x).exp(), 0.0, 1e-14, 1e-14).unwrap();
        assert_relative_eq!(est.value, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn geometric_edges_cover_range() {
        let e = geometric_edges(1e-3, 10.0, 2.0);
        assert_eq!(e[0], 1e-3);
        assert_eq!(*e.last().unwrap(), 10.0);
        assert!(e.windows(2).all(|w| w[1] / w[0] <= 2.0 + 1e-12));
    }
}
