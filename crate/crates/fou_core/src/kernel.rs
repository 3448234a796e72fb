//! The moving-average kernel of the fOU process and integrals built from it.
//!
//! The unnormalised kernel k(t) = [t^α − ∫_0^t (t−s)^α e^{−s} ds]/Γ(α+1),
//! α = H − 1/2, has ∫ k² = σ_ou². The kernel K used throughout is k/σ_ou, so
//! that ∫ K² = 1 and Z^ε = σ_ou ∫ K^ε(t−s) dW_s has variance σ_ou².

use crate::Hurst;
use fracvol_numerics::quad::{adaptive, geometric_edges};
use fracvol_numerics::special::{binomial, pow_diff};

/// Switch from the convergent to the asymptotic expansion of K.
const SERIES_LIMIT: f64 = 40.0;
/// Start of the analytic tail for ∫ K².
const L2_TAIL_START: f64 = 200.0;

impl Hurst {
    /// Normalised kernel K(t) = k(t)/σ_ou for dimensionless t ≥ 0.
    pub fn kernel(&self, t: f64) -> f64 {
        self.kernel_unnormalized(t) / self.sigma_ou()
    }

    /// Unnormalised kernel k(t) for dimensionless t ≥ 0.
    ///
    /// For t ≤ 40 the positive series e^{−t} Σ t^{α+n}/((α+n) n!) / Γ(α)
    /// is summed; beyond that the asymptotic series t^{α−1} Σ (1−α)_k t^{−k} / Γ(α),
    /// whose truncation error is below e^{−40}.
    pub fn kernel_unnormalized(&self, t: f64) -> f64 {
        assert!(t >= 0.0, "kernel argument must be non-negative");
        if t == 0.0 {
            return 0.0;
        }
        let a = self.a;
        if t <= SERIES_LIMIT {
            let mut term = 1.0;
            let mut sum = 1.0 / a;
            let mut n = 0.0;
            loop {
                n += 1.0;
                term *= t / n;
                let c = term / (a + n);
                sum += c;
                if n > t && c < 1e-17 * sum {
                    break;
                }
            }
            (a * t.ln() - t).exp() * sum / self.gamma_a
        } else {
            t.powf(a - 1.0) * asymptotic_sum(a, t) / self.gamma_a
        }
    }

    /// Primitive P(x) = ∫_0^x K(t) dt of the normalised kernel.
    pub fn kernel_primitive(&self, x: f64) -> f64 {
        self.kernel_primitive_unnormalized(x) / self.sigma_ou()
    }

    /// ∫_0^x k(t) dt = x^α/Γ(α+1) − k(x).
    pub fn kernel_primitive_unnormalized(&self, x: f64) -> f64 {
        assert!(x >= 0.0, "primitive argument must be non-negative");
        if x == 0.0 {
            return 0.0;
        }
        let a = self.a;
        if x <= SERIES_LIMIT {
            // Term-wise difference of the two series, free of cancellation:
            // e^{−x} Σ_{n≥1} x^{α+n} / ((n−1)! (α+n)) / Γ(α+1).
            let mut u = x;
            let mut sum = x / (a + 1.0);
            let mut n = 1.0;
            loop {
                u *= x / n;
                n += 1.0;
                let c = u / (a + n);
                sum += c;
                if n > x && c < 1e-17 * sum {
                    break;
                }
            }
            (a * x.ln() - x).exp() * sum / self.gamma_a1
        } else {
            x.powf(a) / self.gamma_a1 - self.kernel_unnormalized(x)
        }
    }

    /// K(t) from the defining formula of k by adaptive quadrature, with the
    /// endpoint singularity of (t−s)^α removed by v = (t−s)^{α+1}.
    pub fn kernel_by_quadrature(&self, t: f64) -> f64 {
        assert!(t >= 0.0);
        if t == 0.0 {
            return 0.0;
        }
        let a = self.a;
        let p = a + 1.0;
        let vmax = t.powf(p);
        let f = |v: f64| (-(t - v.powf(1.0 / p))).exp() / p;
        // e^{−s} has decayed by s = 40; split there so the adaptive rule sees
        // the boundary layer in its own panel.
        let split = (t - t.min(SERIES_LIMIT)).powf(p);
        let mut total = 0.0;
        for (lo, hi) in [(0.0, split), (split, vmax)] {
            if hi > lo {
                total += adaptive(f, lo, hi, 0.0, 1e-15).map(|e| e.value).unwrap_or_else(|e| match e {
                    fracvol_numerics::QuadError::NotConverged { value, .. } => value,
                    other => panic!("{other}"),
                });
            }
        }
        (t.powf(a) - total) / self.gamma_a1 / self.sigma_ou()
    }

    /// ∫_0^x K(u)² du.
    pub fn kernel_l2_head(&self, x: f64) -> f64 {
        assert!(x >= 0.0);
        if x == 0.0 {
            return 0.0;
        }
        self.kernel_sq_integral(0.0, x)
    }

    /// ∫_L^∞ K(u)² du: quadrature up to 200 plus an analytic tail from the
    /// asymptotic expansion of K.
    pub fn kernel_l2_tail(&self, l: f64) -> f64 {
        assert!(l >= 0.0);
        if l >= L2_TAIL_START {
            return self.kernel_sq_asymptotic_tail(l);
        }
        self.kernel_sq_integral(l, L2_TAIL_START) + self.kernel_sq_asymptotic_tail(L2_TAIL_START)
    }

    fn kernel_sq_integral(&self, lo: f64, hi: f64) -> f64 {
        let mut edges = vec![lo];
        if lo < 1.0 && hi > 1.0 {
            edges.push(1.0);
        }
        let start = *edges.last().unwrap();
        if hi > start.max(1.0) {
            let g = geometric_edges(start.max(1.0), hi, 2.0);
            edges.extend(g.into_iter().skip(if start >= 1.0 { 1 } else { 0 }));
        } else {
            edges.push(hi);
        }
        edges.dedup();
        edges
            .windows(2)
            .map(|e| {
                adaptive(|u| self.kernel(u).powi(2), e[0], e[1], 1e-17, 1e-14)
                    .expect("K^2 is smooth away from 0 and integrable at 0")
                    .value
            })
            .sum()
    }

    fn kernel_sq_asymptotic_tail(&self, m: f64) -> f64 {
        let a = self.a;
        let n_terms = 40;
        let mut c = vec![1.0; n_terms];
        for k in 1..n_terms {
            c[k] = c[k - 1] * (k as f64 - a);
        }
        let mut total = 0.0;
        for n in 0..n_terms {
            let d: f64 = (0..=n).map(|j| c[j] * c[n - j]).sum();
            let p = 2.0 * a - 1.0 - n as f64;
            let term = d * m.powf(p) / -p;
            total += term;
            if term.abs() < 1e-18 * total.abs() {
                break;
            }
        }
        total / (self.gamma_a * self.gamma_a * self.sigma_ou_sq())
    }

    /// ∫_0^∞ ((1+u)^α − u^α)² du by quadrature with a binomial-series tail.
    pub fn increment_l2(&self) -> f64 {
        let a = self.a;
        let f = |u: f64| pow_diff(u, 1.0, a).powi(2);
        let upper = 1.0e3;
        let mut total = adaptive(f, 0.0, 1.0, 1e-17, 1e-15).expect("smooth").value;
        for e in geometric_edges(1.0, upper, 2.0).windows(2) {
            total += adaptive(f, e[0], e[1], 1e-17, 1e-15).expect("smooth").value;
        }
        // (1+u)^α − u^α = u^α Σ_{j≥1} C(α,j) u^{−j}; square and integrate.
        let nmax = 30;
        let b: Vec<f64> = (0..=nmax).map(|j| binomial(a, j)).collect();
        for n in 2..=nmax {
            let d: f64 = (1..n).map(|j| b[j] * b[n - j]).sum();
            let p = 2.0 * a - n as f64 + 1.0;
            total += d * upper.powf(p) / -p;
        }
        total
    }
}

fn asymptotic_sum(a: f64, t: f64) -> f64 {
    let mut term: f64 = 1.0;
    let mut sum: f64 = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        let next = term * (k - a) / t;
        if next.abs() >= term.abs() || next.abs() < 1e-18 * sum.abs() {
            break;
        }
        term = next;
        sum += term;
    }
    sum
}
