use fracvol_numerics::special::ln_gamma;
use fracvol_numerics::{GaussHermite, GaussLegendre};
use std::f64::consts::PI;

/// Hermite coefficients C_k = E[He_k(Z) f(Z)], stored as C_k/√k! to stay finite.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteCoefficients {
    normalized: Vec<f64>,
}

impl HermiteCoefficients {
    pub fn k_max(&self) -> usize {
        self.normalized.len() - 1
    }

    /// C_k/√k!.
    pub fn normalized(&self) -> &[f64] {
        &self.normalized
    }

    /// C_k itself, via log-space scaling by √k!.
    pub fn coefficient(&self, k: usize) -> f64 {
        self.normalized[k] * (0.5 * ln_gamma(k as f64 + 1.0)).exp()
    }

    /// C_k²/k!.
    pub fn energy(&self, k: usize) -> f64 {
        self.normalized[k].powi(2)
    }

    /// Σ C_k²/k!, which tends to E[f(Z)²].
    pub fn parseval_sum(&self) -> f64 {
        self.normalized.iter().map(|c| c * c).sum()
    }

    /// Least-squares ratio r in C_k²/k! ≈ A·r^k over the coefficients in
    /// `ks` that exceed `floor` (exact zeros from symmetry are skipped).
    pub fn geometric_ratio(&self, ks: impl IntoIterator<Item = usize>, floor: f64) -> Option<f64> {
        let (x, y): (Vec<f64>, Vec<f64>) =
            ks.into_iter().filter(|&k| self.energy(k) > floor).map(|k| (k as f64, self.energy(k).ln())).unzip();
        if x.len() < 2 {
            return None;
        }
        Some(fracvol_numerics::stats::fit_line(&x, &y).slope.exp())
    }
}

/// Normalised probabilists' Hermite values He_k(z)/√k! for k = 0..=k_max.
fn normalized_hermite(z: f64, k_max: usize, out: &mut [f64]) {
    out[0] = 1.0;
    if k_max >= 1 {
        out[1] = z;
    }
    for k in 1..k_max {
        out[k + 1] = (z * out[k] - (k as f64).sqrt() * out[k - 1]) / ((k + 1) as f64).sqrt();
    }
}

fn accumulate(nodes: impl Iterator<Item = (f64, f64)>, f: impl Fn(f64) -> f64, k_max: usize) -> HermiteCoefficients {
    let mut acc = vec![0.0; k_max + 1];
    let mut h = vec![0.0; k_max + 1];
    for (z, w) in nodes {
        let fz = f(z) * w;
        normalized_hermite(z, k_max, &mut h);
        for (a, hk) in acc.iter_mut().zip(&h) {
            *a += fz * hk;
        }
    }
    HermiteCoefficients { normalized: acc }
}

/// Hermite coefficients of a smooth `f` by a 200-node Gauss–Hermite rule.
pub fn hermite_coefficients_of<F: Fn(f64) -> f64>(f: F, k_max: usize) -> HermiteCoefficients {
    let rule = GaussHermite::new(200);
    accumulate(rule.nodes().iter().copied().zip(rule.weights().iter().copied()), f, k_max)
}

/// Hermite coefficients of a piecewise-smooth `f` by panel Gauss–Legendre
/// against the normal density.
pub(crate) fn coefficients_by_panels<F: Fn(f64) -> f64>(f: F, k_max: usize, edges: &[f64]) -> HermiteCoefficients {
    let rule = GaussLegendre::new(16);
    let nodes: Vec<(f64, f64)> = edges
        .windows(2)
        .flat_map(|e| rule.mapped(e[0], e[1]).collect::<Vec<_>>())
        .map(|(z, w)| (z, w * (-0.5 * z * z).exp() / (2.0 * PI).sqrt()))
        .collect();
    accumulate(nodes.into_iter(), f, k_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_hermite_polynomial_is_its_own_expansion() {
        let c = hermite_coefficients_of(|z| z * z - 1.0, 12);
        for k in 0..=12 {
            let want = if k == 2 { 2f64.sqrt() } else { 0.0 };
            assert!((c.normalized()[k] - want).abs() < 1e-13, "k={k}: {}", c.normalized()[k]);
        }
    }

    #[test]
    fn exponential_has_unit_coefficients() {
        // e^{z−1/2} = Σ He_k(z)/k!, so C_k = 1 for every k.
        let c = hermite_coefficients_of(|z| (z - 0.5).exp(), 30);
        for k in 0..=30 {
            let want = (-0.5 * ln_gamma(k as f64 + 1.0)).exp();
            assert!((c.normalized()[k] - want).abs() < 1e-13, "k={k}");
        }
        assert!((c.coefficient(5) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn panel_rule_agrees_with_gauss_hermite() {
        let edges: Vec<f64> = (0..=240).map(|i| -12.0 + 0.1 * i as f64).collect();
        let a = coefficients_by_panels(|z: f64| z.tanh(), 20, &edges);
        let b = hermite_coefficients_of(|z: f64| z.tanh(), 20);
        for k in 0..=20 {
            assert!((a.normalized()[k] - b.normalized()[k]).abs() < 1e-10);
        }
    }
}
