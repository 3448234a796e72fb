//! The random correction φ = ∫_t^T E[G(Z_s) | F_t] ds.

use crate::PricerError;
use fou_sampler::{ConditionalProjector, FouPath, FouSampler};
use fracvol_numerics::{GaussHermite, GaussLegendre};
use vol_model::VolFunction;

const NODES_PER_PANEL: usize = 16;
const MIN_PANELS: usize = 4;
const HERMITE_NODES: usize = 48;

/// Panel edges on [0, τ] in elapsed time: the first panel has width
/// min(ε, τ/8) and widths double after it, so nodes cluster where the
/// conditional law relaxes.
pub fn graded_edges(tau: f64, eps: f64) -> Vec<f64> {
    let mut edges = vec![0.0];
    let mut w = eps.min(tau / 8.0);
    let mut right = 0.0;
    while right < tau {
        right = (right + w).min(tau);
        edges.push(right);
        w *= 2.0;
    }
    // Avoid a sliver as the last panel.
    let n = edges.len();
    if n > 3 && edges[n - 1] - edges[n - 2] < 0.25 * (edges[n - 2] - edges[n - 3]) {
        edges.remove(n - 2);
    }
    if edges.len() - 1 < MIN_PANELS {
        return (0..=MIN_PANELS).map(|k| tau * k as f64 / MIN_PANELS as f64).collect();
    }
    edges
}

/// Quadrature nodes (elapsed times s − t) and weights over [0, τ].
///
/// The first panel uses the substitution u = v² to absorb the fractional
/// power behaviour of the conditional law at small elapsed time.
pub fn graded_nodes(tau: f64, eps: f64) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::new(NODES_PER_PANEL);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for (i, e) in graded_edges(tau, eps).windows(2).enumerate() {
        if i == 0 {
            for (v, w) in rule.mapped(0.0, e[1].sqrt()) {
                nodes.push(v * v);
                weights.push(2.0 * v * w);
            }
        } else {
            for (x, w) in rule.mapped(e[0], e[1]) {
                nodes.push(x);
                weights.push(w);
            }
        }
    }
    (nodes, weights)
}

/// φ evaluator for one sampler, conditioning time and maturity, reusable
/// across the paths of that sampler.
#[derive(Debug, Clone)]
pub struct PhiIntegrator {
    projector: ConditionalProjector,
    weights: Vec<f64>,
    rule: GaussHermite,
    t: f64,
    maturity: f64,
}

impl PhiIntegrator {
    pub fn new(sampler: &FouSampler, t: f64, maturity: f64, tol: f64) -> Result<Self, PricerError> {
        if !(maturity >= t) {
            return Err(PricerError::Invalid(format!("maturity {maturity} precedes current time {t}")));
        }
        let tau = maturity - t;
        let (nodes, weights) = if tau > 0.0 { graded_nodes(tau, sampler.model().eps) } else { (vec![], vec![]) };
        let targets: Vec<f64> = nodes.iter().map(|u| t + u).collect();
        let projector = ConditionalProjector::new(sampler, t, &targets, tol)?;
        Ok(Self { projector, weights, rule: GaussHermite::new(HERMITE_NODES), t, maturity })
    }

    pub fn conditioning_time(&self) -> f64 {
        self.t
    }

    pub fn maturity(&self) -> f64 {
        self.maturity
    }

    /// Absolute times of the s-nodes.
    pub fn targets(&self) -> &[f64] {
        self.projector.targets()
    }

    pub fn phi(&self, f: &VolFunction, path: &FouPath) -> f64 {
        self.integrate(f, &self.projector.means(path))
    }

    /// φ from raw cell increments up to the conditioning time.
    pub fn phi_from_increments(&self, f: &VolFunction, dw: &[f64]) -> f64 {
        self.integrate(f, &self.projector.means_from_increments(dw))
    }

    /// Linear part ⟨G′⟩∫ E[Z_s|F_t] ds, the Gaussian limit of φ.
    pub fn phi_linear(&self, f: &VolFunction, path: &FouPath) -> f64 {
        let means = self.projector.means(path);
        f.moments().ff_prime * means.iter().zip(&self.weights).map(|(m, w)| m * w).sum::<f64>()
    }

    fn integrate(&self, f: &VolFunction, means: &[f64]) -> f64 {
        means
            .iter()
            .zip(self.projector.stds())
            .zip(&self.weights)
            .map(|((&m, &sd), &w)| w * self.rule.expect(|z| f.g(m + sd * z)))
            .sum()
    }
}

/// φ for a single path at its grid time `t`.
pub fn phi_correction(path: &FouPath, t: f64, maturity: f64, f: &VolFunction, tol: f64) -> Result<f64, PricerError> {
    if maturity == t {
        return Ok(0.0);
    }
    let tau = maturity - t;
    if !(tau > 0.0) {
        return Err(PricerError::Invalid(format!("maturity {maturity} precedes current time {t}")));
    }
    let eps = path.model().eps;
    let (nodes, weights) = graded_nodes(tau, eps);
    let rule = GaussHermite::new(HERMITE_NODES);
    let mut phi = 0.0;
    for (u, w) in nodes.iter().zip(&weights) {
        let law = path.conditional_law_with_tolerance(t, t + u, tol)?;
        phi += w * law.expect(&rule, |x| f.g(x));
    }
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edges_cover_horizon_and_grade() {
        for &(tau, eps) in &[(1.0, 0.01), (1.0, 0.5), (0.1, 1.0), (3.0, 1e-4)] {
            let e = graded_edges(tau, eps);
            assert_eq!(e[0], 0.0);
            assert_eq!(*e.last().unwrap(), tau);
            assert!(e.len() > MIN_PANELS);
            assert!(e.windows(2).all(|w| w[1] > w[0]));
            assert!(e[1] <= eps.max(tau / 4.0) + 1e-15);
        }
    }

    #[test]
    fn nodes_integrate_power_laws() {
        let (x, w) = graded_nodes(1.0, 0.01);
        assert!(x.len() >= 64);
        let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powf(0.2)).sum();
        assert!((approx - 1.0 / 1.2).abs() < 1e-8, "{approx}");
    }
}
