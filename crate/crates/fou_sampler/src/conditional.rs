use crate::sampler::{cell_weight, Layout};
use crate::{FouPath, FouSampler, SamplerError};
use std::sync::Arc;

/// Default admissible tail-variance fraction of the retained history.
pub const DEFAULT_TOLERANCE: f64 = 1e-4;

/// Gaussian law of Z_s given the path up to a grid time t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalLaw {
    pub mean: f64,
    pub std: f64,
}

impl ConditionalLaw {
    /// E[g(Z_s) | F_t] by the given Gauss–Hermite rule.
    pub fn expect<G: FnMut(f64) -> f64>(&self, rule: &fracvol_numerics::GaussHermite, mut g: G) -> f64 {
        rule.expect(|x| g(self.mean + self.std * x))
    }
}

fn conditional_std(layout: &Layout, lag: f64) -> f64 {
    let m = &layout.model;
    m.sigma_ou() * m.hurst.kernel_l2_head(lag / m.eps).sqrt()
}

fn check_history(layout: &Layout, t: f64, tol: f64) -> Result<(), SamplerError> {
    let m = &layout.model;
    let tail = m.hurst.kernel_l2_tail((t - layout.history.start()) / m.eps);
    if tail > tol {
        return Err(SamplerError::HistoryTooShort { span: t - layout.history.start(), tail, tol });
    }
    Ok(())
}

fn locate(layout: &Layout, t: f64, s: f64) -> Result<usize, SamplerError> {
    let j = layout.grid.index_of(t).ok_or(SamplerError::NotGridTime { t })?;
    if s < t {
        return Err(SamplerError::TargetBeforeConditioning { t, s });
    }
    Ok(j)
}

impl FouPath {
    /// Law of Z_s given the path up to grid time t, with the default history tolerance.
    pub fn conditional_law(&self, t: f64, s: f64) -> Result<ConditionalLaw, SamplerError> {
        self.conditional_law_with_tolerance(t, s, DEFAULT_TOLERANCE)
    }

    pub fn conditional_law_with_tolerance(&self, t: f64, s: f64, tol: f64) -> Result<ConditionalLaw, SamplerError> {
        let l = &self.layout;
        let j = locate(l, t, s)?;
        if l.n_cells() == 0 {
            return Err(SamplerError::NoNoise);
        }
        check_history(l, t, tol)?;
        let dw = self.increments();
        let mean = (0..l.cells_up_to(j)).map(|c| cell_weight(&l.model, s, l.left(c), l.right[c]) * dw[c]).sum();
        Ok(ConditionalLaw { mean, std: conditional_std(l, s - t) })
    }
}

/// Precomputed conditional weights for a fixed conditioning time and a
/// fixed set of target times, reusable across all paths of one sampler.
#[derive(Debug, Clone)]
pub struct ConditionalProjector {
    layout: Arc<Layout>,
    n_used: usize,
    targets: Vec<f64>,
    /// Row-major (target × used cell) weights.
    weights: Vec<f64>,
    stds: Vec<f64>,
}

impl ConditionalProjector {
    pub fn new(sampler: &FouSampler, t: f64, targets: &[f64], tol: f64) -> Result<Self, SamplerError> {
        let layout = Arc::clone(sampler.layout());
        let mut j = 0;
        for &s in targets {
            j = locate(&layout, t, s)?;
        }
        if targets.is_empty() {
            j = layout.grid.index_of(t).ok_or(SamplerError::NotGridTime { t })?;
        }
        if layout.n_cells() == 0 {
            return Err(SamplerError::NoNoise);
        }
        check_history(&layout, t, tol)?;
        let n_used = layout.cells_up_to(j);
        let mut weights = Vec::with_capacity(targets.len() * n_used);
        for &s in targets {
            weights.extend((0..n_used).map(|c| cell_weight(&layout.model, s, layout.left(c), layout.right[c])));
        }
        let stds = targets.iter().map(|&s| conditional_std(&layout, s - t)).collect();
        Ok(Self { layout, n_used, targets: targets.to_vec(), weights, stds })
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn stds(&self) -> &[f64] {
        &self.stds
    }

    /// Conditional means for the given path, which must come from the same sampler.
    pub fn means(&self, path: &FouPath) -> Vec<f64> {
        assert!(Arc::ptr_eq(&self.layout, &path.layout), "path comes from a different sampler");
        self.means_from_increments(&path.increments()[..self.n_used])
    }

    /// Conditional means for raw cell increments up to the conditioning time.
    pub fn means_from_increments(&self, dw: &[f64]) -> Vec<f64> {
        let dw = &dw[..self.n_used];
        if self.n_used == 0 {
            return vec![0.0; self.targets.len()];
        }
        self.weights.chunks(self.n_used).map(|row| row.iter().zip(dw).map(|(w, x)| w * x).sum()).collect()
    }

    pub fn laws(&self, path: &FouPath) -> Vec<ConditionalLaw> {
        self.means(path).into_iter().zip(&self.stds).map(|(mean, &std)| ConditionalLaw { mean, std }).collect()
    }
}
