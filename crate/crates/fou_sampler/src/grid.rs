use crate::SamplerError;
use fou_core::HurstModel;

/// Uniform observation grid t0, t0 + dt, …, t0 + (n−1)·dt in calendar time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub t0: f64,
    pub dt: f64,
    pub n: usize,
}

impl UniformGrid {
    pub fn new(t0: f64, dt: f64, n: usize) -> Result<Self, SamplerError> {
        if n == 0 {
            return Err(SamplerError::BadGrid("grid needs at least one point".into()));
        }
        if !t0.is_finite() {
            return Err(SamplerError::BadGrid(format!("start time {t0} is not finite")));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SamplerError::BadGrid(format!("spacing {dt} must be positive")));
        }
        Ok(Self { t0, dt, n })
    }

    /// A grid consisting of the single time `t0`, carrying only pre-history.
    pub fn single(t0: f64) -> Self {
        Self { t0, dt: 1.0, n: 1 }
    }

    /// Grid covering [t0, t0 + span] with spacing eps/steps_per_eps.
    pub fn covering(model: &HurstModel, t0: f64, span: f64, steps_per_eps: usize) -> Result<Self, SamplerError> {
        let dt = model.eps / steps_per_eps as f64;
        let n = (span / dt).round() as usize + 1;
        Self::new(t0, dt, n)
    }

    pub fn time(&self, j: usize) -> f64 {
        self.t0 + self.dt * j as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.time(j)).collect()
    }

    pub fn end(&self) -> f64 {
        self.time(self.n - 1)
    }

    /// Index of the grid time within 1e-9·dt of `t`.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let x = (t - self.t0) / self.dt;
        let j = x.round();
        if j < 0.0 || j as usize >= self.n || (x - j).abs() > 1e-9 {
            None
        } else {
            Some(j as usize)
        }
    }

    pub(crate) fn check_resolution(&self, model: &HurstModel, min_steps_per_eps: usize) -> Result<(), SamplerError> {
        let limit = model.eps / min_steps_per_eps as f64;
        if self.n > 1 && self.dt > limit * (1.0 + 1e-12) {
            return Err(SamplerError::GridTooCoarse { dt: self.dt, limit });
        }
        Ok(())
    }
}
