//! Conditional forward simulation of the factor and the asset.

use crate::{MCConfig, McError};
use asymptotic_pricer::{MarketState, OptionSpec};
use fou_core::HurstModel;
use fou_sampler::{path_rng, CausalConvolver, FouPath, FouSampler, UniformGrid};
use fracvol_numerics::stats::Moments;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use vol_model::VolFunction;

/// Mean payoff with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    /// Independent samples (antithetic pairs count once).
    pub n_samples: usize,
    pub warnings: Vec<String>,
}

impl McEstimate {
    pub(crate) fn from_samples(samples: &[f64], warnings: Vec<String>) -> Self {
        // Sequential accumulation keeps the result independent of the worker count.
        let m: Moments = samples.iter().copied().collect();
        Self { estimate: m.mean(), stderr: m.std_error(), n_samples: samples.len(), warnings }
    }
}

/// Factor dynamics on [t, T] given the noise up to t: the known part of
/// Z on the forward grid plus the filter for fresh grid increments.
#[derive(Clone)]
pub struct Forward {
    model: HurstModel,
    known: Vec<f64>,
    filter: CausalConvolver,
    dt: f64,
    n_steps: usize,
}

impl Forward {
    /// Forward grid from `t` to `maturity` with steps of at most `max_dt`.
    pub fn new(path: &FouPath, t: f64, maturity: f64, max_dt: f64) -> Result<Self, McError> {
        let tau = maturity - t;
        if !(tau > 0.0 && max_dt > 0.0) {
            return Err(McError::Invalid(format!("need t < T and a positive step, got t = {t}, T = {maturity}")));
        }
        let n_steps = ((tau / max_dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let dt = tau / n_steps as f64;
        let model = *path.model();
        let (cells, prior) = path.cells_until(t)?;
        let grid = UniformGrid::new(t, dt, n_steps + 1)?;
        let sampler = FouSampler::with_history_cells_at(model, grid, cells, 1)?;
        let mut dw = prior;
        dw.resize(sampler.n_cells(), 0.0);
        let known = sampler.path_from_increments(dw)?.z().to_vec();
        Ok(Self { model, known, filter: sampler.grid_filter().clone(), dt, n_steps })
    }

    pub fn model(&self) -> &HurstModel {
        &self.model
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Terminal log-returns ln(X_T/X_t) of sample `index` and of its
    /// antithetic partner, driven by stream `index` of `seed`.
    pub fn log_returns(&self, f: &VolFunction, rho: f64, seed: u64, index: u64) -> (f64, f64) {
        let n = self.n_steps;
        let mut rng = path_rng(seed, index);
        let sd = self.dt.sqrt();
        let dw: Vec<f64> = (0..n).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect();
        let db: Vec<f64> = (0..n).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect();
        let fresh = self.filter.apply(&dw);
        let rho_perp = (1.0 - rho * rho).max(0.0).sqrt();
        let (mut up, mut down) = (0.0, 0.0);
        for k in 0..n {
            let (zp, zm) = if k == 0 {
                (self.known[0], self.known[0])
            } else {
                (self.known[k] + fresh[k - 1], self.known[k] - fresh[k - 1])
            };
            let shock = rho * dw[k] + rho_perp * db[k];
            let (sp, sm) = (f.evaluate(zp), f.evaluate(zm));
            up += -0.5 * sp * sp * self.dt + sp * shock;
            down += -0.5 * sm * sm * self.dt - sm * shock;
        }
        (up, down)
    }

    /// Per-sample discounted payoffs (zero rate), in sample order.
    #[allow(clippy::too_many_arguments)]
    pub fn payoff_samples(
        &self,
        x: f64,
        option: &OptionSpec,
        f: &VolFunction,
        rho: f64,
        n: usize,
        seed: u64,
        antithetic: bool,
    ) -> Vec<f64> {
        (0..n as u64)
            .into_par_iter()
            .map(|i| {
                let (a, b) = self.log_returns(f, rho, seed, i);
                let pa = option.payoff_at(x * a.exp());
                if antithetic {
                    0.5 * (pa + option.payoff_at(x * b.exp()))
                } else {
                    pa
                }
            })
            .collect()
    }
}

/// Monte Carlo estimate of E[h(X_T) | F_t] on a precomputed forward.
pub fn mc_price_on(
    forward: &Forward,
    x: f64,
    option: &OptionSpec,
    f: &VolFunction,
    rho: f64,
    cfg: &MCConfig,
) -> Result<McEstimate, McError> {
    let warnings = cfg.validate()?;
    let samples = forward.payoff_samples(x, option, f, rho, cfg.n_paths, cfg.seed, cfg.antithetic);
    Ok(McEstimate::from_samples(&samples, warnings))
}

/// Monte Carlo price of `option` conditional on the factor history in `state`.
pub fn mc_price(
    state: &MarketState,
    option: &OptionSpec,
    f: &VolFunction,
    model: &HurstModel,
    cfg: &MCConfig,
) -> Result<McEstimate, McError> {
    let warnings = cfg.validate()?;
    state.validate()?;
    option.validate()?;
    if state.path.model() != model {
        return Err(McError::Invalid("path was sampled under a different model".into()));
    }
    if option.maturity == state.t {
        return Ok(McEstimate { estimate: option.payoff_at(state.x), stderr: 0.0, n_samples: cfg.n_paths, warnings });
    }
    let forward = Forward::new(state.path, state.t, option.maturity, model.eps / cfg.steps_per_eps as f64)?;
    mc_price_on(&forward, state.x, option, f, state.rho, cfg)
}
