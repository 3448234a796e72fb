use crate::output::Artifact;
use crate::CliError;
use fou_core::{Hurst, HurstModel};
use fou_sampler::{
    CholeskySampler, CirculantSampler, FouSampler, OuSampler, SamplerError, UniformGrid, MIN_STEPS_PER_EPS,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Upper bound on the number of paths written to one file.
pub const MAX_PATHS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Moving-average synthesis with a graded pre-history.
    #[default]
    MovingAverage,
    /// Exact joint Gaussian draw on the grid.
    Cholesky,
    /// Circulant embedding of the grid autocovariance.
    Circulant,
}

#[derive(Debug, clap::Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 0.6)]
    pub hurst: f64,
    /// Correlation time ε.
    #[arg(long, alias = "epsilon", default_value_t = 0.1)]
    pub eps: f64,
    /// Length of the sampled window [0, span].
    #[arg(long, default_value_t = 10.0)]
    pub span: f64,
    #[arg(long, default_value_t = MIN_STEPS_PER_EPS)]
    pub steps_per_eps: usize,
    #[arg(long, default_value_t = 1)]
    pub paths: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Method::MovingAverage)]
    pub method: Method,
    /// Add an ordinary OU path (H = 1/2, same ε and stream) per fOU path.
    #[arg(long)]
    pub with_ou: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub hurst: f64,
    pub eps: f64,
    pub span: f64,
    pub steps_per_eps: usize,
    pub paths: usize,
    pub seed: u64,
    pub method: Method,
    pub with_ou: bool,
}

impl SimulateArgs {
    pub fn resolve(&self) -> Result<SimulateConfig, CliError> {
        let cfg = SimulateConfig {
            hurst: self.hurst,
            eps: self.eps,
            span: self.span,
            steps_per_eps: self.steps_per_eps,
            paths: self.paths,
            seed: self.seed,
            method: self.method,
            with_ou: self.with_ou,
        };
        cfg.check()?;
        Ok(cfg)
    }
}

impl SimulateConfig {
    fn check(&self) -> Result<(HurstModel, UniformGrid), CliError> {
        Hurst::new(self.hurst).map_err(|e| CliError::field("hurst", e))?;
        let model = HurstModel::new(self.hurst, self.eps).map_err(|e| CliError::field("eps", e))?;
        if !(self.span > 0.0 && self.span.is_finite()) {
            return Err(CliError::field("span", format!("must be positive, got {}", self.span)));
        }
        if self.steps_per_eps < MIN_STEPS_PER_EPS {
            return Err(CliError::field(
                "steps-per-eps",
                format!("must be at least {MIN_STEPS_PER_EPS}, got {}", self.steps_per_eps),
            ));
        }
        if !(1..=MAX_PATHS).contains(&self.paths) {
            return Err(CliError::field("paths", format!("must lie in [1, {MAX_PATHS}], got {}", self.paths)));
        }
        let grid = UniformGrid::covering(&model, 0.0, self.span, self.steps_per_eps)
            .map_err(|e| CliError::field("span", e))?;
        Ok((model, grid))
    }
}

fn fou_paths(cfg: &SimulateConfig, model: HurstModel, grid: UniformGrid) -> Result<Vec<Vec<f64>>, SamplerError> {
    let n = cfg.paths as u64;
    Ok(match cfg.method {
        Method::MovingAverage => {
            let sampler = FouSampler::with_default_history(model, grid)?;
            (0..n).into_par_iter().map(|i| sampler.path(cfg.seed, i).z().to_vec()).collect()
        }
        Method::Cholesky => {
            let sampler = CholeskySampler::new(&model, &grid)?;
            (0..n).into_par_iter().map(|i| sampler.sample(cfg.seed, i)).collect()
        }
        Method::Circulant => {
            let sampler = CirculantSampler::new(&model, &grid)?;
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let (a, b) = sampler.sample_pair(cfg.seed, i / 2);
                    if i % 2 == 0 {
                        a
                    } else {
                        b
                    }
                })
                .collect()
        }
    })
}

pub fn execute(cfg: &SimulateConfig) -> Result<Artifact, CliError> {
    let (model, grid) = cfg.check()?;
    let paths = fou_paths(cfg, model, grid).map_err(|e| match e {
        SamplerError::TooLargeForCholesky { .. } => CliError::field("method", e),
        other => CliError::Compute(other.to_string()),
    })?;
    let ou: Vec<Vec<f64>> = if cfg.with_ou {
        let sampler = OuSampler { eps: cfg.eps, grid };
        (0..cfg.paths as u64).map(|i| sampler.sample(cfg.seed, i)).collect()
    } else {
        Vec::new()
    };
    let single = cfg.paths == 1;
    let mut columns = vec!["time".to_string()];
    for k in 0..cfg.paths {
        columns.push(if single { "z".into() } else { format!("z_{k}") });
    }
    for k in 0..ou.len() {
        columns.push(if single { "z_ou".into() } else { format!("z_ou_{k}") });
    }
    let rows = grid
        .times()
        .into_iter()
        .enumerate()
        .map(|(j, t)| std::iter::once(t).chain(paths.iter().chain(&ou).map(|p| p[j])).collect())
        .collect();
    Ok(Artifact::Csv { columns, rows })
}
