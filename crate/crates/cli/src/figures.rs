//! Figure presets. Figure 1 is an fOU path beside an OU path and figure 2
//! their correlation functions; 3 to 6 are the price and implied-volatility
//! corrections; 7 to 13 are t-T field curves and realisations.

use crate::correction::CorrectionConfig;
use crate::field::{FieldConfig, FieldOutput, Mode};
use crate::output::Artifact;
use crate::simulate::{Method, SimulateConfig};
use crate::{CliError, Job};
use fou_core::Hurst;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, clap::Args)]
pub struct FigureArgs {
    /// Figure number, 1 to 13.
    #[arg(long)]
    pub fig: u8,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A figure number with the job that produces its data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureJob {
    pub fig: u8,
    pub seed: u64,
    pub job: Box<Job>,
}

/// C_Z at dimensionless lags beside the OU correlation e^{−s}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationConfig {
    pub hurst: f64,
    pub s_max: f64,
    pub n: usize,
}

pub fn correlation(cfg: &CorrelationConfig) -> Result<Artifact, CliError> {
    let hurst = Hurst::new(cfg.hurst).map_err(|e| CliError::field("hurst", e))?;
    if !(cfg.s_max > 0.0 && cfg.s_max.is_finite()) || cfg.n < 2 {
        return Err(CliError::field("s_max", "need a positive range and at least two points"));
    }
    let rows = (0..cfg.n)
        .map(|k| {
            let s = cfg.s_max * k as f64 / (cfg.n - 1) as f64;
            vec![s, hurst.correlation(s), (-s).exp()]
        })
        .collect();
    Ok(Artifact::Csv { columns: vec!["s".into(), "c_fou".into(), "c_ou".into()], rows })
}

fn field(mode: Mode, output: FieldOutput, grid_size: usize, seed: u64) -> FieldConfig {
    FieldConfig { mode, output, grid_size, seed, ..FieldConfig::default() }
}

pub fn job(fig: u8, seed: u64) -> Result<Job, CliError> {
    let inner = match fig {
        1 => Job::Simulate(SimulateConfig {
            hurst: 0.6,
            eps: 1.0,
            span: 10.0,
            steps_per_eps: 20,
            paths: 1,
            seed,
            method: Method::Cholesky,
            with_ou: true,
        }),
        2 => Job::Correlation(CorrelationConfig { hurst: 0.6, s_max: 10.0, n: 201 }),
        3..=6 => Job::Ivsurface(CorrectionConfig::preset(fig).expect("preset exists")),
        7 => Job::Ttfield(field(Mode::FixedMaturity, FieldOutput::Curve, 401, seed)),
        8 => Job::Ttfield(field(Mode::FixedMaturity, FieldOutput::Realization, 512, seed)),
        9 => Job::Ttfield(field(Mode::FixedTtm, FieldOutput::Curve, 401, seed)),
        10 => Job::Ttfield(FieldConfig {
            log_scale: true,
            delta_min: 1e-2,
            delta_max: 1e3,
            ..field(Mode::FixedTtm, FieldOutput::Curve, 201, seed)
        }),
        11 => Job::Ttfield(field(Mode::FixedTtm, FieldOutput::Realization, 512, seed)),
        12 => Job::Ttfield(field(Mode::FixedTime, FieldOutput::Realization, 512, seed)),
        13 => Job::Ttfield(field(Mode::FixedTime, FieldOutput::Curve, 401, seed)),
        _ => return Err(CliError::field("fig", format!("figures are numbered 1 to 13, got {fig}"))),
    };
    Ok(Job::Figures(FigureJob { fig, seed, job: Box::new(inner) }))
}
