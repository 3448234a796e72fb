//! Correlation curves and Gaussian realisations of the t-T correction field.

use crate::output::Artifact;
use crate::CliError;
use fou_core::Hurst;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use tt_field::{
    corr_fixed_maturity, corr_fixed_time, corr_fixed_ttm, corr_fixed_ttm_tail, cphi, sample_field, TTCovarianceGrid,
};

/// Largest realisation grid along one axis.
pub const MAX_GRID: usize = 1024;
/// Largest free-mode lattice side; the lattice has side² points.
pub const MAX_FREE_SIDE: usize = 32;
/// Distance from ±1 of the outermost fixed-maturity separations.
const BOUNDARY_GAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// ψ_1: fixed maturity T, varying time to maturity.
    #[default]
    FixedMaturity,
    /// ψ_2: fixed time to maturity τ, varying current time.
    FixedTtm,
    /// ψ_3: fixed current time t, varying time to maturity.
    FixedTime,
    /// The field on a (t, τ) lattice.
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FieldOutput {
    #[default]
    Curve,
    Realization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub mode: Mode,
    pub output: FieldOutput,
    pub hurst: f64,
    pub grid_size: usize,
    pub seed: u64,
    /// Number of independent realisations.
    pub draws: usize,
    /// T of the fixed-maturity mode.
    pub maturity: f64,
    /// τ of the fixed-time-to-maturity mode.
    pub tau: f64,
    /// Current-time window [0, span] of the fixed-ttm and free modes.
    pub span: f64,
    /// t of the fixed-time mode.
    pub t: f64,
    /// Time-to-maturity window (0, max_tau] of the fixed-time and free modes.
    pub max_tau: f64,
    /// Largest separation Δ on fixed-ttm and fixed-time curves.
    pub delta_max: f64,
    /// Smallest separation on log-spaced curves.
    pub delta_min: f64,
    /// Log-spaced separations with the large-Δ asymptote alongside (fixed-ttm).
    pub log_scale: bool,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self {
            mode: Mode::FixedMaturity,
            output: FieldOutput::Curve,
            hurst: 0.6,
            grid_size: 512,
            seed: 1,
            draws: 1,
            maturity: 1.0,
            tau: 1.0,
            span: 10.0,
            t: 1.0,
            max_tau: 1.0,
            delta_max: 10.0,
            delta_min: 1e-2,
            log_scale: false,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct FieldArgs {
    #[arg(long, value_enum, default_value_t = Mode::FixedMaturity)]
    pub mode: Mode,
    /// Correlation curve or realisation.
    #[arg(long = "output", value_enum, default_value_t = FieldOutput::Curve)]
    pub output: FieldOutput,
    #[arg(long, default_value_t = 0.6)]
    pub hurst: f64,
    #[arg(long, default_value_t = 512)]
    pub grid_size: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub draws: usize,
    #[arg(long, default_value_t = 1.0)]
    pub maturity: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 10.0)]
    pub span: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 1.0)]
    pub max_tau: f64,
    #[arg(long, default_value_t = 10.0)]
    pub delta_max: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub delta_min: f64,
    #[arg(long)]
    pub log_scale: bool,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl FieldArgs {
    pub fn resolve(&self) -> Result<FieldConfig, CliError> {
        let cfg = FieldConfig {
            mode: self.mode,
            output: self.output,
            hurst: self.hurst,
            grid_size: self.grid_size,
            seed: self.seed,
            draws: self.draws,
            maturity: self.maturity,
            tau: self.tau,
            span: self.span,
            t: self.t,
            max_tau: self.max_tau,
            delta_max: self.delta_max,
            delta_min: self.delta_min,
            log_scale: self.log_scale,
        };
        cfg.check()?;
        Ok(cfg)
    }
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::field(name, format!("must be positive and finite, got {v}")))
    }
}

impl FieldConfig {
    fn check(&self) -> Result<Hurst, CliError> {
        let hurst = Hurst::new(self.hurst).map_err(|e| CliError::field("hurst", e))?;
        let limit = if self.mode == Mode::Free { MAX_FREE_SIDE } else { MAX_GRID };
        if !(2..=limit).contains(&self.grid_size) {
            return Err(CliError::field(
                "grid-size",
                format!("must lie in [2, {limit}] for this mode, got {}", self.grid_size),
            ));
        }
        if self.draws == 0 || self.draws > 1000 {
            return Err(CliError::field("draws", format!("must lie in [1, 1000], got {}", self.draws)));
        }
        positive("maturity", self.maturity)?;
        positive("tau", self.tau)?;
        positive("span", self.span)?;
        positive("max-tau", self.max_tau)?;
        positive("delta-max", self.delta_max)?;
        positive("delta-min", self.delta_min)?;
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(CliError::field("t", format!("must be non-negative, got {}", self.t)));
        }
        if self.log_scale && self.delta_min >= self.delta_max {
            return Err(CliError::field("delta-min", "must be below delta-max"));
        }
        Ok(hurst)
    }

    fn separations(&self, lo: f64) -> Vec<f64> {
        let n = self.grid_size;
        if self.log_scale {
            let (a, b) = (self.delta_min.log10(), self.delta_max.log10());
            (0..n).map(|k| 10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64)).collect()
        } else {
            (0..n).map(|k| lo + (self.delta_max - lo) * k as f64 / (n - 1) as f64).collect()
        }
    }

    /// (t, T) lattice of the free mode, t-major.
    fn lattice(&self) -> Vec<(f64, f64)> {
        let n = self.grid_size;
        let mut coords = Vec::with_capacity(n * n);
        for i in 0..n {
            let t = self.span * i as f64 / (n - 1) as f64;
            for j in 1..=n {
                coords.push((t, t + self.max_tau * j as f64 / n as f64));
            }
        }
        coords
    }
}

fn curve(cfg: &FieldConfig, hurst: &Hurst) -> Result<Artifact, CliError> {
    let n = cfg.grid_size;
    let pairs = |xs: Vec<f64>, f: &dyn Fn(f64) -> Result<f64, CliError>| -> Result<Vec<Vec<f64>>, CliError> {
        xs.into_iter().map(|x| Ok(vec![x, f(x)?])).collect()
    };
    let cols = |names: &[&str]| names.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    Ok(match cfg.mode {
        Mode::FixedMaturity => {
            let edge = 1.0 - BOUNDARY_GAP;
            let deltas = (0..n).map(|k| -edge + 2.0 * edge * k as f64 / (n - 1) as f64).collect();
            let rows = pairs(deltas, &|d| Ok(corr_fixed_maturity(d, hurst)?))?;
            Artifact::Csv { columns: cols(&["delta", "correlation"]), rows }
        }
        Mode::FixedTtm if cfg.log_scale => {
            let rows = cfg
                .separations(0.0)
                .into_iter()
                .map(|d| vec![d, corr_fixed_ttm(d, hurst), corr_fixed_ttm_tail(d, hurst)])
                .collect();
            Artifact::Csv { columns: cols(&["delta", "correlation", "reference"]), rows }
        }
        Mode::FixedTtm => {
            let rows = pairs(cfg.separations(0.0), &|d| Ok(corr_fixed_ttm(d, hurst)))?;
            Artifact::Csv { columns: cols(&["delta", "correlation"]), rows }
        }
        Mode::FixedTime => {
            let rows = pairs(cfg.separations(0.0), &|d| Ok(corr_fixed_time(d, hurst)))?;
            Artifact::Csv { columns: cols(&["delta", "correlation"]), rows }
        }
        Mode::Free => {
            let (t0, maturity0) = (0.0, cfg.max_tau);
            let rows = cfg
                .lattice()
                .into_iter()
                .map(|(t, m)| Ok(vec![t, m, cphi(t0, t, maturity0, m, hurst)?]))
                .collect::<Result<_, CliError>>()?;
            Artifact::Csv { columns: cols(&["t", "maturity", "correlation"]), rows }
        }
    })
}

fn realization(cfg: &FieldConfig, hurst: Hurst) -> Result<Artifact, CliError> {
    let n = cfg.grid_size;
    let (grid, lead): (TTCovarianceGrid, Vec<&str>) = match cfg.mode {
        Mode::FixedMaturity => (TTCovarianceGrid::fixed_maturity(cfg.maturity, n, hurst)?, vec!["tau"]),
        Mode::FixedTtm => (TTCovarianceGrid::fixed_ttm(cfg.tau, cfg.span, n, hurst)?, vec!["t"]),
        Mode::FixedTime => (TTCovarianceGrid::fixed_time(cfg.t, cfg.max_tau, n, hurst)?, vec!["tau"]),
        Mode::Free => (TTCovarianceGrid::new(cfg.lattice(), hurst)?, vec!["t", "maturity"]),
    };
    let samples = sample_field(&grid, cfg.draws, cfg.seed)?;
    let mut columns: Vec<String> = lead.iter().map(|s| s.to_string()).collect();
    if cfg.draws == 1 {
        columns.push("psi".into());
    } else {
        columns.extend((0..cfg.draws).map(|k| format!("psi_{k}")));
    }
    let rows = grid
        .coords()
        .iter()
        .enumerate()
        .map(|(i, &(t, m))| {
            let head = match cfg.mode {
                Mode::FixedMaturity | Mode::FixedTime => vec![m - t],
                Mode::FixedTtm => vec![t],
                Mode::Free => vec![t, m],
            };
            head.into_iter().chain(samples.draws.iter().map(|d| d[i])).collect()
        })
        .collect();
    Ok(Artifact::Csv { columns, rows })
}

pub fn execute(cfg: &FieldConfig) -> Result<Artifact, CliError> {
    let hurst = cfg.check()?;
    match cfg.output {
        FieldOutput::Curve => curve(cfg, &hurst),
        FieldOutput::Realization => realization(cfg, hurst),
    }
}
