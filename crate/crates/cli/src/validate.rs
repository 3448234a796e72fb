use crate::config::{OptionKind, RunConfig};
use crate::output::Artifact;
use crate::price::RunOverrides;
use crate::CliError;
use mc_oracle::{convergence_study, moment_study, LadderMarket};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, clap::Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub run: RunOverrides,
    /// Comma-separated, geometric and decreasing ε values.
    #[arg(long, value_delimiter = ',')]
    pub eps_ladder: Option<Vec<f64>>,
    /// Monte Carlo paths per rung (antithetic pairs count twice).
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub steps_per_eps: Option<usize>,
    /// Plain sampling instead of antithetic pairs.
    #[arg(long)]
    pub no_antithetic: bool,
    /// Also run the φ-statistics and fourth-moment study.
    #[arg(long)]
    pub moments: bool,
    /// JSON output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A run configuration for a single option plus the study switches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateConfig {
    pub run: RunConfig,
    pub moments: bool,
}

impl ValidateArgs {
    pub fn resolve(&self) -> Result<ValidateConfig, CliError> {
        let mut run = self.run.apply()?;
        // The put carries the same correction as the call at much lower Monte Carlo variance.
        if self.run.config.is_none() && self.run.kind.is_none() {
            run.options.kind = OptionKind::Put;
        }
        if let Some(v) = &self.eps_ladder {
            run.mc.eps_ladder = v.clone();
        }
        if let Some(v) = self.paths {
            run.mc.n_paths = v;
        }
        if let Some(v) = self.steps_per_eps {
            run.mc.steps_per_eps = v;
        }
        if self.no_antithetic {
            run.mc.antithetic = false;
        }
        let cfg = ValidateConfig { run, moments: self.moments };
        cfg.check()?;
        Ok(cfg)
    }
}

impl ValidateConfig {
    fn check(&self) -> Result<crate::config::Resolved, CliError> {
        let resolved = self.run.resolve()?;
        if self.run.options.strikes.len() != 1 {
            return Err(CliError::field("options.strikes", "validate takes exactly one strike"));
        }
        if self.run.options.maturities.len() != 1 {
            return Err(CliError::field("options.maturities", "validate takes exactly one maturity"));
        }
        Ok(resolved)
    }
}

pub fn execute(cfg: &ValidateConfig) -> Result<Artifact, CliError> {
    let resolved = cfg.check()?;
    let run = &cfg.run;
    let maturity = run.options.maturities[0];
    let option = run.options.option(run.options.strikes[0], maturity);
    let market = LadderMarket { t: 0.0, x: run.market.spot, rho: run.market.rho };
    let convergence = convergence_study(&market, &option, &resolved.vol, resolved.hurst, &run.mc)?;
    let moments =
        if cfg.moments { Some(moment_study(&resolved.vol, resolved.hurst, maturity, &run.mc)?) } else { None };
    Ok(Artifact::Json(serde_json::json!({
        "verdict": convergence.verdict,
        "slope": convergence.corrected_fit.map(|f| f.slope),
        "convergence": convergence,
        "moments": moments,
    })))
}
