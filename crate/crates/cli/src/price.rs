use crate::config::{parse_vol_spec, Format, OptionKind, RunConfig};
use crate::output::Artifact;
use crate::CliError;
use asymptotic_pricer::{corrected_price_with, ConstantsConvention, MarketState, PriceDecomposition};
use fou_sampler::{FouSampler, HistorySpec, UniformGrid, DEFAULT_TOLERANCE};
use serde::Serialize;
use std::path::PathBuf;

/// Relative tolerance on the far-history share of the integrated variance.
pub const HISTORY_TOLERANCE: f64 = 1e-3;

/// Flags shared by `price` and `validate`; each overrides the matching
/// field of `--config` (or of the defaults).
#[derive(Debug, Default, clap::Args)]
pub struct RunOverrides {
    /// JSON run configuration; flags given alongside take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub hurst: Option<f64>,
    /// Correlation time ε.
    #[arg(long, alias = "eps")]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub spot: Option<f64>,
    /// One strike or a comma-separated list.
    #[arg(long, value_delimiter = ',')]
    pub strike: Option<Vec<f64>>,
    /// One maturity or a comma-separated list.
    #[arg(long, value_delimiter = ',')]
    pub maturity: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub kind: Option<OptionKind>,
    /// Volatility map as {"kind": ..., "params": {...}}.
    #[arg(long)]
    pub vol_spec: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub convention: Option<Convention>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum Convention {
    ModelConsistent,
    Literal,
}

impl From<Convention> for ConstantsConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::ModelConsistent => ConstantsConvention::ModelConsistent,
            Convention::Literal => ConstantsConvention::Literal,
        }
    }
}

impl RunOverrides {
    pub fn apply(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.hurst {
            cfg.model.hurst = v;
        }
        if let Some(v) = self.epsilon {
            cfg.model.eps = v;
        }
        if let Some(v) = self.rho {
            cfg.market.rho = v;
        }
        if let Some(v) = self.spot {
            cfg.market.spot = v;
        }
        if let Some(v) = &self.strike {
            cfg.options.strikes = v.clone();
        }
        if let Some(v) = &self.maturity {
            cfg.options.maturities = v.clone();
        }
        if let Some(v) = self.kind {
            cfg.options.kind = v;
        }
        if let Some(v) = &self.vol_spec {
            cfg.vol = parse_vol_spec(v)?;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.convention {
            cfg.convention = v.into();
        }
        cfg.mc.seed = cfg.seed;
        Ok(cfg)
    }
}

#[derive(Debug, clap::Args)]
pub struct PriceArgs {
    #[command(flatten)]
    pub run: RunOverrides,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl PriceArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = self.run.apply()?;
        if let Some(f) = self.format {
            cfg.output.format = f;
        }
        // Where the file goes is not part of what it contains.
        cfg.output.path = None;
        cfg.resolve()?;
        Ok(cfg)
    }
}

#[derive(Debug, Serialize)]
struct PricedOption {
    strike: f64,
    maturity: f64,
    #[serde(flatten)]
    decomposition: PriceDecomposition,
}

const CSV_COLUMNS: [&str; 10] =
    ["strike", "maturity", "q0", "phi", "random_term", "skew_term", "total", "d1", "tau_bar", "a_F"];

pub fn execute(cfg: &RunConfig) -> Result<Artifact, CliError> {
    let resolved = cfg.resolve()?;
    let horizon = cfg.options.maturities.iter().copied().fold(0.0, f64::max);
    let sampler = FouSampler::new(
        resolved.model,
        UniformGrid::single(0.0),
        HistorySpec::for_horizon(&resolved.model, horizon, HISTORY_TOLERANCE),
    )?;
    let path = sampler.path(cfg.seed, 0);
    let state = MarketState { t: 0.0, x: cfg.market.spot, rho: cfg.market.rho, path: &path };
    let mut priced = Vec::new();
    for &maturity in &cfg.options.maturities {
        for &strike in &cfg.options.strikes {
            let option = cfg.options.option(strike, maturity);
            let d = corrected_price_with(
                &state,
                &option,
                &resolved.vol,
                &resolved.model,
                cfg.convention,
                DEFAULT_TOLERANCE,
            )?;
            priced.push(PricedOption { strike, maturity, decomposition: d });
        }
    }
    Ok(match cfg.output.format {
        Format::Json => Artifact::Json(serde_json::json!({ "prices": priced })),
        Format::Csv => Artifact::Csv {
            columns: CSV_COLUMNS.iter().map(|c| c.to_string()).collect(),
            rows: priced
                .iter()
                .map(|p| {
                    let d = &p.decomposition;
                    vec![p.strike, p.maturity, d.q0, d.phi, d.random_term, d.skew_term, d.total, d.d1, d.tau_bar, d.a_f]
                })
                .collect(),
        },
    })
}
