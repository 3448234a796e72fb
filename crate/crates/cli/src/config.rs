//! The single-document run configuration shared by `price` and `validate`.

use crate::CliError;
use asymptotic_pricer::{ConstantsConvention, OptionSpec};
use fou_core::{Hurst, HurstModel};
use mc_oracle::MCConfig;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use vol_model::{VolFunction, VolSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelParams {
    pub hurst: f64,
    pub eps: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { hurst: 0.6, eps: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MarketParams {
    pub spot: f64,
    pub rho: f64,
}

impl Default for MarketParams {
    fn default() -> Self {
        Self { spot: 100.0, rho: -0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OptionKind {
    #[default]
    Call,
    Put,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptionLattice {
    pub kind: OptionKind,
    pub strikes: Vec<f64>,
    pub maturities: Vec<f64>,
}

impl Default for OptionLattice {
    fn default() -> Self {
        Self { kind: OptionKind::Call, strikes: vec![100.0], maturities: vec![1.0] }
    }
}

impl OptionLattice {
    pub fn option(&self, strike: f64, maturity: f64) -> OptionSpec {
        match self.kind {
            OptionKind::Call => OptionSpec::call(strike, maturity),
            OptionKind::Put => OptionSpec::put(strike, maturity),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputParams {
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// Everything a pricing or validation run depends on. The top-level seed
/// drives the factor history and overrides `mc.seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelParams,
    pub vol: VolSpec,
    pub market: MarketParams,
    pub options: OptionLattice,
    pub mc: MCConfig,
    pub output: OutputParams,
    pub seed: u64,
    pub convention: ConstantsConvention,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelParams::default(),
            vol: VolSpec::PaperAppendix {},
            market: MarketParams::default(),
            options: OptionLattice::default(),
            mc: MCConfig::default(),
            output: OutputParams::default(),
            seed: 1,
            convention: ConstantsConvention::default(),
        }
    }
}

/// Validated objects built from a [`RunConfig`].
pub struct Resolved {
    pub hurst: Hurst,
    pub model: HurstModel,
    pub vol: VolFunction,
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::field(name, format!("must be positive and finite, got {v}")))
    }
}

pub fn parse_vol_spec(json: &str) -> Result<VolSpec, CliError> {
    serde_json::from_str(json).map_err(|e| CliError::field("vol", e))
}

pub fn build_vol(spec: &VolSpec, hurst: &Hurst) -> Result<VolFunction, CliError> {
    match spec {
        VolSpec::Constant { .. } => VolFunction::new_allow_degenerate(spec.clone(), hurst),
        _ => VolFunction::new(spec.clone(), hurst),
    }
    .map_err(|e| match e {
        vol_model::VolError::Quadrature { .. } => CliError::Compute(e.to_string()),
        other => CliError::field("vol", other),
    })
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::field("config", e))
    }

    /// Checks every numeric field before any computation.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let hurst = Hurst::new(self.model.hurst).map_err(|e| CliError::field("model.hurst", e))?;
        positive("model.eps", self.model.eps)?;
        let model = HurstModel::new(self.model.hurst, self.model.eps).map_err(|e| CliError::field("model.eps", e))?;
        positive("market.spot", self.market.spot)?;
        if !(-1.0..=1.0).contains(&self.market.rho) {
            return Err(CliError::field("market.rho", format!("must lie in [-1, 1], got {}", self.market.rho)));
        }
        if self.options.strikes.is_empty() {
            return Err(CliError::field("options.strikes", "must not be empty"));
        }
        for &k in &self.options.strikes {
            positive("options.strikes", k)?;
        }
        if self.options.maturities.is_empty() {
            return Err(CliError::field("options.maturities", "must not be empty"));
        }
        for &t in &self.options.maturities {
            positive("options.maturities", t)?;
        }
        self.mc.validate().map_err(|e| CliError::field("mc", e))?;
        let vol = build_vol(&self.vol, &hurst)?;
        Ok(Resolved { hurst, model, vol })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"modle": {}}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"model": {"hurst": 0.6, "h": 1}}"#).is_err());
    }

    #[test]
    fn partial_documents_take_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"model": {"eps": 0.01}, "seed": 7}"#).unwrap();
        assert_eq!(cfg.model.hurst, 0.6);
        assert_eq!(cfg.model.eps, 0.01);
        assert_eq!(cfg.seed, 7);
    }

    #[test]
    fn validation_names_the_field() {
        let mut cfg = RunConfig::default();
        cfg.market.rho = 1.5;
        assert!(cfg.resolve().err().unwrap().to_string().starts_with("market.rho"));
        let mut cfg = RunConfig::default();
        cfg.model.hurst = 0.4;
        assert!(cfg.resolve().err().unwrap().to_string().starts_with("model.hurst"));
        let mut cfg = RunConfig::default();
        cfg.options.maturities = vec![-1.0];
        assert!(cfg.resolve().err().unwrap().to_string().starts_with("options.maturities"));
        let mut cfg = RunConfig::default();
        cfg.mc.n_paths = 3;
        assert!(cfg.resolve().err().unwrap().to_string().starts_with("mc"));
        let cfg = RunConfig { vol: VolSpec::Logistic { lo: 0.5, hi: 0.1, kappa: 1.0 }, ..Default::default() };
        assert!(cfg.resolve().err().unwrap().to_string().starts_with("vol"));
    }
}
