use crate::McError;
use serde::{Deserialize, Serialize};

/// Smallest path count for a reported estimate.
pub const MIN_PATHS: usize = 1000;
/// Grid points per ε below which a discretisation warning is raised.
pub const MIN_STEPS_WARNING: usize = 10;

/// Time-stepping scheme for the asset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Exact log-normal step for volatility frozen over each step.
    #[default]
    LogEuler,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MCConfig {
    /// Independent samples; with antithetics each sample averages a pair.
    pub n_paths: usize,
    pub steps_per_eps: usize,
    pub scheme: Scheme,
    pub antithetic: bool,
    pub seed: u64,
    pub eps_ladder: Vec<f64>,
}

impl Default for MCConfig {
    fn default() -> Self {
        Self {
            n_paths: 100_000,
            steps_per_eps: 20,
            scheme: Scheme::LogEuler,
            antithetic: true,
            seed: 1,
            eps_ladder: vec![0.1, 0.05, 0.025, 0.0125],
        }
    }
}

impl MCConfig {
    /// Checks the configuration and returns any warnings.
    pub fn validate(&self) -> Result<Vec<String>, McError> {
        if self.n_paths < MIN_PATHS {
            return Err(McError::Invalid(format!("n_paths = {} is below {MIN_PATHS}", self.n_paths)));
        }
        if self.steps_per_eps == 0 {
            return Err(McError::Invalid("steps_per_eps must be positive".into()));
        }
        if let Some(e) = self.eps_ladder.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(McError::Invalid(format!("eps_ladder entry {e} must be positive")));
        }
        let mut warnings = Vec::new();
        if self.steps_per_eps < MIN_STEPS_WARNING {
            warnings.push(format!(
                "steps_per_eps = {} is below {MIN_STEPS_WARNING}: volatility path is under-resolved",
                self.steps_per_eps
            ));
        }
        Ok(warnings)
    }
}
