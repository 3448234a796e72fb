//! Mean and ±1 sd correction curves and surfaces in relative maturity and
//! moneyness, parametrised as in the figure captions: H, a_F and the
//! amplitude of the normalised φ standard deviation at τ = τ̄.

use crate::output::Artifact;
use crate::CliError;
use asymptotic_pricer::normalized_correction;
use implied_vol::relative_iv_correction;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// Price correction per unit strike.
    Price,
    /// Relative implied-volatility correction δI.
    #[default]
    Iv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    /// One row per (τ/τ̄, K/X).
    #[default]
    Long,
    /// One row per τ/τ̄ with mean and band columns for each moneyness.
    Wide,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrectionConfig {
    pub quantity: Quantity,
    pub layout: Layout,
    pub hurst: f64,
    pub a_f: f64,
    /// Normalised φ standard deviation at τ = τ̄; it scales as (τ/τ̄)^H.
    pub amplitude: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    pub n_tau: usize,
    pub moneyness: Vec<f64>,
}

pub const CAPTION_HURST: f64 = 0.6;
pub const CAPTION_A_F: f64 = 0.1;
pub const CAPTION_AMPLITUDE: f64 = 0.04;
/// Moneyness values of the curve figures, bottom to top.
pub const CURVE_MONEYNESS: [f64; 3] = [0.9, 1.0, 1.1];

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

impl CorrectionConfig {
    /// Caption parameters for figures 3 to 6.
    pub fn preset(fig: u8) -> Option<Self> {
        let (quantity, layout, tau_min, tau_max, n_tau, moneyness) = match fig {
            3 => (Quantity::Price, Layout::Wide, 0.01, 1.5, 150, CURVE_MONEYNESS.to_vec()),
            4 => (Quantity::Price, Layout::Long, 0.02, 1.5, 75, (80..=120).map(|k| k as f64 / 100.0).collect()),
            5 => (Quantity::Iv, Layout::Wide, 0.05, 2.0, 160, CURVE_MONEYNESS.to_vec()),
            6 => (Quantity::Iv, Layout::Long, 0.05, 2.0, 80, (80..=120).map(|k| k as f64 / 100.0).collect()),
            _ => return None,
        };
        Some(Self {
            quantity,
            layout,
            hurst: CAPTION_HURST,
            a_f: CAPTION_A_F,
            amplitude: CAPTION_AMPLITUDE,
            tau_min,
            tau_max,
            n_tau,
            moneyness,
        })
    }

    fn check(&self) -> Result<(), CliError> {
        fou_core::Hurst::new(self.hurst).map_err(|e| CliError::field("hurst", e))?;
        if !self.a_f.is_finite() {
            return Err(CliError::field("a-f", "must be finite"));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(CliError::field("amplitude", format!("must be non-negative, got {}", self.amplitude)));
        }
        if !(self.tau_min > 0.0 && self.tau_max >= self.tau_min && self.tau_max.is_finite()) {
            return Err(CliError::field(
                "tau-min",
                format!("need 0 < tau-min <= tau-max, got [{}, {}]", self.tau_min, self.tau_max),
            ));
        }
        if self.n_tau == 0 {
            return Err(CliError::field("n-tau", "must be at least 1"));
        }
        if self.moneyness.is_empty() || self.moneyness.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(CliError::field("moneyness", "need one or more positive values"));
        }
        Ok(())
    }

    /// (mean, mean + sd, mean − sd) at one point.
    fn band(&self, tau_rel: f64, moneyness: f64) -> (f64, f64, f64) {
        let sd = self.amplitude * tau_rel.powf(self.hurst);
        match self.quantity {
            Quantity::Price => {
                let up = normalized_correction(moneyness, tau_rel, self.hurst, self.a_f, sd);
                (up.skew, up.skew + up.random, up.skew - up.random)
            }
            Quantity::Iv => {
                let (random, skew) = relative_iv_correction(tau_rel, moneyness.ln(), self.hurst, self.a_f, sd);
                (skew, skew + random, skew - random)
            }
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct SurfaceArgs {
    /// Caption preset for figure 3, 4, 5 or 6; other flags override it.
    #[arg(long)]
    pub fig: Option<u8>,
    #[arg(long, value_enum)]
    pub quantity: Option<Quantity>,
    #[arg(long, value_enum)]
    pub layout: Option<Layout>,
    #[arg(long)]
    pub hurst: Option<f64>,
    #[arg(long)]
    pub a_f: Option<f64>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub tau_min: Option<f64>,
    #[arg(long)]
    pub tau_max: Option<f64>,
    #[arg(long)]
    pub n_tau: Option<usize>,
    /// Comma-separated K/X values.
    #[arg(long, value_delimiter = ',')]
    pub moneyness: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl SurfaceArgs {
    pub fn resolve(&self) -> Result<CorrectionConfig, CliError> {
        let fig = self.fig.unwrap_or(6);
        if !(3..=6).contains(&fig) {
            return Err(CliError::field("fig", format!("surface presets exist for figures 3 to 6, got {fig}")));
        }
        let mut cfg = CorrectionConfig::preset(fig).expect("preset in range");
        if let Some(v) = self.quantity {
            cfg.quantity = v;
        }
        if let Some(v) = self.layout {
            cfg.layout = v;
        }
        if let Some(v) = self.hurst {
            cfg.hurst = v;
        }
        if let Some(v) = self.a_f {
            cfg.a_f = v;
        }
        if let Some(v) = self.amplitude {
            cfg.amplitude = v;
        }
        if let Some(v) = self.tau_min {
            cfg.tau_min = v;
        }
        if let Some(v) = self.tau_max {
            cfg.tau_max = v;
        }
        if let Some(v) = self.n_tau {
            cfg.n_tau = v;
        }
        if let Some(v) = &self.moneyness {
            cfg.moneyness = v.clone();
        }
        cfg.check()?;
        Ok(cfg)
    }
}

fn fmt_moneyness(m: f64) -> String {
    let s = format!("{m}");
    if s.contains('.') {
        s
    } else {
        format!("{s}.0")
    }
}

pub fn execute(cfg: &CorrectionConfig) -> Result<Artifact, CliError> {
    cfg.check()?;
    let taus = linspace(cfg.tau_min, cfg.tau_max, cfg.n_tau);
    let stem = match cfg.quantity {
        Quantity::Price => "price",
        Quantity::Iv => "iv",
    };
    Ok(match cfg.layout {
        Layout::Long => Artifact::Csv {
            columns: ["tau_rel", "moneyness"]
                .iter()
                .map(|s| s.to_string())
                .chain([format!("mean_{stem}"), format!("{stem}_plus_sd"), format!("{stem}_minus_sd")])
                .collect(),
            rows: taus
                .iter()
                .flat_map(|&t| {
                    cfg.moneyness.iter().map(move |&m| {
                        let (mean, up, down) = cfg.band(t, m);
                        vec![t, m, mean, up, down]
                    })
                })
                .collect(),
        },
        Layout::Wide => {
            let mut columns = vec!["tau_rel".to_string()];
            for prefix in ["mean", "plus_sd", "minus_sd"] {
                columns.extend(cfg.moneyness.iter().map(|&m| format!("{prefix}_{}", fmt_moneyness(m))));
            }
            let rows = taus
                .iter()
                .map(|&t| {
                    let bands: Vec<(f64, f64, f64)> = cfg.moneyness.iter().map(|&m| cfg.band(t, m)).collect();
                    std::iter::once(t)
                        .chain(bands.iter().map(|b| b.0))
                        .chain(bands.iter().map(|b| b.1))
                        .chain(bands.iter().map(|b| b.2))
                        .collect()
                })
                .collect();
            Artifact::Csv { columns, rows }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iv_band_is_symmetric_about_the_mean() {
        let cfg = CorrectionConfig::preset(5).unwrap();
        let (mean, up, down) = cfg.band(0.7, 1.1);
        assert!(((up - mean) - (mean - down)).abs() < 1e-15);
        assert!(up > down);
    }

    #[test]
    fn price_band_width_scales_as_tau_to_h_minus_half() {
        let cfg = CorrectionConfig::preset(3).unwrap();
        // At the money the prefactor varies with τ only through d1 = √(τ/2).
        let width = |t: f64| {
            let (_, up, down) = cfg.band(t, 1.0);
            (up - down) / (-t / 4.0).exp()
        };
        let ratio = width(0.4) / width(0.1);
        assert!((ratio - 4f64.powf(0.1)).abs() < 1e-12);
    }
}
