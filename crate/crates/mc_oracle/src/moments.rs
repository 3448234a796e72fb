//! Ensemble statistics of φ and of the integrated volatility fluctuation.

use crate::study::{log_slope, SlopeFit};
use crate::{MCConfig, McError};
use asymptotic_pricer::{phi_linear_variance, ConstantsConvention, PhiIntegrator, SkewConstants};
use fou_core::{Hurst, HurstModel};
use fou_sampler::{CirculantSampler, FouSampler, HistorySpec, UniformGrid, DEFAULT_TOLERANCE};
use fracvol_numerics::stats::{anderson_darling_normal, Moments};
use rayon::prelude::*;
use serde::Serialize;
use tt_field::cphi;
use vol_model::VolFunction;

/// Relative tolerance on the far-history share of integrated variance.
const HISTORY_TOLERANCE: f64 = 1e-3;
/// Ratio of the second maturity to the first in the covariance check.
const SECOND_MATURITY_FACTOR: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiVariance {
    pub eps: f64,
    pub maturity: f64,
    pub n: usize,
    pub mean: f64,
    pub mean_stderr: f64,
    pub variance: f64,
    /// ε^{2H−2}Var(φ)τ^{−2H}/σ_φ².
    pub scaled_ratio: f64,
    /// Var(φ) over the exact finite-ε variance of its linear part.
    pub finite_eps_ratio: f64,
    pub anderson_darling: f64,
    pub anderson_darling_critical_1pct: f64,
    pub normal_at_1pct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiCovariance {
    pub eps: f64,
    pub maturity: f64,
    pub maturity2: f64,
    pub covariance: f64,
    /// σ_φ²ε^{2−2H}(τ τ′)^H C_φ.
    pub predicted: f64,
    pub ratio: f64,
    pub correlation: f64,
    pub predicted_correlation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourthMomentRung {
    pub eps: f64,
    pub mean_fourth: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub h: f64,
    pub horizon: f64,
    pub phi: PhiVariance,
    pub covariance: PhiCovariance,
    pub fourth: Vec<FourthMomentRung>,
    pub fourth_fit: SlopeFit,
    /// 4 − 4H − 0.2.
    pub fourth_bound: f64,
    pub fourth_passes: bool,
}

/// φ_{0,T} and φ_{0,1.5T} over `n` independent histories at one ε.
fn phi_ensemble(
    f: &VolFunction,
    model: HurstModel,
    maturity: f64,
    n: usize,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>), McError> {
    let long = SECOND_MATURITY_FACTOR * maturity;
    let spec = HistorySpec::for_horizon(&model, long, HISTORY_TOLERANCE);
    let sampler = FouSampler::new(model, UniformGrid::single(0.0), spec)?;
    let near = PhiIntegrator::new(&sampler, 0.0, maturity, DEFAULT_TOLERANCE)?;
    let far = PhiIntegrator::new(&sampler, 0.0, long, DEFAULT_TOLERANCE)?;
    Ok((0..n as u64)
        .into_par_iter()
        .map(|i| {
            let path = sampler.path(seed, i);
            (near.phi(f, &path), far.phi(f, &path))
        })
        .unzip())
}

/// Variance and cross-maturity covariance of φ at a single ε.
pub fn phi_statistics(
    f: &VolFunction,
    model: HurstModel,
    maturity: f64,
    n: usize,
    seed: u64,
) -> Result<(PhiVariance, PhiCovariance), McError> {
    if n < 8 {
        return Err(McError::Invalid(format!("need at least 8 histories, got {n}")));
    }
    let (a, b) = phi_ensemble(f, model, maturity, n, seed)?;
    let long = SECOND_MATURITY_FACTOR * maturity;
    let constants = SkewConstants::new(f, &model, 0.0, ConstantsConvention::ModelConsistent);
    let ma: Moments = a.iter().copied().collect();
    let mb: Moments = b.iter().copied().collect();
    let cross = a.iter().zip(&b).map(|(x, y)| (x - ma.mean()) * (y - mb.mean())).sum::<f64>() / (n - 1) as f64;
    let ad = anderson_darling_normal(&a);
    let sd = constants.phi_std(maturity);
    let sd2 = constants.phi_std(long);
    let c = cphi(0.0, 0.0, maturity, long, &model.hurst)?;
    let variance = PhiVariance {
        eps: model.eps,
        maturity,
        n,
        mean: ma.mean(),
        mean_stderr: ma.std_error(),
        variance: ma.variance(),
        scaled_ratio: ma.variance() / (sd * sd),
        finite_eps_ratio: ma.variance() / phi_linear_variance(f, &model, maturity)?,
        anderson_darling: ad.statistic,
        anderson_darling_critical_1pct: ad.critical[4],
        normal_at_1pct: ad.accepts_at(0.01),
    };
    let covariance = PhiCovariance {
        eps: model.eps,
        maturity,
        maturity2: long,
        covariance: cross,
        predicted: sd * sd2 * c,
        ratio: cross / (sd * sd2 * c),
        correlation: cross / (ma.variance() * mb.variance()).sqrt(),
        predicted_correlation: c,
    };
    Ok((variance, covariance))
}

/// E[(∫_0^horizon (F(Z_s)² − σ̄²) ds)⁴] on each rung, from stationary
/// circulant paths with ε/steps_per_eps spacing.
pub fn fourth_moments(
    f: &VolFunction,
    hurst: Hurst,
    horizon: f64,
    cfg: &MCConfig,
) -> Result<Vec<FourthMomentRung>, McError> {
    cfg.validate()?;
    cfg.eps_ladder
        .iter()
        .map(|&eps| {
            let model = HurstModel::new(hurst.value(), eps)?;
            let grid = UniformGrid::covering(&model, 0.0, horizon, cfg.steps_per_eps)?;
            let sampler = CirculantSampler::new(&model, &grid)?;
            let integral = |z: &[f64]| {
                let g: Vec<f64> = z.iter().map(|&x| 2.0 * f.g(x)).collect();
                grid.dt * (g.iter().sum::<f64>() - 0.5 * (g[0] + g[g.len() - 1]))
            };
            let pairs = cfg.n_paths.div_ceil(2);
            let fourth: Vec<f64> = (0..pairs as u64)
                .into_par_iter()
                .flat_map_iter(|i| {
                    let (a, b) = sampler.sample_pair(cfg.seed, i);
                    [integral(&a).powi(4), integral(&b).powi(4)]
                })
                .collect();
            let m: Moments = fourth.iter().copied().collect();
            Ok(FourthMomentRung { eps, mean_fourth: m.mean(), stderr: m.std_error() })
        })
        .collect()
}

/// φ statistics at the smallest rung and fourth-moment scaling over the ladder.
pub fn moment_study(f: &VolFunction, hurst: Hurst, horizon: f64, cfg: &MCConfig) -> Result<MomentReport, McError> {
    cfg.validate()?;
    if cfg.eps_ladder.len() < 2 {
        return Err(McError::Invalid("moment study needs at least two rungs".into()));
    }
    if !(horizon > 0.0) {
        return Err(McError::Invalid(format!("horizon {horizon} must be positive")));
    }
    let eps_min = cfg.eps_ladder.iter().copied().fold(f64::INFINITY, f64::min);
    let (phi, covariance) =
        phi_statistics(f, HurstModel::new(hurst.value(), eps_min)?, horizon, cfg.n_paths, cfg.seed)?;
    let fourth = fourth_moments(f, hurst, horizon, cfg)?;
    let fourth_fit = log_slope(
        &fourth.iter().map(|r| r.eps).collect::<Vec<_>>(),
        &fourth.iter().map(|r| r.mean_fourth).collect::<Vec<_>>(),
        &fourth.iter().map(|r| r.stderr).collect::<Vec<_>>(),
    );
    let fourth_bound = 4.0 - 4.0 * hurst.value() - 0.2;
    Ok(MomentReport {
        h: hurst.value(),
        horizon,
        phi,
        covariance,
        fourth_passes: fourth_fit.slope >= fourth_bound,
        fourth,
        fourth_fit,
        fourth_bound,
    })
}
