//! Convergence of the Monte Carlo price to the corrected price over an ε ladder.

use crate::simulate::{Forward, McEstimate};
use crate::{MCConfig, McError};
use asymptotic_pricer::{corrected_price, MarketState, OptionSpec};
use fou_core::{Hurst, HurstModel};
use fou_sampler::{path_rng, FouSampler, HistoryCells, HistorySpec, UniformGrid};
use fracvol_numerics::stats::{fit_line, fit_line_weighted, Moments};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use vol_model::VolFunction;

/// A rung counts as resolved when its residual exceeds this many standard errors.
const NOISE_MULTIPLE: f64 = 3.0;
/// Stream index reserved for the shared factor history.
const HISTORY_STREAM: u64 = u64::MAX;
/// Bootstrap streams count down from here.
const BOOTSTRAP_STREAM: u64 = u64::MAX - 1;
const BOOTSTRAP_DRAWS: usize = 400;
/// Relative tolerance on the far-history share of integrated variance.
const HISTORY_TOLERANCE: f64 = 1e-3;

/// Spot, correlation and pricing time shared by all rungs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderMarket {
    pub t: f64,
    pub x: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Log-log slope with a two-sided 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rung {
    pub eps: f64,
    pub mc: f64,
    pub stderr: f64,
    pub corrected: f64,
    pub uncorrected: f64,
    pub phi: f64,
    pub residual: f64,
    pub residual_uncorrected: f64,
    pub resolved: bool,
    /// Standard error of the MC difference to the previous rung under
    /// common random numbers, and as if the rungs were independent.
    pub diff_stderr_coupled: Option<f64>,
    pub diff_stderr_independent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub h: f64,
    pub order: f64,
    pub rungs: Vec<Rung>,
    pub corrected_fit: Option<SlopeFit>,
    pub uncorrected_fit: SlopeFit,
    pub verdict: Verdict,
    pub reason: String,
    pub warnings: Vec<String>,
}

/// Two-sided 97.5% Student-t quantile.
fn t_quantile(df: usize) -> f64 {
    const TABLE: [f64; 10] = [12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228];
    match df {
        0 => f64::INFINITY,
        1..=10 => TABLE[df - 1],
        _ => 1.96 + 2.4 / df as f64,
    }
}

/// Slope of ln y on ln x; the error is the larger of the scatter estimate
/// and the one implied by the per-point standard errors of y.
pub(crate) fn log_slope(x: &[f64], y: &[f64], y_se: &[f64]) -> SlopeFit {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let scatter = fit_line(&lx, &ly);
    let sig: Vec<f64> = y.iter().zip(y_se).map(|(v, s)| (s / v).max(1e-300)).collect();
    let formal = fit_line_weighted(&lx, &ly, &sig);
    let stderr = scatter.slope_se.max(formal.slope_se);
    let half = t_quantile(x.len().saturating_sub(2).max(1)) * stderr;
    SlopeFit {
        slope: scatter.slope,
        stderr,
        ci_low: scatter.slope - half,
        ci_high: scatter.slope + half,
        n_points: x.len(),
    }
}

/// Slope of ln residual on ln ε with a percentile bootstrap interval.
///
/// Paths are resampled jointly across rungs, so the interval reflects the
/// correlation that common random numbers induce between rungs.
fn bootstrap_slope(eps: &[f64], samples: &[Vec<f64>], reference: &[f64], seed: u64) -> SlopeFit {
    let lx: Vec<f64> = eps.iter().map(|v| v.ln()).collect();
    let slope_of = |means: &[f64]| {
        let ly: Vec<f64> = means.iter().zip(reference).map(|(m, r)| (m - r).abs().max(1e-300).ln()).collect();
        fit_line(&lx, &ly).slope
    };
    let means: Vec<f64> = samples.iter().map(|s| s.iter().sum::<f64>() / s.len() as f64).collect();
    let slope = slope_of(&means);
    let n = samples[0].len();
    let mut boot: Vec<f64> = (0..BOOTSTRAP_DRAWS as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = path_rng(seed, BOOTSTRAP_STREAM - b);
            let mut sums = vec![0.0; samples.len()];
            for _ in 0..n {
                let i = rng.random_range(0..n);
                for (acc, s) in sums.iter_mut().zip(samples) {
                    *acc += s[i];
                }
            }
            let m: Vec<f64> = sums.iter().map(|s| s / n as f64).collect();
            slope_of(&m)
        })
        .collect();
    boot.sort_by(|a, b| a.total_cmp(b));
    let spread: Moments = boot.iter().copied().collect();
    let pick = |q: f64| boot[((q * (boot.len() - 1) as f64).round() as usize).min(boot.len() - 1)];
    SlopeFit { slope, stderr: spread.variance().sqrt(), ci_low: pick(0.025), ci_high: pick(0.975), n_points: eps.len() }
}

/// History cells fine and long enough for every rung of the ladder, so
/// all rungs share one Brownian history.
pub fn history_cells_for_ladder(hurst: Hurst, ladder: &[f64], t: f64, horizon: f64) -> Result<HistoryCells, McError> {
    let mut span: f64 = 0.0;
    let mut fine = f64::INFINITY;
    for &e in ladder {
        let spec = HistorySpec::for_horizon(&HurstModel::new(hurst.value(), e)?, horizon, HISTORY_TOLERANCE);
        span = span.max(spec.span);
        fine = fine.min(spec.fine_width);
    }
    Ok(HistoryCells::build(t, &HistorySpec::new(span, fine, 0.05)?))
}

fn check_ladder(ladder: &[f64]) -> Result<(), McError> {
    if ladder.len() < 4 {
        return Err(McError::Invalid(format!("convergence study needs at least 4 rungs, got {}", ladder.len())));
    }
    let ratio = ladder[1] / ladder[0];
    if !(ratio < 1.0) || ladder.windows(2).any(|w| ((w[1] / w[0]) / ratio - 1.0).abs() > 1e-6) {
        return Err(McError::Invalid("eps_ladder must be geometric and decreasing".into()));
    }
    Ok(())
}

/// Prices `option` by Monte Carlo and by the corrected formula on every
/// rung with common random numbers, and fits the residual order.
pub fn convergence_study(
    market: &LadderMarket,
    option: &OptionSpec,
    f: &VolFunction,
    hurst: Hurst,
    cfg: &MCConfig,
) -> Result<ConvergenceReport, McError> {
    let warnings = cfg.validate()?;
    check_ladder(&cfg.eps_ladder)?;
    option.validate()?;
    let tau = option.maturity - market.t;
    if !(tau > 0.0) {
        return Err(McError::Invalid("maturity must follow the pricing time".into()));
    }
    let eps_min = cfg.eps_ladder.iter().copied().fold(f64::INFINITY, f64::min);
    let cells = history_cells_for_ladder(hurst, &cfg.eps_ladder, market.t, tau)?;
    let mut rng = path_rng(cfg.seed, HISTORY_STREAM);
    let widths: Vec<f64> = cells.edges().windows(2).map(|e| e[1] - e[0]).collect();
    let history: Vec<f64> = widths.iter().map(|w| w.sqrt() * rng.sample::<f64, _>(StandardNormal)).collect();
    // One forward step size for every rung keeps the driving increments identical.
    let dt = eps_min / cfg.steps_per_eps as f64;

    let mut rungs: Vec<Rung> = Vec::with_capacity(cfg.eps_ladder.len());
    let mut all_samples: Vec<Vec<f64>> = Vec::with_capacity(cfg.eps_ladder.len());
    for &eps in &cfg.eps_ladder {
        let model = HurstModel::new(hurst.value(), eps)?;
        let sampler = FouSampler::with_history_cells(model, UniformGrid::single(market.t), cells.clone())?;
        let path = sampler.path_from_increments(history.clone())?;
        let state = MarketState { t: market.t, x: market.x, rho: market.rho, path: &path };
        let price = corrected_price(&state, option, f, &model)?;
        let forward = Forward::new(&path, market.t, option.maturity, dt)?;
        let samples = forward.payoff_samples(market.x, option, f, market.rho, cfg.n_paths, cfg.seed, cfg.antithetic);
        let est = McEstimate::from_samples(&samples, vec![]);
        let (coupled, independent) = match (all_samples.last(), rungs.last()) {
            (Some(prev), Some(r)) => {
                let d: Moments = samples.iter().zip(prev).map(|(a, b)| a - b).collect();
                let prev_se = r.stderr;
                (Some(d.std_error()), Some((est.stderr.powi(2) + prev_se.powi(2)).sqrt()))
            }
            _ => (None, None),
        };
        let residual = (est.estimate - price.total).abs();
        rungs.push(Rung {
            eps,
            mc: est.estimate,
            stderr: est.stderr,
            corrected: price.total,
            uncorrected: price.q0,
            phi: price.phi,
            residual,
            residual_uncorrected: (est.estimate - price.q0).abs(),
            resolved: residual > NOISE_MULTIPLE * est.stderr,
            diff_stderr_coupled: coupled,
            diff_stderr_independent: independent,
        });
        all_samples.push(samples);
    }

    let order = 1.0 - hurst.value();
    let eps: Vec<f64> = rungs.iter().map(|r| r.eps).collect();
    let uncorrected: Vec<f64> = rungs.iter().map(|r| r.uncorrected).collect();
    let uncorrected_fit = bootstrap_slope(&eps, &all_samples, &uncorrected, cfg.seed);
    let resolved = rungs.iter().take_while(|r| r.resolved).count();
    let (corrected_fit, verdict, reason) = if resolved < 3 {
        let at = rungs.get(resolved).map_or(f64::NAN, |r| r.eps);
        (None, Verdict::Inconclusive, format!("residual within {NOISE_MULTIPLE} standard errors from ε = {at}"))
    } else {
        let head = &rungs[..resolved];
        let corrected: Vec<f64> = head.iter().map(|r| r.corrected).collect();
        let fit = bootstrap_slope(&eps[..resolved], &all_samples[..resolved], &corrected, cfg.seed);
        let rising = head.windows(2).find(|w| {
            let noise = w[1].diff_stderr_coupled.unwrap_or(f64::INFINITY);
            w[1].residual > w[0].residual + 2.0 * noise
        });
        if let Some(w) = rising {
            (Some(fit), Verdict::Fail, format!("residual grows from ε = {} to ε = {}", w[0].eps, w[1].eps))
        } else if fit.ci_low > order {
            (Some(fit), Verdict::Pass, format!("slope interval [{:.3}, {:.3}] above {order}", fit.ci_low, fit.ci_high))
        } else if fit.ci_high < order {
            (Some(fit), Verdict::Fail, format!("slope interval [{:.3}, {:.3}] below {order}", fit.ci_low, fit.ci_high))
        } else {
            (
                Some(fit),
                Verdict::Inconclusive,
                format!("slope interval [{:.3}, {:.3}] contains {order}", fit.ci_low, fit.ci_high),
            )
        }
    };
    Ok(ConvergenceReport { h: hurst.value(), order, rungs, corrected_fit, uncorrected_fit, verdict, reason, warnings })
}
