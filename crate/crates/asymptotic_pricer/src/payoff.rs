//! European payoffs: call, put, and piecewise-linear tables priced as
//! portfolios of calls.

use crate::bs::{bs_call, call_greeks, Greeks};
use crate::PricerError;
use serde::{Deserialize, Serialize};

/// Payoff h(X_T) of a European option.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Payoff {
    Call,
    Put,
    /// Linear interpolation of (spot, value) nodes, extended linearly with
    /// the end slopes; the left extension stops at zero spot.
    Table {
        spots: Vec<f64>,
        values: Vec<f64>,
    },
}

/// European option on the underlying.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionSpec {
    pub strike: f64,
    pub maturity: f64,
    pub payoff: Payoff,
}

/// A payoff written as c + s·x + Σ w_i (x − K_i)⁺.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CallPortfolio {
    pub cash: f64,
    pub shares: f64,
    pub legs: Vec<(f64, f64)>,
}

impl CallPortfolio {
    pub fn price(&self, x: f64, tau: f64, sigma: f64) -> f64 {
        self.cash + self.shares * x + self.legs.iter().map(|&(k, w)| w * bs_call(x, k, tau, sigma)).sum::<f64>()
    }

    pub fn greeks(&self, x: f64, tau: f64, sigma: f64) -> Greeks {
        let mut g = Greeks { delta: self.shares, gamma_x2: 0.0, vega: 0.0, skew_x: 0.0 };
        for &(k, w) in &self.legs {
            let c = call_greeks(x, k, tau, sigma);
            g.delta += w * c.delta;
            g.gamma_x2 += w * c.gamma_x2;
            g.vega += w * c.vega;
            g.skew_x += w * c.skew_x;
        }
        g
    }
}

impl OptionSpec {
    pub fn call(strike: f64, maturity: f64) -> Self {
        Self { strike, maturity, payoff: Payoff::Call }
    }

    pub fn put(strike: f64, maturity: f64) -> Self {
        Self { strike, maturity, payoff: Payoff::Put }
    }

    pub fn validate(&self) -> Result<(), PricerError> {
        if !(self.strike > 0.0 && self.strike.is_finite()) {
            return Err(PricerError::Invalid(format!("strike must be positive, got {}", self.strike)));
        }
        if !self.maturity.is_finite() {
            return Err(PricerError::Invalid(format!("maturity must be finite, got {}", self.maturity)));
        }
        if let Payoff::Table { spots, values } = &self.payoff {
            if spots.len() < 2 || spots.len() != values.len() {
                return Err(PricerError::Invalid(
                    "payoff table needs at least two (spot, value) pairs of equal length".into(),
                ));
            }
            if spots[0] < 0.0 || spots.windows(2).any(|w| w[1] <= w[0]) {
                return Err(PricerError::Invalid(
                    "payoff table spots must be non-negative and strictly increasing".into(),
                ));
            }
            if values.iter().chain(spots).any(|v| !v.is_finite()) {
                return Err(PricerError::Invalid("payoff table entries must be finite".into()));
            }
        }
        Ok(())
    }

    /// h(x).
    pub fn payoff_at(&self, x: f64) -> f64 {
        match &self.payoff {
            Payoff::Call => (x - self.strike).max(0.0),
            Payoff::Put => (self.strike - x).max(0.0),
            Payoff::Table { .. } => {
                let p = self.portfolio();
                p.cash + p.shares * x + p.legs.iter().map(|&(k, w)| w * (x - k).max(0.0)).sum::<f64>()
            }
        }
    }

    /// Put and table payoffs become call portfolios by parity and slope changes.
    pub(crate) fn portfolio(&self) -> CallPortfolio {
        match &self.payoff {
            Payoff::Call => CallPortfolio { cash: 0.0, shares: 0.0, legs: vec![(self.strike, 1.0)] },
            Payoff::Put => CallPortfolio { cash: self.strike, shares: -1.0, legs: vec![(self.strike, 1.0)] },
            Payoff::Table { spots, values } => {
                let slopes: Vec<f64> =
                    spots.windows(2).zip(values.windows(2)).map(|(s, v)| (v[1] - v[0]) / (s[1] - s[0])).collect();
                let n = slopes.len();
                let mut legs = Vec::with_capacity(n);
                for i in 1..n {
                    let w = slopes[i] - slopes[i - 1];
                    if w != 0.0 {
                        legs.push((spots[i], w));
                    }
                }
                let shares = slopes[0];
                CallPortfolio { cash: values[0] - shares * spots[0], shares, legs }
            }
        }
    }
}
