//! Safeguarded inversion of the zero-rate Black–Scholes call price.

use crate::IvError;
use asymptotic_pricer::{bs_call, call_greeks};

const BISECTION_STEPS: usize = 20;
const MAX_NEWTON_STEPS: usize = 200;
/// Price tolerance relative to spot.
pub const PRICE_TOLERANCE: f64 = 1e-12;

/// Volatility σ with bs_call(x, K, T − t, σ) = `price`.
///
/// Bisection in σ brackets the root, then Newton steps refine it; a step
/// that leaves the bracket is replaced by bisection.
pub fn invert_bs(price: f64, t: f64, x: f64, strike: f64, maturity: f64) -> Result<f64, IvError> {
    let tau = maturity - t;
    if !(tau > 0.0) {
        return Err(IvError::Invalid(format!("time to maturity must be positive, got {tau}")));
    }
    if !(x > 0.0 && strike > 0.0) {
        return Err(IvError::Invalid(format!("spot and strike must be positive, got {x} and {strike}")));
    }
    let lower = (x - strike).max(0.0);
    if !(price > lower && price < x) {
        return Err(IvError::NoArbitrage { price, lower, upper: x });
    }
    let tol = PRICE_TOLERANCE * x;
    let f = |s: f64| bs_call(x, strike, tau, s) - price;

    let (mut lo, mut hi) = (0.0, 1.0 / tau.sqrt());
    while f(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(IvError::NotConverged { sigma: hi, residual: f(hi) });
        }
    }
    let mut s = 0.5 * (lo + hi);
    for _ in 0..BISECTION_STEPS {
        s = 0.5 * (lo + hi);
        if f(s) < 0.0 {
            lo = s;
        } else {
            hi = s;
        }
    }
    for _ in 0..MAX_NEWTON_STEPS {
        let r = f(s);
        if r < 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let vega = call_greeks(x, strike, tau, s).vega;
        let mut next = s - r / vega;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - s).abs();
        s = next;
        if step <= 1e-15 * s || hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let residual = f(s);
    if residual.abs() > tol {
        return Err(IvError::NotConverged { sigma: s, residual });
    }
    Ok(s)
}

/// Implied volatility of a put price, through put–call parity.
pub fn invert_bs_put(price: f64, t: f64, x: f64, strike: f64, maturity: f64) -> Result<f64, IvError> {
    invert_bs(price + x - strike, t, x, strike, maturity)
}
