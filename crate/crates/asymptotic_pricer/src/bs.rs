//! Zero-rate Black–Scholes call and put with the greeks used by the
//! price correction.

use fracvol_numerics::special::{norm_cdf, norm_pdf};

/// Sensitivities of a zero-rate European call or put.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Greeks {
    /// ∂_x C.
    pub delta: f64,
    /// x²∂²_x C.
    pub gamma_x2: f64,
    /// ∂_σ C.
    pub vega: f64,
    /// x∂_x(x²∂²_x C).
    pub skew_x: f64,
}

/// Standardised log-moneyness d1 = (ln(x/K) + σ²τ/2)/(σ√τ).
pub fn d1(x: f64, strike: f64, tau: f64, sigma: f64) -> f64 {
    let sd = sigma * tau.sqrt();
    ((x / strike).ln() + 0.5 * sd * sd) / sd
}

/// Call price with time to maturity `tau`; intrinsic value at τ = 0.
pub fn bs_call(x: f64, strike: f64, tau: f64, sigma: f64) -> f64 {
    if tau <= 0.0 {
        return (x - strike).max(0.0);
    }
    let d = d1(x, strike, tau, sigma);
    x * norm_cdf(d) - strike * norm_cdf(d - sigma * tau.sqrt())
}

/// Put price with time to maturity `tau`; intrinsic value at τ = 0.
pub fn bs_put(x: f64, strike: f64, tau: f64, sigma: f64) -> f64 {
    if tau <= 0.0 {
        return (strike - x).max(0.0);
    }
    let d = d1(x, strike, tau, sigma);
    strike * norm_cdf(sigma * tau.sqrt() - d) - x * norm_cdf(-d)
}

/// Greeks of the call. At τ = 0 every greek vanishes except delta,
/// which takes its limit 1, 1/2 or 0 as x is above, at or below K.
pub fn call_greeks(x: f64, strike: f64, tau: f64, sigma: f64) -> Greeks {
    if tau <= 0.0 {
        let delta = if x > strike {
            1.0
        } else if x < strike {
            0.0
        } else {
            0.5
        };
        return Greeks { delta, gamma_x2: 0.0, vega: 0.0, skew_x: 0.0 };
    }
    let sd = sigma * tau.sqrt();
    let d = d1(x, strike, tau, sigma);
    let density = x * norm_pdf(d);
    let gamma_x2 = density / sd;
    Greeks {
        delta: norm_cdf(d),
        gamma_x2,
        vega: density * tau.sqrt(),
        skew_x: (0.5 + (strike / x).ln() / (sigma * sigma * tau)) * gamma_x2,
    }
}

/// Greeks of the put: delta shifted by −1, the rest as for the call.
pub fn put_greeks(x: f64, strike: f64, tau: f64, sigma: f64) -> Greeks {
    let g = call_greeks(x, strike, tau, sigma);
    Greeks { delta: g.delta - 1.0, ..g }
}
