//! Volatility maps σ = F(Z) of the fOU factor, their Gaussian moments,
//! Hermite coefficients of F̃(z) = F(σ_ou z)², and the volatility
//! autocovariance Ψ(C_Z).

mod hermite;
mod pchip;

pub use hermite::{hermite_coefficients_of, HermiteCoefficients};
pub use pchip::Pchip;

use fou_core::{Hurst, HurstModel};
use fracvol_numerics::special::norm_cdf;
use fracvol_numerics::{GaussHermite, GaussLegendre};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VolError {
    #[error("invalid volatility parameters: {0}")]
    Invalid(String),
    #[error("volatility function must be positive and strictly increasing: {0}")]
    Shape(String),
    #[error("moment {name} did not settle under node doubling: {coarse:e} vs {fine:e}")]
    Quadrature { name: &'static str, coarse: f64, fine: f64 },
    #[error("constant volatility is degenerate and only admitted for tests")]
    Degenerate,
    #[error("k_max = {0} exceeds 60")]
    TooManyCoefficients(usize),
}

/// Serialisable description of a volatility map, `{"kind": ..., "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case", deny_unknown_fields)]
pub enum VolSpec {
    /// F(x) = sqrt(∫_{−∞}^{x/σ_ou} e^{−y²/4} dy).
    PaperAppendix {},
    /// F(z) = lo + (hi − lo)/(1 + e^{−κz}).
    Logistic {
        #[serde(default = "default_lo")]
        lo: f64,
        #[serde(default = "default_hi")]
        hi: f64,
        #[serde(default = "default_kappa")]
        kappa: f64,
    },
    /// Monotone cubic interpolation of (x, σ) pairs in factor units.
    UserTable { x: Vec<f64>, sigma: Vec<f64> },
    /// F ≡ value; degenerate, for tests only.
    Constant { value: f64 },
}

fn default_lo() -> f64 {
    0.05
}
fn default_hi() -> f64 {
    0.5
}
fn default_kappa() -> f64 {
    1.0
}

impl VolSpec {
    pub fn logistic_default() -> Self {
        VolSpec::Logistic { lo: default_lo(), hi: default_hi(), kappa: default_kappa() }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    GaussianMass { sigma_ou: f64 },
    Logistic { lo: f64, hi: f64, kappa: f64 },
    Table(Pchip),
    Constant(f64),
}

impl Shape {
    fn eval(&self, x: f64) -> f64 {
        match self {
            Shape::GaussianMass { sigma_ou } => gaussian_mass_sq(x / sigma_ou).sqrt(),
            Shape::Logistic { lo, hi, kappa } => lo + (hi - lo) / (1.0 + (-kappa * x).exp()),
            Shape::Table(p) => p.eval(x),
            Shape::Constant(c) => *c,
        }
    }

    fn deriv(&self, x: f64) -> f64 {
        match self {
            Shape::GaussianMass { sigma_ou } => {
                let u = x / sigma_ou;
                let f = gaussian_mass_sq(u).sqrt();
                if f == 0.0 {
                    0.0
                } else {
                    (-u * u / 4.0).exp() / (2.0 * sigma_ou * f)
                }
            }
            Shape::Logistic { lo, hi, kappa } => {
                let e = (-kappa * x.abs()).exp();
                (hi - lo) * kappa * e / ((1.0 + e) * (1.0 + e))
            }
            Shape::Table(p) => p.deriv(x),
            Shape::Constant(_) => 0.0,
        }
    }

    fn is_tabulated(&self) -> bool {
        matches!(self, Shape::Table(_))
    }
}

/// ∫_{−∞}^{u} e^{−y²/4} dy = 2√π Φ(u/√2).
fn gaussian_mass_sq(u: f64) -> f64 {
    2.0 * PI.sqrt() * norm_cdf(u / std::f64::consts::SQRT_2)
}

/// Gaussian averages of F over the stationary law N(0, σ_ou²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolMoments {
    /// σ̄² = ⟨F²⟩.
    pub sigma_bar_sq: f64,
    /// σ̃ = ⟨F⟩.
    pub sigma_tilde: f64,
    /// ⟨FF′⟩.
    pub ff_prime: f64,
    /// ⟨F′⟩.
    pub f_prime: f64,
    /// ⟨F′²⟩.
    pub f_prime_sq: f64,
}

impl VolMoments {
    pub fn sigma_bar(&self) -> f64 {
        self.sigma_bar_sq.sqrt()
    }

    /// Var(σ_t) = ⟨F²⟩ − ⟨F⟩².
    pub fn variance(&self) -> f64 {
        self.sigma_bar_sq - self.sigma_tilde * self.sigma_tilde
    }
}

const Z_RANGE: f64 = 12.0;
const MAX_LEVEL: usize = 3;

/// A volatility map tied to a Hurst exponent (through σ_ou) with its moments cached.
#[derive(Debug, Clone, PartialEq)]
pub struct VolFunction {
    spec: VolSpec,
    shape: Shape,
    sigma_ou: f64,
    moments: VolMoments,
    /// Node-doubling level at which every moment settled.
    level: usize,
}

impl VolFunction {
    /// Validates the map and computes its moments; rejects the constant kind.
    pub fn new(spec: VolSpec, hurst: &Hurst) -> Result<Self, VolError> {
        if matches!(spec, VolSpec::Constant { .. }) {
            return Err(VolError::Degenerate);
        }
        Self::build(spec, hurst)
    }

    /// Admits the degenerate constant map; intended for tests.
    pub fn new_allow_degenerate(spec: VolSpec, hurst: &Hurst) -> Result<Self, VolError> {
        Self::build(spec, hurst)
    }

    pub fn paper_appendix(hurst: &Hurst) -> Self {
        Self::new(VolSpec::PaperAppendix {}, hurst).expect("Gaussian-mass map is valid")
    }

    pub fn logistic_default(hurst: &Hurst) -> Self {
        Self::new(VolSpec::logistic_default(), hurst).expect("default logistic map is valid")
    }

    fn build(spec: VolSpec, hurst: &Hurst) -> Result<Self, VolError> {
        let sigma_ou = hurst.sigma_ou();
        let shape = match &spec {
            VolSpec::PaperAppendix {} => Shape::GaussianMass { sigma_ou },
            &VolSpec::Logistic { lo, hi, kappa } => {
                if !(lo > 0.0 && hi > lo && kappa > 0.0 && hi.is_finite() && kappa.is_finite()) {
                    return Err(VolError::Invalid(format!(
                        "logistic needs 0 < lo < hi and kappa > 0, got ({lo}, {hi}, {kappa})"
                    )));
                }
                Shape::Logistic { lo, hi, kappa }
            }
            VolSpec::UserTable { x, sigma } => {
                if sigma.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(VolError::Shape("table volatilities must be strictly increasing".into()));
                }
                if sigma.iter().any(|&s| s <= 0.0) {
                    return Err(VolError::Shape("table volatilities must be positive".into()));
                }
                Shape::Table(Pchip::new(x.clone(), sigma.clone()).map_err(VolError::Invalid)?)
            }
            &VolSpec::Constant { value } => {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(VolError::Invalid(format!("constant volatility must be positive, got {value}")));
                }
                Shape::Constant(value)
            }
        };
        if !matches!(shape, Shape::Constant(_)) {
            check_shape(&shape, sigma_ou)?;
        }
        let zero = VolMoments { sigma_bar_sq: 0.0, sigma_tilde: 0.0, ff_prime: 0.0, f_prime: 0.0, f_prime_sq: 0.0 };
        let mut f = Self { spec, shape, sigma_ou, moments: zero, level: 1 };
        f.moments = match f.shape {
            // Exact, so that G vanishes identically.
            Shape::Constant(c) => VolMoments { sigma_bar_sq: c * c, sigma_tilde: c, ..zero },
            _ => f.compute_moments()?,
        };
        Ok(f)
    }

    pub fn spec(&self) -> &VolSpec {
        &self.spec
    }

    pub fn sigma_ou(&self) -> f64 {
        self.sigma_ou
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.shape.eval(x)
    }

    pub fn evaluate_deriv(&self, x: f64) -> f64 {
        self.shape.deriv(x)
    }

    /// G(x) = (F(x)² − σ̄²)/2.
    pub fn g(&self, x: f64) -> f64 {
        0.5 * (self.evaluate(x).powi(2) - self.moments.sigma_bar_sq)
    }

    /// G′(x) = F(x)F′(x).
    pub fn g_prime(&self, x: f64) -> f64 {
        self.evaluate(x) * self.evaluate_deriv(x)
    }

    /// F̃(z) = F(σ_ou z)².
    pub fn f_tilde(&self, z: f64) -> f64 {
        self.evaluate(self.sigma_ou * z).powi(2)
    }

    pub fn moments(&self) -> &VolMoments {
        &self.moments
    }

    pub fn sigma_bar(&self) -> f64 {
        self.moments.sigma_bar()
    }

    /// E[g(Z)] for Z ~ N(0,1) at refinement level 0 or 1.
    fn expect_level<G: Fn(f64) -> f64>(&self, g: &G, level: usize) -> f64 {
        if self.shape.is_tabulated() {
            let rule = GaussLegendre::new(16 << level);
            let edges = self.table_edges();
            let p = |z: f64| (-0.5 * z * z).exp() / (2.0 * PI).sqrt();
            rule.integrate_panels(|z| g(z) * p(z), &edges)
        } else {
            GaussHermite::new(64 << level).expect(g)
        }
    }

    /// Panel edges on [−12, 12] in standard-normal units with every knot as an edge.
    fn table_edges(&self) -> Vec<f64> {
        let Shape::Table(p) = &self.shape else { unreachable!() };
        let mut edges: Vec<f64> = p.knots().iter().map(|x| x / self.sigma_ou).filter(|z| z.abs() < Z_RANGE).collect();
        edges.push(-Z_RANGE);
        edges.push(Z_RANGE);
        for k in 0..=96 {
            edges.push(-Z_RANGE + 2.0 * Z_RANGE * k as f64 / 96.0);
        }
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        edges.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        edges
    }

    /// E[g(Z)], Z ~ N(0,1), with the rule the moments were validated on.
    pub fn expect_standard<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        self.expect_level(&g, self.level)
    }

    /// Doubles the node count (64 up to 512 Gauss–Hermite nodes, or 16 up
    /// to 128 Legendre nodes per panel) until successive values agree to 1e-10.
    fn settled<G: Fn(f64) -> f64>(&self, name: &'static str, g: G, level: &mut usize) -> Result<f64, VolError> {
        let mut coarse = self.expect_level(&g, 0);
        for l in 1..=MAX_LEVEL {
            let fine = self.expect_level(&g, l);
            if (coarse - fine).abs() <= 1e-10 * fine.abs().max(1.0) {
                *level = (*level).max(l);
                return Ok(fine);
            }
            if l == MAX_LEVEL {
                return Err(VolError::Quadrature { name, coarse, fine });
            }
            coarse = fine;
        }
        unreachable!()
    }

    fn compute_moments(&mut self) -> Result<VolMoments, VolError> {
        let s = self.sigma_ou;
        let mut level = 1;
        let m = VolMoments {
            sigma_bar_sq: self.settled("<F^2>", |z| self.evaluate(s * z).powi(2), &mut level)?,
            sigma_tilde: self.settled("<F>", |z| self.evaluate(s * z), &mut level)?,
            ff_prime: self.settled("<FF'>", |z| self.g_prime(s * z), &mut level)?,
            f_prime: self.settled("<F'>", |z| self.evaluate_deriv(s * z), &mut level)?,
            f_prime_sq: self.settled("<F'^2>", |z| self.evaluate_deriv(s * z).powi(2), &mut level)?,
        };
        self.level = level;
        Ok(m)
    }

    /// ⟨G′⟩ by Gaussian integration by parts, C_1/(2σ_ou); an independent
    /// route to `moments().ff_prime` that never differentiates F.
    pub fn ff_prime_by_parts(&self) -> f64 {
        let c1 = self.expect_standard(|z| z * self.f_tilde(z));
        c1 / (2.0 * self.sigma_ou)
    }

    /// Hermite coefficients of F̃ up to `k_max` (≤ 60).
    pub fn hermite_coefficients(&self, k_max: usize) -> Result<HermiteCoefficients, VolError> {
        if k_max > 60 {
            return Err(VolError::TooManyCoefficients(k_max));
        }
        Ok(if self.shape.is_tabulated() {
            let edges = fine_edges(&self.table_edges());
            hermite::coefficients_by_panels(|z| self.f_tilde(z), k_max, &edges)
        } else {
            hermite_coefficients_of(|z| self.f_tilde(z), k_max)
        })
    }

    /// Hermite coefficients of z ↦ F(σ_ou z) itself, which drive Ψ.
    pub fn hermite_coefficients_of_f(&self, k_max: usize) -> HermiteCoefficients {
        let s = self.sigma_ou;
        if self.shape.is_tabulated() {
            hermite::coefficients_by_panels(|z| self.evaluate(s * z), k_max, &fine_edges(&self.table_edges()))
        } else {
            hermite_coefficients_of(|z| self.evaluate(s * z), k_max)
        }
    }

    /// Ψ(C) = Cov(F(σ_ou X), F(σ_ou Y)) for standard normals with correlation C,
    /// by a 2-D Gauss–Hermite product rule on X = z₁, Y = C z₁ + √(1−C²) z₂.
    pub fn psi(&self, c: f64) -> f64 {
        if c.abs() >= 1.0 {
            return self.moments.variance();
        }
        let s = self.sigma_ou;
        let rule = GaussHermite::new(96);
        let r = (1.0 - c * c).sqrt();
        let cross = rule.expect(|z1| {
            let f1 = self.evaluate(s * z1);
            f1 * rule.expect(|z2| self.evaluate(s * (c * z1 + r * z2)))
        });
        cross - self.moments.sigma_tilde.powi(2)
    }

    /// Ψ(C) from the Hermite series Σ_{k≥1} C^k b_k²/k! of F.
    pub fn psi_by_series(&self, c: f64, k_max: usize) -> f64 {
        let b = self.hermite_coefficients_of_f(k_max);
        (1..=k_max).map(|k| c.powi(k as i32) * b.normalized()[k].powi(2)).sum()
    }

    /// Cov(σ_t, σ_{t+s}) = Ψ(C_Z(s/ε)) at a calendar lag s.
    pub fn vol_autocovariance(&self, model: &HurstModel, s: f64) -> f64 {
        if s == 0.0 {
            return self.moments.variance();
        }
        self.psi(model.hurst.correlation(s / model.eps))
    }

    /// Leading long-lag form σ_ou²⟨F′⟩² C_Z-tail of the volatility autocovariance.
    pub fn vol_autocovariance_tail(&self, model: &HurstModel, s: f64) -> f64 {
        let h = &model.hurst;
        let u = s / model.eps;
        model.sigma_ou_sq()
            * self.moments.f_prime.powi(2)
            * u.powf(2.0 * h.value() - 2.0)
            * h.correlation_tail_constant()
    }
}

fn fine_edges(edges: &[f64]) -> Vec<f64> {
    let mut out = vec![edges[0]];
    for w in edges.windows(2) {
        let k = ((w[1] - w[0]) / 0.05).ceil().max(1.0) as usize;
        for i in 1..=k {
            out.push(w[0] + (w[1] - w[0]) * i as f64 / k as f64);
        }
    }
    out
}

/// Checks positivity and strict increase on a dense grid of ±8σ_ou.
fn check_shape(shape: &Shape, sigma_ou: f64) -> Result<(), VolError> {
    let n = 4001;
    let mut prev = f64::NEG_INFINITY;
    for i in 0..n {
        let x = sigma_ou * (-8.0 + 16.0 * i as f64 / (n - 1) as f64);
        let v = shape.eval(x);
        let d = shape.deriv(x);
        if !(v > 0.0 && v.is_finite() && d.is_finite()) {
            return Err(VolError::Shape(format!("F({x}) = {v}, F'({x}) = {d}")));
        }
        if !shape.is_tabulated() && v <= prev {
            return Err(VolError::Shape(format!("not increasing near x = {x}")));
        }
        prev = v;
    }
    Ok(())
}
