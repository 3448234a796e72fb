//! Summary statistics, least-squares line fits and a normality test.

use crate::special::norm_cdf;

/// Running first and second moments (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Combine two accumulators (Chan et al. parallel update).
    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * (self.n as f64 * other.n as f64) / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            f64::NAN
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::new();
        for x in iter {
            m.push(x);
        }
        m
    }
}

/// Ordinary least-squares fit `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope from the residual scatter.
    pub slope_se: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> LineFit {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    assert!(x.len() >= 2, "a line fit needs at least two points");
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_se = if x.len() > 2 {
        let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    LineFit { slope, intercept, slope_se }
}

/// Weighted least squares with weights `1/σ_i²`; the slope error is the
/// formal one implied by the supplied `sigma`.
pub fn fit_line_weighted(x: &[f64], y: &[f64], sigma: &[f64]) -> LineFit {
    assert!(x.len() == y.len() && y.len() == sigma.len() && x.len() >= 2);
    let w: Vec<f64> = sigma.iter().map(|s| 1.0 / (s * s)).collect();
    let sw: f64 = w.iter().sum();
    let mx = w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() / sw;
    let my = w.iter().zip(y).map(|(w, y)| w * y).sum::<f64>() / sw;
    let sxx: f64 = w.iter().zip(x).map(|(w, x)| w * (x - mx).powi(2)).sum();
    let sxy: f64 = w.iter().zip(x.iter().zip(y)).map(|(w, (x, y))| w * (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    LineFit { slope, intercept: my - slope * mx, slope_se: (1.0 / sxx).sqrt() }
}

/// Anderson–Darling test of a sample against a normal law whose mean and
/// variance are estimated from the sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AndersonDarling {
    /// Raw A² statistic.
    pub statistic: f64,
    /// Critical values at significance 15%, 10%, 5%, 2.5%, 1%.
    pub critical: [f64; 5],
}

impl AndersonDarling {
    pub const LEVELS: [f64; 5] = [0.15, 0.10, 0.05, 0.025, 0.01];

    /// True when normality is not rejected at the given level (must be one of [`Self::LEVELS`]).
    pub fn accepts_at(&self, level: f64) -> bool {
        let idx = Self::LEVELS.iter().position(|&l| (l - level).abs() < 1e-12).expect("unsupported significance level");
        self.statistic < self.critical[idx]
    }
}

pub fn anderson_darling_normal(sample: &[f64]) -> AndersonDarling {
    let n = sample.len();
    assert!(n >= 8, "Anderson-Darling needs at least 8 observations");
    let m: Moments = sample.iter().copied().collect();
    let sd = m.variance().sqrt();
    let mut z: Vec<f64> = sample.iter().map(|x| (x - m.mean()) / sd).collect();
    z.sort_by(|a, b| a.partial_cmp(b).expect("sample contains NaN"));
    let nf = n as f64;
    let mut s = 0.0;
    for i in 0..n {
        let lo = norm_cdf(z[i]).ln();
        let hi = norm_cdf(-z[n - 1 - i]).ln();
        s += (2.0 * i as f64 + 1.0) * (lo + hi);
    }
    let statistic = -nf - s / nf;
    let base = [0.576, 0.656, 0.787, 0.918, 1.092];
    let scale = 1.0 + 4.0 / nf - 25.0 / (nf * nf);
    let mut critical = [0.0; 5];
    for (c, b) in critical.iter_mut().zip(base) {
        *c = b / scale;
    }
    AndersonDarling { statistic, critical }
}
