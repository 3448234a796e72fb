//! Stationary autocorrelation C_Z of the ε-scaled fOU process.

use crate::Hurst;
use fracvol_numerics::quad::{adaptive, adaptive_semi_infinite, GaussLegendre};
use fracvol_numerics::special::gamma;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Which representation of C_Z to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorrelationForm {
    /// (2 sin πH/π) ∫_0^∞ cos(sx) x^{1−2H}/(1+x²) dx.
    #[default]
    Spectral,
    /// [½ ∫ e^{−|v|} |s+v|^{2H} dv − |s|^{2H}] / Γ(2H+1).
    TimeDomain,
}

fn gl16() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(16))
}

impl Hurst {
    /// C_Z(s) at a dimensionless lag, spectral form.
    pub fn correlation(&self, s: f64) -> f64 {
        self.correlation_by(s, CorrelationForm::Spectral)
    }

    pub fn correlation_by(&self, s: f64, form: CorrelationForm) -> f64 {
        let s = s.abs();
        if s == 0.0 {
            return 1.0;
        }
        match form {
            CorrelationForm::Spectral => self.correlation_spectral(s),
            CorrelationForm::TimeDomain => self.correlation_time_domain(s),
        }
    }

    fn correlation_spectral(&self, s: f64) -> f64 {
        let b = 2.0 * self.h - 1.0;
        let g = |x: f64| x.powf(-b) / (1.0 + x * x);
        let half_period = PI / s;
        let x1 = half_period.min(1.0);

        // Near the origin x^{−b} is removed by x = y^{1/(1−b)}.
        let q = 1.0 / (1.0 - b);
        let head = adaptive(
            |y: f64| {
                let x = y.powf(q);
                (s * x).cos() / (1.0 + x * x) * q
            },
            0.0,
            x1.powf(1.0 - b),
            1e-16,
            1e-15,
        )
        .expect("smooth integrand after substitution")
        .value;

        let rule = gl16();
        let mut total = head;
        // Doubling panels until the first half period.
        let mut lo = x1;
        while lo < half_period {
            let hi = (2.0 * lo).min(half_period);
            total += rule.integrate(|x| (s * x).cos() * g(x), lo, hi);
            lo = hi;
        }
        // Half-period panels, then two integration-by-parts terms for the rest.
        let x_end = (1000.0 / s).max(100.0);
        let k_end = (x_end / half_period).ceil().max(1.0) as usize;
        for k in 1..k_end {
            let a = k as f64 * half_period;
            total += rule.integrate(|x| (s * x).cos() * g(x), a, a + half_period);
        }
        let xe = k_end as f64 * half_period;
        let ge = g(xe);
        let dge = ge * (-b / xe - 2.0 * xe / (1.0 + xe * xe));
        total += -(s * xe).sin() * ge / s - (s * xe).cos() * dge / (s * s);

        2.0 * (PI * self.h).sin() / PI * total
    }

    fn correlation_time_domain(&self, s: f64) -> f64 {
        let p = 2.0 * self.h;
        let g2h1 = gamma(p + 1.0);
        // v < −s: e^{v} (−s−v)^{2H} integrates to e^{−s} Γ(2H+1).
        let left = (-s).exp() * g2h1;
        let middle =
            adaptive(|v: f64| v.exp() * (s + v).powf(p), -s, 0.0, 0.0, 1e-15).expect("smooth on the panel").value;
        let right = adaptive_semi_infinite(|v: f64| (-v).exp() * (s + v).powf(p), 0.0, 0.0, 1e-15)
            .expect("exponentially decaying")
            .value;
        (0.5 * (left + middle + right) - s.powf(p)) / g2h1
    }
}
