use crate::SamplerError;
use fou_core::HurstModel;

/// Largest pre-history admitted, in units of ε.
const MAX_SPAN_EPS: f64 = 1e12;

/// How the pre-history before the first grid time is discretised.
///
/// Cells are laid out backwards from the grid start with width
/// `max(fine_width, growth·distance)` until `span` is covered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistorySpec {
    pub span: f64,
    pub fine_width: f64,
    pub growth: f64,
}

impl HistorySpec {
    pub fn new(span: f64, fine_width: f64, growth: f64) -> Result<Self, SamplerError> {
        if !(span >= 0.0 && span.is_finite()) {
            return Err(SamplerError::BadGrid(format!("history span {span} must be finite and non-negative")));
        }
        if !(fine_width > 0.0) {
            return Err(SamplerError::BadGrid(format!("history cell width {fine_width} must be positive")));
        }
        if !(0.0..1.0).contains(&growth) {
            return Err(SamplerError::BadGrid(format!("history growth {growth} must lie in [0, 1)")));
        }
        Ok(Self { span, fine_width, growth })
    }

    /// Span chosen so that the kernel mass beyond it, ∫_{span/ε}^∞ K², is at most `tol`.
    pub fn for_variance_tolerance(model: &HurstModel, tol: f64) -> Self {
        let l = span_for_tail(model, tol);
        Self { span: l * model.eps, fine_width: model.eps / 20.0, growth: 0.05 }
    }

    /// Span adequate for time integrals of the conditional mean over a
    /// horizon of length `horizon`.
    ///
    /// History beyond distance L contributes a fraction of about
    /// α²(L/horizon)^{2α−1}/((1−2α)·I) to the variance of such integrals,
    /// with I = ∫((1+u)^α − u^α)² du; the span makes this at most `rel_tol`,
    /// and is never shorter than the 1e-4 variance-tolerance span.
    pub fn for_horizon(model: &HurstModel, horizon: f64, rel_tol: f64) -> Self {
        let base = Self::for_variance_tolerance(model, 1e-4);
        let a = model.hurst.alpha();
        let i = model.hurst.increment_l2_closed();
        let ratio = (a * a / ((1.0 - 2.0 * a) * i * rel_tol)).powf(1.0 / (1.0 - 2.0 * a));
        let span = (horizon * ratio).max(base.span).min(MAX_SPAN_EPS * model.eps);
        Self { span, ..base }
    }

    /// Fraction of σ_ou² missing from a factor value at the grid start.
    pub fn tail_fraction(&self, model: &HurstModel) -> f64 {
        model.hurst.kernel_l2_tail(self.span / model.eps)
    }
}

fn span_for_tail(model: &HurstModel, tol: f64) -> f64 {
    let h = &model.hurst;
    let mut hi = 1.0;
    while h.kernel_l2_tail(hi) > tol {
        hi *= 2.0;
        if hi > MAX_SPAN_EPS {
            return MAX_SPAN_EPS;
        }
    }
    let mut lo = hi / 2.0;
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if h.kernel_l2_tail(mid) > tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Pre-history noise cells, oldest first, ending at the grid start.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryCells {
    edges: Vec<f64>,
}

impl HistoryCells {
    pub fn build(t0: f64, spec: &HistorySpec) -> Self {
        let mut dist = vec![0.0];
        let mut d = 0.0;
        while d < spec.span {
            let w = spec.fine_width.max(spec.growth * d);
            d += w;
            dist.push(d);
        }
        let edges = dist.iter().rev().map(|&d| t0 - d).collect();
        Self { edges }
    }

    /// Cells with the given increasing edges.
    pub fn from_edges(edges: Vec<f64>) -> Result<Self, SamplerError> {
        if edges.is_empty() || edges.windows(2).any(|e| !(e[1] > e[0])) || !edges.iter().all(|e| e.is_finite()) {
            return Err(SamplerError::BadGrid("history edges must be finite and strictly increasing".into()));
        }
        Ok(Self { edges })
    }

    pub fn len(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell edges in increasing time order.
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn start(&self) -> f64 {
        self.edges[0]
    }

    pub fn span(&self) -> f64 {
        self.edges[self.edges.len() - 1] - self.edges[0]
    }
}
