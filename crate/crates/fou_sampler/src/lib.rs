//! Stationary sampling of the ε-scaled fOU factor and its conditional law.
//!
//! The primary sampler discretises the moving-average representation
//! Z_t = σ_ou ∫ K^ε(t−u) dW_u on a set of noise cells: a geometrically graded
//! pre-history followed by the cells of a uniform observation grid. Every
//! [`FouPath`] keeps its cell increments, so conditional moments given the
//! path up to a grid time are available. Cholesky and circulant-embedding
//! samplers produce factor values only and serve as independent checks.

mod alternative;
mod conditional;
mod convolve;
mod grid;
mod history;
mod sampler;

pub use alternative::{CholeskySampler, CirculantSampler, OuSampler};
pub use conditional::{ConditionalLaw, ConditionalProjector, DEFAULT_TOLERANCE};
pub use convolve::CausalConvolver;
pub use grid::UniformGrid;
pub use history::{HistoryCells, HistorySpec};
pub use sampler::{sample_paths, FouPath, FouSampler, MIN_STEPS_PER_EPS};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SamplerError {
    #[error("grid spacing {dt:e} exceeds eps/20 = {limit:e}")]
    GridTooCoarse { dt: f64, limit: f64 },
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error("conditioning time {t} is not a grid time of the path")]
    NotGridTime { t: f64 },
    #[error("target time {s} precedes conditioning time {t}")]
    TargetBeforeConditioning { t: f64, s: f64 },
    #[error("path carries no driving noise")]
    NoNoise,
    #[error("history span {span:e} leaves tail variance fraction {tail:e} above tolerance {tol:e}")]
    HistoryTooShort { span: f64, tail: f64, tol: f64 },
    #[error("covariance matrix not positive definite after jitter {jitter:e}; smallest eigenvalue {min_eigenvalue:e}")]
    NotPositiveDefinite { jitter: f64, min_eigenvalue: f64 },
    #[error("circulant embedding has negative eigenvalue {0:e} at the largest padding")]
    NegativeEmbedding(f64),
    #[error("grid of {n} points exceeds the Cholesky limit {limit}")]
    TooLargeForCholesky { n: usize, limit: usize },
    #[error("expected {expected} normals, got {got}")]
    NoiseLength { expected: usize, got: usize },
}

/// Counter-based stream for path `index` under `seed`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
