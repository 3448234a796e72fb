use crate::{path_rng, SamplerError, UniformGrid};
use fou_core::HurstModel;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

const CHOLESKY_LIMIT: usize = 4096;
const JITTER_LADDER: [f64; 6] = [0.0, 1e-14, 1e-13, 1e-12, 1e-11, 1e-10];

fn lag_covariances(model: &HurstModel, dt: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| model.covariance_calendar(k as f64 * dt)).collect()
}

/// Exact joint Gaussian sampling of the grid values by Cholesky factorisation.
#[derive(Debug, Clone)]
pub struct CholeskySampler {
    factor: DMatrix<f64>,
    jitter: f64,
}

impl CholeskySampler {
    pub fn new(model: &HurstModel, grid: &UniformGrid) -> Result<Self, SamplerError> {
        let n = grid.n;
        if n > CHOLESKY_LIMIT {
            return Err(SamplerError::TooLargeForCholesky { n, limit: CHOLESKY_LIMIT });
        }
        let c = lag_covariances(model, grid.dt, n);
        let cov = DMatrix::from_fn(n, n, |i, j| c[i.abs_diff(j)]);
        for &jit in &JITTER_LADDER {
            let mut m = cov.clone();
            for i in 0..n {
                m[(i, i)] += jit * c[0];
            }
            if let Some(ch) = m.cholesky() {
                return Ok(Self { factor: ch.l(), jitter: jit });
            }
        }
        let min_eigenvalue = cov.symmetric_eigenvalues().min();
        Err(SamplerError::NotPositiveDefinite { jitter: JITTER_LADDER[5], min_eigenvalue })
    }

    /// Relative diagonal jitter that was needed.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn sample(&self, seed: u64, index: u64) -> Vec<f64> {
        let mut rng = path_rng(seed, index);
        let xi = DVector::from_fn(self.factor.nrows(), |_, _| rng.sample::<f64, _>(StandardNormal));
        (&self.factor * xi).iter().copied().collect()
    }
}

/// Circulant embedding of the stationary grid covariance.
#[derive(Debug, Clone)]
pub struct CirculantSampler {
    n: usize,
    size: usize,
    /// sqrt(λ_k / M) for each embedding frequency.
    amplitude: Vec<f64>,
}

impl CirculantSampler {
    /// Tries embeddings of half-size (n−1)·{1, 2, 4, 8}.
    pub fn new(model: &HurstModel, grid: &UniformGrid) -> Result<Self, SamplerError> {
        let n = grid.n;
        if n < 2 {
            return Err(SamplerError::BadGrid("circulant embedding needs two or more points".into()));
        }
        let mut worst = 0.0;
        for pad in [1usize, 2, 4, 8] {
            let m = (n - 1) * pad;
            let size = 2 * m;
            let c = lag_covariances(model, grid.dt, m + 1);
            let mut row: Vec<Complex<f64>> =
                (0..size).map(|k| Complex::new(c[if k <= m { k } else { size - k }], 0.0)).collect();
            FftPlanner::new().plan_fft_forward(size).process(&mut row);
            let lmax = row.iter().map(|z| z.re).fold(f64::MIN, f64::max);
            let lmin = row.iter().map(|z| z.re).fold(f64::MAX, f64::min);
            if lmin >= -1e-12 * lmax {
                let amplitude = row.iter().map(|z| (z.re.max(0.0) / size as f64).sqrt()).collect();
                return Ok(Self { n, size, amplitude });
            }
            worst = lmin;
        }
        Err(SamplerError::NegativeEmbedding(worst))
    }

    pub fn embedding_size(&self) -> usize {
        self.size
    }

    /// Two independent paths from one complex transform.
    pub fn sample_pair(&self, seed: u64, index: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = path_rng(seed, index);
        let mut buf: Vec<Complex<f64>> = self
            .amplitude
            .iter()
            .map(|&a| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(a * re, a * im)
            })
            .collect();
        FftPlanner::new().plan_fft_forward(self.size).process(&mut buf);
        (buf[..self.n].iter().map(|z| z.re).collect(), buf[..self.n].iter().map(|z| z.im).collect())
    }
}

/// Exact AR(1) sampler of the classical OU process dZ = −Z/ε dt + ε^{-1/2} dW,
/// the H = 1/2 member of the family, with stationary variance 1/2.
#[derive(Debug, Clone, Copy)]
pub struct OuSampler {
    pub eps: f64,
    pub grid: UniformGrid,
}

impl OuSampler {
    pub fn sample(&self, seed: u64, index: u64) -> Vec<f64> {
        let mut rng = path_rng(seed, index);
        let decay = (-self.grid.dt / self.eps).exp();
        let innov = (0.5 * (1.0 - decay * decay)).sqrt();
        let mut z = Vec::with_capacity(self.grid.n);
        let mut x = 0.5f64.sqrt() * rng.sample::<f64, _>(StandardNormal);
        z.push(x);
        for _ in 1..self.grid.n {
            x = decay * x + innov * rng.sample::<f64, _>(StandardNormal);
            z.push(x);
        }
        z
    }
}
