//! Covariance matrices of the field on finite sets of (t, T) points and
//! Gaussian realisations.

use crate::correlation::cphi;
use crate::FieldError;
use fou_core::Hurst;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::collections::HashMap;

/// Diagonal jitters tried in turn when factorising.
const JITTERS: [f64; 6] = [0.0, 1e-14, 1e-13, 1e-12, 1e-11, 1e-10];

/// Correlation matrix of ψ on a list of (t, T) points with t < T.
#[derive(Debug, Clone, PartialEq)]
pub struct TTCovarianceGrid {
    coords: Vec<(f64, f64)>,
    cov: DMatrix<f64>,
    hurst: Hurst,
}

impl TTCovarianceGrid {
    pub fn new(coords: Vec<(f64, f64)>, hurst: Hurst) -> Result<Self, FieldError> {
        if coords.is_empty() {
            return Err(FieldError::Invalid("grid needs at least one point".into()));
        }
        if let Some(&(t, m)) = coords.iter().find(|(t, m)| !(m > t) || !t.is_finite() || !m.is_finite()) {
            return Err(FieldError::Degenerate { t, maturity: m, t2: t, maturity2: m });
        }
        let n = coords.len();
        // Entries with identical correlation arguments share one evaluation;
        // self-similar grids repeat them heavily.
        let mut index: HashMap<[u64; 3], usize> = HashMap::new();
        let mut unique: Vec<(usize, usize)> = Vec::new();
        let mut slot = vec![usize::MAX; n * (n + 1) / 2];
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                let key = argument_key(coords[i], coords[j]);
                let next = unique.len();
                let id = *index.entry(key).or_insert_with(|| {
                    unique.push((i, j));
                    next
                });
                slot[k] = id;
                k += 1;
            }
        }
        let values: Vec<f64> = unique
            .par_iter()
            .map(|&(i, j)| {
                if i == j {
                    Ok(1.0)
                } else {
                    let ((t, m), (t2, m2)) = (coords[i], coords[j]);
                    cphi(t, t2, m, m2, &hurst)
                }
            })
            .collect::<Result<_, _>>()?;
        let mut cov = DMatrix::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                let v = values[slot[k]];
                cov[(i, j)] = v;
                cov[(j, i)] = v;
                k += 1;
            }
        }
        Ok(Self { coords, cov, hurst })
    }

    /// Points (T − τ_k, T) for times to maturity τ_k = kT/n, k = 1..n.
    pub fn fixed_maturity(maturity: f64, n: usize, hurst: Hurst) -> Result<Self, FieldError> {
        let coords = (1..=n).map(|k| (maturity - maturity * k as f64 / n as f64, maturity)).collect();
        Self::new(coords, hurst)
    }

    /// Points (t_k, t_k + τ) for t_k = k·span/(n−1), k = 0..n−1.
    pub fn fixed_ttm(tau: f64, span: f64, n: usize, hurst: Hurst) -> Result<Self, FieldError> {
        let step = if n > 1 { span / (n - 1) as f64 } else { 0.0 };
        let coords = (0..n).map(|k| (k as f64 * step, k as f64 * step + tau)).collect();
        Self::new(coords, hurst)
    }

    /// Points (t, t + τ_k) for τ_k = k·max_tau/n, k = 1..n.
    pub fn fixed_time(t: f64, max_tau: f64, n: usize, hurst: Hurst) -> Result<Self, FieldError> {
        let coords = (1..=n).map(|k| (t, t + max_tau * k as f64 / n as f64)).collect();
        Self::new(coords, hurst)
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[(f64, f64)] {
        &self.coords
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn hurst(&self) -> &Hurst {
        &self.hurst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.cov.clone()).eigenvalues.min()
    }

    /// Lower Cholesky factor after the smallest admissible diagonal jitter.
    pub fn factor(&self) -> Result<(DMatrix<f64>, f64), FieldError> {
        for &jitter in &JITTERS {
            let mut m = self.cov.clone();
            for i in 0..m.nrows() {
                m[(i, i)] += jitter;
            }
            if let Some(c) = m.cholesky() {
                return Ok((c.l(), jitter));
            }
        }
        Err(FieldError::NotPositiveDefinite {
            jitter: JITTERS[JITTERS.len() - 1],
            min_eigenvalue: self.min_eigenvalue(),
        })
    }
}

fn argument_key((t, m): (f64, f64), (t2, m2): (f64, f64)) -> [u64; 3] {
    let ((t, m), (t2, m2)) = if t <= t2 { ((t, m), (t2, m2)) } else { ((t2, m2), (t, m)) };
    let g = ((m - t) * (m2 - t2)).sqrt();
    [((m - t) / (m2 - t2)).sqrt().to_bits(), ((t2 - t) / g).to_bits(), ((m2 - t) / g).to_bits()]
}

/// Realisations of the field on a grid; `draws[k]` is one realisation.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSamples {
    pub draws: Vec<Vec<f64>>,
    /// Diagonal jitter the factorisation needed.
    pub jitter: f64,
}

/// `n` zero-mean Gaussian draws with the grid covariance; draw k uses its
/// own counter-based stream of `seed`.
pub fn sample_field(grid: &TTCovarianceGrid, n: usize, seed: u64) -> Result<FieldSamples, FieldError> {
    let (l, jitter) = grid.factor()?;
    let m = grid.len();
    let draws = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let z = nalgebra::DVector::from_iterator(m, (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)));
            (&l * z).iter().copied().collect()
        })
        .collect();
    Ok(FieldSamples { draws, jitter })
}
