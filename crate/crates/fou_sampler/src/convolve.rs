use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Lengths at or below this use the direct sum.
const DIRECT_LIMIT: usize = 1024;

/// Causal convolution y_j = Σ_{k≤j} w_{j−k} x_k with a fixed real filter.
#[derive(Clone)]
pub struct CausalConvolver {
    weights: Vec<f64>,
    fft: Option<FftPlan>,
}

#[derive(Clone)]
struct FftPlan {
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    spectrum: Vec<Complex<f64>>,
}

impl std::fmt::Debug for CausalConvolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CausalConvolver")
            .field("len", &self.weights.len())
            .field("fft", &self.fft.as_ref().map(|p| p.size))
            .finish()
    }
}

impl CausalConvolver {
    pub fn new(weights: Vec<f64>) -> Self {
        let n = weights.len();
        let fft = (n > DIRECT_LIMIT).then(|| {
            let size = (2 * n).next_power_of_two();
            let mut planner = FftPlanner::new();
            let forward = planner.plan_fft_forward(size);
            let inverse = planner.plan_fft_inverse(size);
            let mut spectrum: Vec<Complex<f64>> = weights.iter().map(|&w| Complex::new(w, 0.0)).collect();
            spectrum.resize(size, Complex::new(0.0, 0.0));
            forward.process(&mut spectrum);
            FftPlan { size, forward, inverse, spectrum }
        });
        Self { weights, fft }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Convolves `x` (length ≤ filter length) into a vector of the same length.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.apply_pair(x, None).0
    }

    /// Convolves two inputs of equal length; with FFT both share one
    /// complex transform.
    pub fn apply_pair(&self, x: &[f64], y: Option<&[f64]>) -> (Vec<f64>, Vec<f64>) {
        let n = x.len();
        assert!(n <= self.weights.len(), "input longer than filter");
        if let Some(y) = y {
            assert_eq!(y.len(), n);
        }
        match &self.fft {
            Some(plan) if n > DIRECT_LIMIT / 2 => {
                let mut buf: Vec<Complex<f64>> = match y {
                    Some(y) => x.iter().zip(y).map(|(&a, &b)| Complex::new(a, b)).collect(),
                    None => x.iter().map(|&a| Complex::new(a, 0.0)).collect(),
                };
                buf.resize(plan.size, Complex::new(0.0, 0.0));
                plan.forward.process(&mut buf);
                for (b, s) in buf.iter_mut().zip(&plan.spectrum) {
                    *b *= s;
                }
                plan.inverse.process(&mut buf);
                let scale = 1.0 / plan.size as f64;
                let re = buf[..n].iter().map(|c| c.re * scale).collect();
                let im = if y.is_some() { buf[..n].iter().map(|c| c.im * scale).collect() } else { Vec::new() };
                (re, im)
            }
            _ => {
                let re = self.direct(x);
                let im = y.map(|y| self.direct(y)).unwrap_or_default();
                (re, im)
            }
        }
    }

    fn direct(&self, x: &[f64]) -> Vec<f64> {
        let w = &self.weights;
        (0..x.len()).map(|j| (0..=j).map(|k| w[j - k] * x[k]).sum()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_matches_direct() {
        let n = 3000;
        let w: Vec<f64> = (0..n).map(|k| 1.0 / (1.0 + k as f64).sqrt()).collect();
        let x: Vec<f64> = (0..n).map(|k| ((k * 37 % 101) as f64 - 50.0) / 50.0).collect();
        let y: Vec<f64> = (0..n).map(|k| ((k * 13 % 29) as f64 - 14.0) / 14.0).collect();
        let conv = CausalConvolver::new(w);
        let (a, b) = conv.apply_pair(&x, Some(&y));
        let da = conv.direct(&x);
        let db = conv.direct(&y);
        for j in 0..n {
            assert!((a[j] - da[j]).abs() < 1e-10, "{j}");
            assert!((b[j] - db[j]).abs() < 1e-10, "{j}");
        }
    }

    #[test]
    fn short_input_uses_prefix_of_filter() {
        let conv = CausalConvolver::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(conv.apply(&[1.0, 1.0]), vec![1.0, 3.0]);
    }
}
