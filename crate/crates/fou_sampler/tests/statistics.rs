use fou_core::HurstModel;
use fou_sampler::{sample_paths, CholeskySampler, CirculantSampler, FouSampler, OuSampler, UniformGrid};
use fracvol_numerics::stats::{anderson_darling_normal, fit_line, Moments};

fn model() -> HurstModel {
    HurstModel::new(0.6, 0.1).unwrap()
}

/// Per-path averages of z_j·z_{j+lag}; averaging within a path keeps the
/// paths independent so the standard error is honest.
fn lag_products(paths: &[Vec<f64>], lag: usize) -> Moments {
    paths
        .iter()
        .map(|z| {
            let n = z.len() - lag;
            (0..n).map(|j| z[j] * z[j + lag]).sum::<f64>() / n as f64
        })
        .collect()
}

#[test]
fn moving_average_variance_and_lag_one_eps() {
    let m = model();
    let grid = UniformGrid::new(0.0, m.eps / 20.0, 512).unwrap();
    let paths: Vec<Vec<f64>> = sample_paths(m, grid, 4000, 5).unwrap().into_iter().map(|p| p.z().to_vec()).collect();
    for lag in [0usize, 20] {
        let est = lag_products(&paths, lag);
        let want = m.covariance_calendar(lag as f64 * grid.dt);
        assert!(
            (est.mean() - want).abs() < 3.0 * est.std_error(),
            "lag {lag}: {} vs {want} ± {}",
            est.mean(),
            est.std_error()
        );
    }
}

#[test]
fn marginal_is_gaussian() {
    let m = model();
    let grid = UniformGrid::new(0.0, m.eps / 20.0, 8).unwrap();
    let paths = sample_paths(m, grid, 10_000, 9).unwrap();
    let x: Vec<f64> = paths.iter().map(|p| p.z()[3] / m.sigma_ou()).collect();
    assert!(anderson_darling_normal(&x).accepts_at(0.01));
}

#[test]
fn cholesky_and_circulant_reproduce_covariance() {
    let m = model();
    let grid = UniformGrid::new(0.0, m.eps / 20.0, 256).unwrap();
    let ch = CholeskySampler::new(&m, &grid).unwrap();
    let ce = CirculantSampler::new(&m, &grid).unwrap();
    let a: Vec<Vec<f64>> = (0..3000).map(|i| ch.sample(2, i)).collect();
    let b: Vec<Vec<f64>> = (0..1500)
        .flat_map(|i| {
            let (x, y) = ce.sample_pair(3, i);
            [x, y]
        })
        .collect();
    for lag in [0usize, 20, 100] {
        let want = m.covariance_calendar(lag as f64 * grid.dt);
        for est in [lag_products(&a, lag), lag_products(&b, lag)] {
            assert!((est.mean() - want).abs() < 3.5 * est.std_error(), "lag {lag}: {} vs {want}", est.mean());
        }
    }
}

#[test]
fn classical_ou_variance_is_one_half() {
    let grid = UniformGrid::new(0.0, 0.005, 200).unwrap();
    let ou = OuSampler { eps: 0.1, grid };
    let paths: Vec<Vec<f64>> = (0..4000).map(|i| ou.sample(4, i)).collect();
    let est = lag_products(&paths, 0);
    assert!((est.mean() - 0.5).abs() < 3.0 * est.std_error());
}

#[test]
fn long_memory_slope() {
    let m = model();
    let grid = UniformGrid::new(0.0, m.eps / 20.0, 8192).unwrap();
    let sampler = FouSampler::with_default_history(m, grid).unwrap();
    let lags: Vec<usize> = (0..9).map(|k| (200.0 * 5f64.powf(k as f64 / 8.0)).round() as usize).collect();
    let mut acc = vec![Moments::new(); lags.len()];
    for i in 0..4000 {
        let p = sampler.path(17, i);
        let z = p.z();
        for (a, &l) in acc.iter_mut().zip(&lags) {
            let n = z.len() - l;
            a.push((0..n).map(|j| z[j] * z[j + l]).sum::<f64>() / n as f64);
        }
    }
    let x: Vec<f64> = lags.iter().map(|&l| (l as f64).ln()).collect();
    let y: Vec<f64> = acc.iter().map(|a| a.mean().ln()).collect();
    let fit = fit_line(&x, &y);
    assert!((fit.slope - (2.0 * 0.6 - 2.0)).abs() < 0.1, "slope {}", fit.slope);
}
