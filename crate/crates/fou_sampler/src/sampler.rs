use crate::{path_rng, CausalConvolver, HistoryCells, HistorySpec, SamplerError, UniformGrid};
use fou_core::HurstModel;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::io::Write;
use std::sync::Arc;

/// Grid points per ε below which sampled marginals lose accuracy.
pub const MIN_STEPS_PER_EPS: usize = 20;

/// Noise cells shared by every path of a sampler.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Layout {
    pub model: HurstModel,
    pub grid: UniformGrid,
    pub history: HistoryCells,
    /// Widths of all noise cells, history first, then grid cells.
    pub widths: Vec<f64>,
    /// Right edges of all noise cells.
    pub right: Vec<f64>,
}

impl Layout {
    pub fn n_history(&self) -> usize {
        self.history.len()
    }

    pub fn n_cells(&self) -> usize {
        self.widths.len()
    }

    /// Number of cells ending at or before grid time index `j`.
    pub fn cells_up_to(&self, j: usize) -> usize {
        self.n_history() + j
    }

    pub fn left(&self, c: usize) -> f64 {
        self.right[c] - self.widths[c]
    }
}

/// Weight of cell [a, b] in Z_s: σ_ou·(1/(b−a))∫_a^b K^ε(s−u) du.
pub(crate) fn cell_weight(model: &HurstModel, s: f64, a: f64, b: f64) -> f64 {
    model.sigma_ou() * model.kernel_mass_calendar((s - b).max(0.0), s - a) / (b - a)
}

/// Moving-average sampler on a fixed grid and pre-history.
#[derive(Debug, Clone)]
pub struct FouSampler {
    layout: Arc<Layout>,
    /// Row-major (grid point × history cell) weights.
    history_weights: Vec<f64>,
    grid_conv: CausalConvolver,
}

impl FouSampler {
    pub fn new(model: HurstModel, grid: UniformGrid, history: HistorySpec) -> Result<Self, SamplerError> {
        let cells = HistoryCells::build(grid.t0, &history);
        Self::with_history_cells(model, grid, cells)
    }

    /// Sampler on `grid` whose pre-history is the given cells, which must end at the grid start.
    pub fn with_history_cells(model: HurstModel, grid: UniformGrid, cells: HistoryCells) -> Result<Self, SamplerError> {
        Self::with_history_cells_at(model, grid, cells, MIN_STEPS_PER_EPS)
    }

    /// As [`Self::with_history_cells`], admitting grids with at least
    /// `min_steps_per_eps` points per ε instead of the default.
    pub fn with_history_cells_at(
        model: HurstModel,
        grid: UniformGrid,
        cells: HistoryCells,
        min_steps_per_eps: usize,
    ) -> Result<Self, SamplerError> {
        if min_steps_per_eps == 0 {
            return Err(SamplerError::BadGrid("need at least one grid step per ε".into()));
        }
        grid.check_resolution(&model, min_steps_per_eps)?;
        let end = cells.edges()[cells.edges().len() - 1];
        if (end - grid.t0).abs() > 1e-12 * grid.t0.abs().max(1.0) {
            return Err(SamplerError::BadGrid(format!("history ends at {end}, grid starts at {}", grid.t0)));
        }
        let mut widths = Vec::with_capacity(cells.len() + grid.n - 1);
        let mut right = Vec::with_capacity(widths.capacity());
        for e in cells.edges().windows(2) {
            widths.push(e[1] - e[0]);
            right.push(e[1]);
        }
        for j in 1..grid.n {
            widths.push(grid.dt);
            right.push(grid.time(j));
        }
        let layout = Layout { model, grid, history: cells, widths, right };

        let nh = layout.n_history();
        let mut history_weights = vec![0.0; grid.n * nh];
        history_weights.par_chunks_mut(nh.max(1)).enumerate().take(grid.n).for_each(|(j, row)| {
            let t = grid.time(j);
            for (c, w) in row.iter_mut().enumerate().take(nh) {
                *w = cell_weight(&model, t, layout.left(c), layout.right[c]);
            }
        });
        let grid_weights = (0..grid.n.saturating_sub(1))
            .map(|k| cell_weight(&model, (k + 1) as f64 * grid.dt, 0.0, grid.dt))
            .collect();
        Ok(Self { layout: Arc::new(layout), history_weights, grid_conv: CausalConvolver::new(grid_weights) })
    }

    /// Sampler whose history meets the 1e-4 variance tolerance.
    pub fn with_default_history(model: HurstModel, grid: UniformGrid) -> Result<Self, SamplerError> {
        let spec = HistorySpec::for_variance_tolerance(&model, 1e-4);
        let spec = HistorySpec { fine_width: spec.fine_width.min(grid.dt), ..spec };
        Self::new(model, grid, spec)
    }

    pub fn model(&self) -> &HurstModel {
        &self.layout.model
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.layout.grid
    }

    pub fn history(&self) -> &HistoryCells {
        &self.layout.history
    }

    /// Total number of noise cells (history plus grid).
    pub fn n_cells(&self) -> usize {
        self.layout.n_cells()
    }

    pub fn cell_widths(&self) -> &[f64] {
        &self.layout.widths
    }

    /// Filter taking grid-cell increments to their contribution on the grid.
    pub fn grid_filter(&self) -> &CausalConvolver {
        &self.grid_conv
    }

    pub(crate) fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    /// Path `index` of the stream identified by `seed`.
    pub fn path(&self, seed: u64, index: u64) -> FouPath {
        let mut rng = path_rng(seed, index);
        let dw = self.layout.widths.iter().map(|&w| w.sqrt() * rng.sample::<f64, _>(StandardNormal)).collect();
        self.build(dw, seed, index)
    }

    /// Path driven by the given cell increments (history cells first).
    pub fn path_from_increments(&self, dw: Vec<f64>) -> Result<FouPath, SamplerError> {
        if dw.len() != self.n_cells() {
            return Err(SamplerError::NoiseLength { expected: self.n_cells(), got: dw.len() });
        }
        Ok(self.build(dw, 0, 0))
    }

    fn build(&self, dw: Vec<f64>, seed: u64, index: u64) -> FouPath {
        let n = self.layout.grid.n;
        let nh = self.layout.n_history();
        let mut z: Vec<f64> = if nh == 0 {
            vec![0.0; n]
        } else {
            self.history_weights.chunks(nh).map(|row| row.iter().zip(&dw[..nh]).map(|(w, x)| w * x).sum()).collect()
        };
        if n > 1 {
            let fresh = self.grid_conv.apply(&dw[nh..]);
            for (zj, f) in z[1..].iter_mut().zip(fresh) {
                *zj += f;
            }
        }
        FouPath { layout: Arc::clone(&self.layout), z, dw, seed, index }
    }
}

/// A sampled factor trajectory with its driving cell increments.
#[derive(Debug, Clone, PartialEq)]
pub struct FouPath {
    pub(crate) layout: Arc<Layout>,
    z: Vec<f64>,
    dw: Vec<f64>,
    seed: u64,
    index: u64,
}

impl FouPath {
    pub fn model(&self) -> &HurstModel {
        &self.layout.model
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.layout.grid
    }

    pub fn times(&self) -> Vec<f64> {
        self.layout.grid.times()
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    /// All cell increments, history cells first.
    pub fn increments(&self) -> &[f64] {
        &self.dw
    }

    pub fn history_increments(&self) -> &[f64] {
        &self.dw[..self.layout.n_history()]
    }

    pub fn grid_increments(&self) -> &[f64] {
        &self.dw[self.layout.n_history()..]
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Noise cells ending at grid time `t` with their increments: the
    /// information a continuation of this path from `t` conditions on.
    pub fn cells_until(&self, t: f64) -> Result<(HistoryCells, Vec<f64>), SamplerError> {
        let l = &self.layout;
        let j = l.grid.index_of(t).ok_or(SamplerError::NotGridTime { t })?;
        let n = l.cells_up_to(j);
        let mut edges = l.history.edges().to_vec();
        edges.extend((1..=j).map(|k| l.grid.time(k)));
        Ok((HistoryCells::from_edges(edges)?, self.dw[..n].to_vec()))
    }

    pub fn history_span(&self) -> f64 {
        self.layout.history.span()
    }

    /// Re-evaluates every factor value as a direct weighted sum of the
    /// stored increments, recomputing each kernel weight.
    pub fn reconstruct(&self) -> Vec<f64> {
        let l = &self.layout;
        (0..l.grid.n)
            .map(|j| {
                let t = l.grid.time(j);
                (0..l.cells_up_to(j)).map(|c| cell_weight(&l.model, t, l.left(c), l.right[c]) * self.dw[c]).sum()
            })
            .collect()
    }

    /// Writes `time,z` rows preceded by a commented header.
    pub fn write_csv<W: Write>(&self, mut out: W, header: &[String]) -> std::io::Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "time,z")?;
        for (t, z) in self.times().iter().zip(&self.z) {
            writeln!(out, "{t:.16e},{z:.16e}")?;
        }
        Ok(())
    }
}

/// `n_paths` independent stationary paths; path i uses stream i of `seed`.
pub fn sample_paths(
    model: HurstModel,
    grid: UniformGrid,
    n_paths: usize,
    seed: u64,
) -> Result<Vec<FouPath>, SamplerError> {
    if n_paths == 0 {
        return Err(SamplerError::BadGrid("n_paths must be at least 1".into()));
    }
    let sampler = FouSampler::with_default_history(model, grid)?;
    Ok((0..n_paths as u64).into_par_iter().map(|i| sampler.path(seed, i)).collect())
}
