//! Replicated runs and parameter sweeps.
//!
//! Every realization gets its own seed from [`derive_seed`], so a sweep is a
//! pure function of the grid, the master seed and the window. Realizations
//! run on a rayon pool; results are collected in index order and reduced
//! with compensated summation, which makes the output independent of the
//! worker count.

use rayon::prelude::*;

use crate::engine::{Beta, EngineParams, EngineState};
use crate::error::{Error, Result};
use crate::game::{GameConfig, PayoffSpec};
use crate::observables::{MeasurementWindow, Observer, RunSummary};

pub const DEFAULT_REALIZATIONS: usize = 32;

#[inline]
fn mix64(mut z: u64) -> u64 {
    // splitmix64 finalizer
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of realization `realization` of grid point `point` under `master`.
pub fn derive_seed(master: u64, point: u64, realization: u64) -> u64 {
    let a = mix64(master.wrapping_add(0x9e37_79b9_7f4a_7c15));
    let b = mix64(a ^ point.wrapping_mul(0xd6e8_feb8_6659_fd93));
    mix64(b ^ realization.wrapping_mul(0xa076_1d64_78bd_642f).wrapping_add(0xe703_7ed1_a0b4_28db))
}

/// `n_S / 2 - 0.66`, the reported location of the volatility minimum.
pub fn critical_alpha_estimate(n_modes: usize) -> f64 {
    n_modes as f64 / 2.0 - 0.66
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub config: GameConfig,
    pub memory: u32,
    pub n_modes: usize,
    pub beta: Beta,
}

impl SweepPoint {
    pub fn new(n_players: u64, memory: u32, n_modes: usize, beta: Beta, payoff: PayoffSpec) -> Result<Self> {
        let config = GameConfig::with_players(n_players, payoff)?;
        let point = SweepPoint { config, memory, n_modes, beta };
        point.params(0)?;
        Ok(point)
    }

    pub fn n_players(&self) -> usize {
        self.config.n_players()
    }

    pub fn alpha(&self) -> f64 {
        (1u64 << self.memory) as f64 / self.n_players() as f64
    }

    pub fn params(&self, seed: u64) -> Result<EngineParams> {
        EngineParams::new(self.config, self.memory, self.n_modes, self.beta, seed)
    }
}

/// How the measurement window is chosen per point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowPolicy {
    /// [`MeasurementWindow::default_for_memory`].
    Scaled,
    Fixed(MeasurementWindow),
}

impl WindowPolicy {
    pub fn window_for(&self, memory: u32) -> MeasurementWindow {
        match *self {
            WindowPolicy::Scaled => MeasurementWindow::default_for_memory(memory),
            WindowPolicy::Fixed(w) => w,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub points: Vec<SweepPoint>,
    pub realizations: usize,
    pub master_seed: u64,
    pub window: WindowPolicy,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::Config("sweep grid has no points".into()));
        }
        if self.realizations == 0 {
            return Err(Error::Config("need at least one realization per point".into()));
        }
        Ok(())
    }

    pub fn seeds(&self, point_index: usize) -> Vec<u64> {
        (0..self.realizations as u64)
            .map(|r| derive_seed(self.master_seed, point_index as u64, r))
            .collect()
    }
}

/// Mean over realizations with its standard error (`None` for a single run).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: Option<f64>,
}

impl Estimate {
    /// Samples are reduced in sorted order, so the result does not depend on
    /// the order they are given in.
    pub fn from_samples(xs: &[f64]) -> Estimate {
        let n = xs.len();
        assert!(n > 0, "no samples");
        let mut xs = xs.to_vec();
        xs.sort_by(f64::total_cmp);
        let mean = neumaier_sum(xs.iter().copied()) / n as f64;
        let stderr = (n > 1).then(|| {
            let ss = neumaier_sum(xs.iter().map(|x| (x - mean) * (x - mean)));
            (ss / (n - 1) as f64 / n as f64).sqrt()
        });
        Estimate { mean, stderr }
    }

    pub fn stderr_or_zero(&self) -> f64 {
        self.stderr.unwrap_or(0.0)
    }
}

/// Compensated (Kahan-Babuska-Neumaier) sum in iteration order.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Aggregated observables of one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointStats {
    pub realizations: usize,
    pub mean_a: Estimate,
    pub sigma2_over_n: Estimate,
    pub h: Estimate,
    pub phi: Estimate,
    pub success: Estimate,
    pub runs: Vec<RunSummary>,
}

impl PointStats {
    pub fn from_runs(runs: Vec<RunSummary>) -> PointStats {
        let col = |f: fn(&RunSummary) -> f64| Estimate::from_samples(&runs.iter().map(f).collect::<Vec<_>>());
        PointStats {
            realizations: runs.len(),
            mean_a: col(|r| r.mean_a),
            sigma2_over_n: col(|r| r.sigma2_over_n),
            h: col(|r| r.h),
            phi: col(|r| r.phi),
            success: col(|r| r.mean_success),
            runs,
        }
    }
}

/// One simulation from a fresh state.
pub fn run_realization(point: &SweepPoint, seed: u64, window: MeasurementWindow) -> Result<RunSummary> {
    let params = point.params(seed)?;
    let mut state = EngineState::init(params)?;
    let mut obs = Observer::new(point.n_players(), point.memory, window);
    state.run_with(window.total(), |rec| obs.push(rec));
    obs.finish()
}

/// Runs `f` on a pool of `workers` threads (all cores when `None`).
pub fn with_workers<T: Send, F: FnOnce() -> T + Send>(workers: Option<usize>, f: F) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// One realization per seed, aggregated in seed order.
pub fn run_point(point: &SweepPoint, seeds: &[u64], window: MeasurementWindow, workers: Option<usize>) -> Result<PointStats> {
    if seeds.is_empty() {
        return Err(Error::Config("need at least one realization".into()));
    }
    let runs = with_workers(workers, || {
        seeds.par_iter().map(|&s| run_realization(point, s, window)).collect::<Vec<_>>()
    })?;
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(PointStats::from_runs(runs))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub alpha: f64,
    pub window: MeasurementWindow,
    pub master_seed: u64,
    pub stats: PointStats,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointFailure {
    pub index: usize,
    pub point: SweepPoint,
    pub error: Error,
}

/// Runs every point of the grid. Failed points are reported in place and do
/// not stop the sweep.
pub fn sweep(grid: &SweepGrid, workers: Option<usize>) -> Result<Vec<std::result::Result<SweepRow, PointFailure>>> {
    grid.validate()?;
    let r = grid.realizations;
    let tasks: Vec<(usize, u64)> = (0..grid.points.len())
        .flat_map(|p| grid.seeds(p).into_iter().map(move |s| (p, s)))
        .collect();
    let results = with_workers(workers, || {
        tasks
            .par_iter()
            .map(|&(p, seed)| {
                let point = &grid.points[p];
                run_realization(point, seed, grid.window.window_for(point.memory))
            })
            .collect::<Vec<_>>()
    })?;

    let mut out = Vec::with_capacity(grid.points.len());
    for (p, chunk) in results.chunks(r).enumerate() {
        let point = grid.points[p];
        let runs: Result<Vec<RunSummary>> = chunk.iter().cloned().collect();
        out.push(match runs {
            Ok(runs) => Ok(SweepRow {
                point,
                alpha: point.alpha(),
                window: grid.window.window_for(point.memory),
                master_seed: grid.master_seed,
                stats: PointStats::from_runs(runs),
            }),
            Err(error) => Err(PointFailure { index: p, point, error }),
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolatilityMinimum {
    pub alpha: f64,
    pub sigma2_over_n: f64,
    pub index: usize,
    /// `n_S / 2 - 0.66` for comparison.
    pub reference_alpha: f64,
}

/// Row with the smallest mean `sigma^2 / N`. The minimum must be interior:
/// a minimum at either end of the alpha range is inconclusive.
pub fn locate_volatility_minimum(rows: &[SweepRow]) -> Result<VolatilityMinimum> {
    if rows.len() < 3 {
        return Err(Error::Measurement(format!("need at least 3 rows to locate a minimum, got {}", rows.len())));
    }
    let n_modes = rows[0].point.n_modes;
    if rows.iter().any(|r| r.point.n_modes != n_modes) {
        return Err(Error::Measurement("rows mix different n_S".into()));
    }
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[a].alpha.total_cmp(&rows[b].alpha));
    let pos = (0..order.len())
        .min_by(|&a, &b| {
            rows[order[a]].stats.sigma2_over_n.mean.total_cmp(&rows[order[b]].stats.sigma2_over_n.mean)
        })
        .expect("nonempty");
    if pos == 0 || pos == order.len() - 1 {
        return Err(Error::Measurement(format!(
            "inconclusive: volatility is smallest at the edge of the alpha range (alpha = {})",
            rows[order[pos]].alpha
        )));
    }
    let best = &rows[order[pos]];
    Ok(VolatilityMinimum {
        alpha: best.alpha,
        sigma2_over_n: best.stats.sigma2_over_n.mean,
        index: order[pos],
        reference_alpha: critical_alpha_estimate(n_modes),
    })
}
