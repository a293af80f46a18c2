//! Monte Carlo cells: one kernel, one test function, one grid, one noise
//! level, many seeded replicates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{self, BaselineMethod, ConvMatrix, SvdFilter};
use crate::coeffs::reconstruct;
use crate::deconvolve::{default_a_grid, DeconvPlan, FitOptions, PenaltyConfig};
use crate::error::{Error, Result};
use crate::laguerre::SampleGrid;
use crate::simbench::functions::{KernelForm, KernelId, KernelSpec, TestFunction};
use crate::simbench::{ise, ise_interior, mean_sd, quantile_sorted, true_q};

/// Horizon of the closed-form benchmark.
pub const SETTING1_HORIZON: f64 = 10.0;
/// Amplitude of `f` in the sampled-kernel benchmark.
pub const SETTING2_BETA: f64 = 0.5;
/// Central fraction of the grid used by the interior ISE.
pub const INTERIOR_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum NoiseDistribution {
    #[default]
    Gaussian,
    /// `±1` with equal probability.
    Rademacher,
}

/// i.i.d. unit-variance draws scaled by `sigma`. Replicate `r` reads stream
/// `r` of the ChaCha generator seeded with `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseModel {
    pub sigma: f64,
    pub distribution: NoiseDistribution,
    pub seed: u64,
}

impl NoiseModel {
    pub fn gaussian(sigma: f64, seed: u64) -> Self {
        Self { sigma, distribution: NoiseDistribution::Gaussian, seed }
    }

    pub fn draw(&self, replicate: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(replicate);
        (0..n)
            .map(|_| {
                let e: f64 = match self.distribution {
                    NoiseDistribution::Gaussian => rng.sample(StandardNormal),
                    NoiseDistribution::Rademacher => {
                        if rng.random::<bool>() {
                            1.0
                        } else {
                            -1.0
                        }
                    }
                };
                self.sigma * e
            })
            .collect()
    }

    /// Sub-Gaussian constant of the draws, used in the penalty.
    pub fn kappa(&self) -> f64 {
        1.0
    }
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub label: String,
    pub kernel: KernelSpec,
    pub f: TestFunction,
    pub beta: f64,
    pub grid: SampleGrid,
    pub sigma: f64,
}

impl Cell {
    /// Closed-form kernel on `n` equispaced points of `[0, 10]` with noise
    /// `σ_0(g)/2^step`.
    pub fn setting1(kernel: &KernelId, f: TestFunction, n: usize, step: u32) -> Result<Cell> {
        let spec = KernelSpec::builtin(kernel)?;
        let sigma0 = spec
            .nominal_sigma()
            .ok_or_else(|| Error::InvalidArgument(format!("kernel '{kernel}' has no nominal noise level")))?;
        Ok(Cell {
            label: format!("{kernel}/{f}/n={n}/i={step}"),
            kernel: spec,
            f,
            beta: 1.0,
            grid: SampleGrid::equispaced(n, SETTING1_HORIZON)?,
            sigma: sigma0 / 2f64.powi(step as i32),
        })
    }

    /// Sampled kernel on its own grid, `f = 0.5 · f_id`.
    pub fn setting2(kernel: KernelSpec, f: TestFunction, sigma: f64) -> Result<Cell> {
        let grid = match &kernel.form {
            KernelForm::Sampled { grid, .. } => grid.clone(),
            KernelForm::Closed(_) => {
                return Err(Error::InvalidArgument("the sampled-kernel benchmark needs kernel samples".into()))
            }
        };
        let expected = match kernel.id {
            KernelId::Mri => Some(91),
            KernelId::Ct => Some(28),
            _ => None,
        };
        if let Some(n) = expected {
            if grid.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: grid.len() });
            }
        }
        Ok(Cell { label: format!("{}/{f}/sigma={sigma}", kernel.id), kernel, f, beta: SETTING2_BETA, grid, sigma })
    }

    pub fn f_true(&self, t: f64) -> f64 {
        self.beta * self.f.eval(t)
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub a_grid: Vec<f64>,
    pub fit: FitOptions,
    pub distribution: NoiseDistribution,
    pub baselines: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            a_grid: default_a_grid(),
            fit: FitOptions::default(),
            distribution: NoiseDistribution::Gaussian,
            baselines: false,
        }
    }
}

#[derive(Debug, Clone)]
struct BaselineState {
    conv: ConvMatrix,
    svd: SvdFilter,
    bandwidths: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineRecord {
    pub ise: f64,
    pub beta_hat: f64,
    pub hyperparameter: f64,
}

/// Outcome of one replicate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub replicate: u64,
    pub ise_lag: f64,
    pub ise_lag_interior: f64,
    pub beta_lag: f64,
    pub m_hat: usize,
    pub a_hat: f64,
    pub max_order: usize,
    pub bandwidth: Option<f64>,
    pub tikhonov: Option<BaselineRecord>,
    pub tsvd: Option<BaselineRecord>,
}

impl RunRecord {
    pub fn ratio_tikhonov(&self) -> Option<f64> {
        self.tikhonov.as_ref().map(|b| b.ise / self.ise_lag)
    }

    pub fn ratio_tsvd(&self) -> Option<f64> {
        self.tsvd.as_ref().map(|b| b.ise / self.ise_lag)
    }
}

/// Cell with all observation-independent work done once.
#[derive(Debug, Clone)]
pub struct PreparedCell {
    pub cell: Cell,
    pub g_samples: Vec<f64>,
    pub q: Vec<f64>,
    pub f_values: Vec<f64>,
    pub plan: DeconvPlan,
    pub penalty: PenaltyConfig,
    pub distribution: NoiseDistribution,
    baseline: Option<BaselineState>,
}

impl PreparedCell {
    pub fn new(cell: Cell, opts: &RunOptions) -> Result<Self> {
        let g_samples = cell.kernel.samples_on(&cell.grid)?;
        let beta = cell.beta;
        let f = cell.f;
        let q = true_q(&cell.kernel, &move |t| beta * f.eval(t), &cell.grid)?;
        let f_values: Vec<f64> = cell.grid.times().iter().map(|&t| cell.f_true(t)).collect();
        let plan = DeconvPlan::new(&cell.grid, &g_samples, &opts.a_grid, &opts.fit)?;
        let penalty = PenaltyConfig::gaussian(cell.sigma, &cell.grid)?;
        let baseline = if opts.baselines {
            let conv = baselines::conv_matrix(&cell.grid, &g_samples)?;
            let svd = SvdFilter::new(&conv);
            let bandwidths = baselines::default_bandwidth_grid(&cell.grid);
            Some(BaselineState { conv, svd, bandwidths })
        } else {
            None
        };
        Ok(Self { cell, g_samples, q, f_values, plan, penalty, distribution: opts.distribution, baseline })
    }

    pub fn noise(&self, seed: u64) -> NoiseModel {
        NoiseModel { sigma: self.cell.sigma, distribution: self.distribution, seed }
    }

    pub fn observations(&self, seed: u64, replicate: u64) -> Vec<f64> {
        let eps = self.noise(seed).draw(replicate, self.q.len());
        self.q.iter().zip(eps).map(|(q, e)| q + e).collect()
    }

    pub fn replicate(&self, seed: u64, replicate: u64) -> Result<RunRecord> {
        let y = self.observations(seed, replicate);
        let grid = &self.cell.grid;
        let fit = self.plan.fit(&y, &self.penalty)?;
        let f_hat = reconstruct(&fit.f_hat, grid.times());
        let beta_lag = reconstruct(&fit.f_hat, &[0.0])[0];
        let mut rec = RunRecord {
            replicate,
            ise_lag: ise(grid, &f_hat, &self.f_values)?,
            ise_lag_interior: ise_interior(grid, &f_hat, &self.f_values, INTERIOR_FRACTION)?,
            beta_lag,
            m_hat: fit.m_hat,
            a_hat: fit.a_hat,
            max_order: fit.max_order,
            bandwidth: None,
            tikhonov: None,
            tsvd: None,
        };
        if let Some(b) = &self.baseline {
            let smooth = baselines::presmooth_cv(grid, &y, &b.bandwidths)?;
            rec.bandwidth = Some(smooth.bandwidth);
            let run = |method| -> Result<BaselineRecord> {
                let tuned = baselines::tune_baseline(&b.conv, &b.svd, &y, &smooth.values, method)?;
                Ok(BaselineRecord {
                    ise: ise(grid, &tuned.solution, &self.f_values)?,
                    beta_hat: tuned.solution[0],
                    hyperparameter: tuned.hyperparameter,
                })
            };
            rec.tikhonov = Some(run(BaselineMethod::Tikhonov)?);
            rec.tsvd = Some(run(BaselineMethod::Tsvd)?);
        }
        Ok(rec)
    }

    /// Runs replicates `0..reps` in parallel; records come back in order.
    pub fn run(&self, reps: usize, seed: u64) -> Result<CellSummary> {
        if reps == 0 {
            return Err(Error::InvalidArgument("need at least one replicate".into()));
        }
        let records: Vec<RunRecord> =
            (0..reps as u64).into_par_iter().map(|r| self.replicate(seed, r)).collect::<Result<_>>()?;
        Ok(CellSummary::from_records(&self.cell, seed, records))
    }
}

/// `{min, q25, median, q75, max}` of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantiles {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

impl Quantiles {
    pub fn of(xs: &[f64]) -> Self {
        let mut v = xs.to_vec();
        v.sort_by(f64::total_cmp);
        Self {
            min: quantile_sorted(&v, 0.0),
            q25: quantile_sorted(&v, 0.25),
            median: quantile_sorted(&v, 0.5),
            q75: quantile_sorted(&v, 0.75),
            max: quantile_sorted(&v, 1.0),
        }
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.min, self.q25, self.median, self.q75, self.max]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub label: String,
    pub kernel: String,
    pub f: String,
    pub n: usize,
    pub sigma: f64,
    pub beta: f64,
    pub reps: usize,
    pub seed: u64,
    /// Mean and sd of ISE(LAG), multiplied by 10⁴.
    pub mean_ise_e4: f64,
    pub sd_ise_e4: f64,
    pub mean_ise_interior_e4: f64,
    pub beta_lag: Quantiles,
    pub ratio_tikhonov: Option<Quantiles>,
    pub ratio_tsvd: Option<Quantiles>,
    pub beta_tikhonov: Option<Quantiles>,
    pub beta_tsvd: Option<Quantiles>,
    pub records: Vec<RunRecord>,
}

impl CellSummary {
    pub fn from_records(cell: &Cell, seed: u64, records: Vec<RunRecord>) -> Self {
        let ise: Vec<f64> = records.iter().map(|r| r.ise_lag).collect();
        let ise_int: Vec<f64> = records.iter().map(|r| r.ise_lag_interior).collect();
        let (mean, sd) = mean_sd(&ise);
        let (mean_int, _) = mean_sd(&ise_int);
        let collect = |f: &dyn Fn(&RunRecord) -> Option<f64>| -> Option<Quantiles> {
            let v: Option<Vec<f64>> = records.iter().map(f).collect();
            v.filter(|v| !v.is_empty()).map(|v| Quantiles::of(&v))
        };
        Self {
            label: cell.label.clone(),
            kernel: cell.kernel.id.to_string(),
            f: cell.f.to_string(),
            n: cell.grid.len(),
            sigma: cell.sigma,
            beta: cell.beta,
            reps: records.len(),
            seed,
            mean_ise_e4: mean * 1e4,
            sd_ise_e4: sd * 1e4,
            mean_ise_interior_e4: mean_int * 1e4,
            beta_lag: Quantiles::of(&records.iter().map(|r| r.beta_lag).collect::<Vec<_>>()),
            ratio_tikhonov: collect(&|r| r.ratio_tikhonov()),
            ratio_tsvd: collect(&|r| r.ratio_tsvd()),
            beta_tikhonov: collect(&|r| r.tikhonov.as_ref().map(|b| b.beta_hat)),
            beta_tsvd: collect(&|r| r.tsvd.as_ref().map(|b| b.beta_hat)),
            records,
        }
    }
}

pub fn run_cell(cell: Cell, reps: usize, seed: u64, opts: &RunOptions) -> Result<CellSummary> {
    PreparedCell::new(cell, opts)?.run(reps, seed)
}

/// Closed-form benchmark cell, LAG only unless `opts.baselines` is set.
pub fn run_setting1(
    kernel: &KernelId,
    f: TestFunction,
    n: usize,
    step: u32,
    reps: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<CellSummary> {
    run_cell(Cell::setting1(kernel, f, n, step)?, reps, seed, opts)
}

/// Sampled-kernel benchmark cell; always runs both baselines.
pub fn run_setting2(
    kernel: KernelSpec,
    f: TestFunction,
    sigma: f64,
    reps: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<CellSummary> {
    let opts = RunOptions { baselines: true, ..opts.clone() };
    run_cell(Cell::setting2(kernel, f, sigma)?, reps, seed, &opts)
}
