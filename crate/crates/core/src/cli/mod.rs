//! Command-line front end: `estimate`, `simulate`, `compare`, `diagnose`.

mod svg;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::coeffs::{implied_eta, reconstruct, DEFAULT_COND_THRESHOLD, DEFAULT_MAX_ORDER_CAP};
use crate::deconvolve::{
    estimate_sigma, log_spaced, omega_eigen_bounds, DeconvPlan, FitOptions, PenaltyConfig, ScalePlan,
};
use crate::error::{Error, Result};
use crate::laguerre::SampleGrid;
use crate::simbench::io::{self, fmt_f64, write_csv};
use crate::simbench::runner::{Cell, CellSummary, PreparedCell, Quantiles, RunOptions, RunRecord, SETTING1_HORIZON};
use crate::simbench::{synthetic, KernelForm, KernelId, KernelSpec, TestFunction};
use crate::toeplitz::{growth_exponent, inverse_frobenius_table, symbol_diagnostics};

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "LAGDECONV_THREADS";

#[derive(Debug, Parser)]
#[command(name = "lagdeconv", version, about = "Laguerre-basis Laplace deconvolution")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Deconvolve one observed curve given kernel samples on the same grid.
    Estimate(EstimateArgs),
    /// Monte Carlo ISE of the Laguerre estimator for one benchmark cell.
    Simulate(CellArgs),
    /// ISE ratios of Tikhonov and truncated SVD against the Laguerre estimator.
    Compare(CellArgs),
    /// Kernel-operator and design diagnostics at one scale.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Args)]
pub struct ScaleArgs {
    /// Explicit comma-separated scale grid; overrides --a-min/--a-max/--a-count.
    #[arg(long, value_delimiter = ',')]
    pub a_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.1)]
    pub a_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub a_max: f64,
    /// Number of log-spaced scales.
    #[arg(long, default_value_t = 16)]
    pub a_count: usize,
    /// Cap on the expansion size M.
    #[arg(long, default_value_t = DEFAULT_MAX_ORDER_CAP)]
    pub max_order: usize,
    /// Largest accepted condition number of the design and kernel grams.
    #[arg(long, default_value_t = DEFAULT_COND_THRESHOLD)]
    pub cond_threshold: f64,
}

impl ScaleArgs {
    pub fn grid(&self) -> Result<Vec<f64>> {
        let grid = match &self.a_grid {
            Some(v) => v.clone(),
            None => {
                if !(self.a_min > 0.0 && self.a_max >= self.a_min) || self.a_count == 0 {
                    return Err(Error::InvalidArgument(format!(
                        "bad scale range [{}, {}] x {}",
                        self.a_min, self.a_max, self.a_count
                    )));
                }
                log_spaced(self.a_min, self.a_max, self.a_count)
            }
        };
        if grid.is_empty() || grid.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(Error::InvalidArgument("scales must be positive and finite".into()));
        }
        Ok(grid)
    }

    pub fn fit_options(&self) -> FitOptions {
        FitOptions { max_order_cap: self.max_order, cond_threshold: self.cond_threshold }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
    /// Output formats to write.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Format::Csv, Format::Json])]
    pub format: Vec<Format>,
}

impl OutputArgs {
    fn formats(&self) -> BTreeSet<Format> {
        self.format.iter().copied().collect()
    }
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    /// CSV of (t, y).
    #[arg(long)]
    pub input: PathBuf,
    /// CSV of (t, g) on the same grid.
    #[arg(long)]
    pub kernel: PathBuf,
    /// Known noise level.
    #[arg(long, conflicts_with = "estimate_sigma", required_unless_present = "estimate_sigma")]
    pub sigma: Option<f64>,
    /// Estimate the noise level from the samples before --arrival-index.
    #[arg(long, requires = "arrival_index")]
    pub estimate_sigma: bool,
    #[arg(long)]
    pub arrival_index: Option<usize>,
    /// Sub-Gaussian constant of the noise.
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    #[command(flatten)]
    pub scales: ScaleArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CellArgs {
    /// g1..g5, gCT or gMRI.
    #[arg(long, default_value = "g2")]
    pub kernel: String,
    /// Kernel samples for gCT/gMRI; defaults to the bundled synthetic curves.
    #[arg(long)]
    pub kernel_file: Option<PathBuf>,
    /// f1..f4.
    #[arg(long, default_value = "f1")]
    pub f: String,
    /// Grid size for closed-form kernels.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Noise step i: σ = σ_0(g)/2^i for closed-form kernels.
    #[arg(long, default_value_t = 5)]
    pub step: u32,
    /// Noise level override.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, default_value_t = 400)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub scales: ScaleArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DiagnoseArgs {
    /// g1..g5 for a closed-form kernel.
    #[arg(long, default_value = "g2", conflicts_with = "kernel_file")]
    pub kernel: String,
    /// CSV of (t, g); its time column defines the grid.
    #[arg(long)]
    pub kernel_file: Option<PathBuf>,
    /// Equispaced grid size for closed-form kernels.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = SETTING1_HORIZON)]
    pub horizon: f64,
    #[arg(long, default_value_t = 5.0)]
    pub a: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ORDER_CAP)]
    pub max_order: usize,
    #[arg(long, default_value_t = DEFAULT_COND_THRESHOLD)]
    pub cond_threshold: f64,
    /// Smallest order in the growth-exponent fit.
    #[arg(long, default_value_t = 10)]
    pub growth_from: usize,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
}

/// Sizes the global worker pool from `LAGDECONV_THREADS` when set.
pub fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize =
            v.trim().parse().map_err(|_| Error::InvalidArgument(format!("{THREADS_ENV}={v} is not a thread count")))?;
        if n > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        }
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Estimate(a) => cmd_estimate(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::Diagnose(a) => cmd_diagnose(&a),
    }
}

/// Writes through a temporary sibling so a failed run leaves no partial file.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("partial");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn write_csv_atomic(path: &Path, kind: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let tmp = path.with_extension("partial");
    write_csv(&tmp, kind, header, rows)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, &s)
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn cmd_estimate(args: &EstimateArgs) -> Result<()> {
    let data = io::read_series(&args.input)?;
    let kernel = io::read_series(&args.kernel)?;
    let grid = data.grid()?;
    let kernel_grid = kernel.grid()?;
    crate::simbench::functions::check_same_grid(&grid, &kernel_grid)?;

    let (sigma, sigma_source) = match (args.sigma, args.estimate_sigma) {
        (Some(s), _) => (s, "given"),
        (None, true) => {
            let k = args.arrival_index.ok_or_else(|| Error::InvalidArgument("--arrival-index is required".into()))?;
            (estimate_sigma(&data.values, k)?, "estimated")
        }
        (None, false) => return Err(Error::InvalidArgument("pass --sigma or --estimate-sigma".into())),
    };
    let cfg = PenaltyConfig::new(sigma, args.kappa, grid.horizon(), grid.len())?;
    let a_grid = args.scales.grid()?;
    let plan = DeconvPlan::new(&grid, &kernel.values, &a_grid, &args.scales.fit_options())?;
    let fit = plan.fit(&data.values, &cfg)?;
    let f_values = reconstruct(&fit.f_hat, grid.times());
    let beta_hat = reconstruct(&fit.f_hat, &[0.0])[0];

    fs::create_dir_all(&args.output.out_dir)?;
    let formats = args.output.formats();
    if formats.contains(&Format::Json) {
        let report = json!({
            "schema": "lagdeconv.estimate.v1",
            "n": grid.len(),
            "horizon": grid.horizon(),
            "a_hat": fit.a_hat,
            "m_hat": fit.m_hat,
            "max_order": fit.max_order,
            "implied_eta": implied_eta(grid.len(), fit.max_order),
            "sigma": sigma,
            "sigma_source": sigma_source,
            "kappa": args.kappa,
            "beta_hat": beta_hat,
            "residual_norm": fit.residual_norm,
            "coefficients": fit.f_hat.values(),
            "scale": fit.f_hat.scale(),
            "scores": fit.scores.entries,
            "scale_trace": fit.scale_trace,
        });
        write_json(&args.output.out_dir.join("report.json"), &report)?;
    }
    if formats.contains(&Format::Csv) {
        let rows: Vec<Vec<String>> = grid
            .times()
            .iter()
            .zip(&f_values)
            .zip(&fit.q_hat)
            .map(|((t, f), q)| vec![fmt_f64(*t), fmt_f64(*f), fmt_f64(*q)])
            .collect();
        write_csv_atomic(&args.output.out_dir.join("estimate.csv"), "estimate", &["t", "f_hat", "q_hat"], &rows)?;
    }
    if formats.contains(&Format::Svg) {
        let t = grid.times();
        let plot = svg::line_plot(
            &format!("a = {:.3}, m = {}", fit.a_hat, fit.m_hat),
            &[
                svg::Line { label: "y", color: "gray", xs: t, ys: &data.values },
                svg::Line { label: "q_hat", color: "steelblue", xs: t, ys: &fit.q_hat },
                svg::Line { label: "f_hat", color: "firebrick", xs: t, ys: &f_values },
            ],
        );
        write_atomic(&args.output.out_dir.join("estimate.svg"), &plot)?;
    }
    Ok(())
}

/// Resolves the cell described by the flags.
pub fn build_cell(args: &CellArgs) -> Result<Cell> {
    let id: KernelId = args.kernel.parse()?;
    let f: TestFunction = args.f.parse()?;
    match id {
        KernelId::Ct | KernelId::Mri => {
            let spec = match &args.kernel_file {
                Some(p) => io::read_kernel(p, id.clone())?,
                None if id == KernelId::Ct => synthetic::ct_kernel()?,
                None => synthetic::mri_kernel()?,
            };
            let default_sigma = if id == KernelId::Ct { synthetic::CT_SIGMA } else { synthetic::MRI_SIGMA };
            Cell::setting2(spec, f, args.sigma.unwrap_or(default_sigma))
        }
        _ => {
            let mut cell = Cell::setting1(&id, f, args.n, args.step)?;
            if let Some(s) = args.sigma {
                if !(s >= 0.0) {
                    return Err(Error::InvalidArgument(format!("sigma must be nonnegative, got {s}")));
                }
                cell.sigma = s;
                cell.label = format!("{id}/{f}/n={}/sigma={s}", args.n);
            }
            Ok(cell)
        }
    }
}

fn run_cell_args(args: &CellArgs, baselines: bool) -> Result<CellSummary> {
    if args.reps == 0 {
        return Err(Error::InvalidArgument("--reps must be at least 1".into()));
    }
    if args.reps == 1 {
        eprintln!("warning: a single replicate gives no spread; sd is reported as 0");
    }
    let cell = build_cell(args)?;
    let opts =
        RunOptions { a_grid: args.scales.grid()?, fit: args.scales.fit_options(), baselines, ..Default::default() };
    PreparedCell::new(cell, &opts)?.run(args.reps, args.seed)
}

fn summary_json(s: &CellSummary, kind: &str) -> serde_json::Value {
    let mut v = serde_json::to_value(SummaryView::from(s)).expect("summary serializes");
    v["schema"] = json!(format!("lagdeconv.{kind}.v1"));
    v
}

#[derive(Serialize)]
struct SummaryView<'a> {
    label: &'a str,
    kernel: &'a str,
    f: &'a str,
    n: usize,
    sigma: f64,
    beta: f64,
    reps: usize,
    seed: u64,
    mean_ise_e4: f64,
    sd_ise_e4: f64,
    mean_ise_interior_e4: f64,
    beta_lag: Quantiles,
    ratio_tikhonov: Option<Quantiles>,
    ratio_tsvd: Option<Quantiles>,
    beta_tikhonov: Option<Quantiles>,
    beta_tsvd: Option<Quantiles>,
}

impl<'a> From<&'a CellSummary> for SummaryView<'a> {
    fn from(s: &'a CellSummary) -> Self {
        Self {
            label: &s.label,
            kernel: &s.kernel,
            f: &s.f,
            n: s.n,
            sigma: s.sigma,
            beta: s.beta,
            reps: s.reps,
            seed: s.seed,
            mean_ise_e4: s.mean_ise_e4,
            sd_ise_e4: s.sd_ise_e4,
            mean_ise_interior_e4: s.mean_ise_interior_e4,
            beta_lag: s.beta_lag,
            ratio_tikhonov: s.ratio_tikhonov,
            ratio_tsvd: s.ratio_tsvd,
            beta_tikhonov: s.beta_tikhonov,
            beta_tsvd: s.beta_tsvd,
        }
    }
}

pub fn cmd_simulate(args: &CellArgs) -> Result<()> {
    let s = run_cell_args(args, false)?;
    fs::create_dir_all(&args.output.out_dir)?;
    let formats = args.output.formats();
    if formats.contains(&Format::Csv) {
        let row = vec![
            s.kernel.clone(),
            s.f.clone(),
            s.n.to_string(),
            fmt_f64(s.sigma),
            s.reps.to_string(),
            s.seed.to_string(),
            fmt_f64(s.mean_ise_e4),
            fmt_f64(s.sd_ise_e4),
            fmt_f64(s.mean_ise_interior_e4),
        ];
        write_csv_atomic(
            &args.output.out_dir.join("summary.csv"),
            "simulate-summary",
            &["kernel", "f", "n", "sigma", "reps", "seed", "mean_ise_e4", "sd_ise_e4", "mean_ise_interior_e4"],
            &[row],
        )?;
        let rows: Vec<Vec<String>> = s
            .records
            .iter()
            .map(|r| {
                vec![
                    r.replicate.to_string(),
                    fmt_f64(r.ise_lag),
                    fmt_f64(r.ise_lag_interior),
                    r.m_hat.to_string(),
                    fmt_f64(r.a_hat),
                    r.max_order.to_string(),
                    fmt_f64(r.beta_lag),
                ]
            })
            .collect();
        write_csv_atomic(
            &args.output.out_dir.join("runs.csv"),
            "simulate-runs",
            &["replicate", "ise", "ise_interior", "m_hat", "a_hat", "max_order", "beta_hat"],
            &rows,
        )?;
    }
    if formats.contains(&Format::Json) {
        write_json(&args.output.out_dir.join("summary.json"), &summary_json(&s, "simulate"))?;
    }
    if formats.contains(&Format::Svg) {
        let xs: Vec<f64> = s.records.iter().map(|r| r.replicate as f64).collect();
        let ys: Vec<f64> = s.records.iter().map(|r| r.ise_lag.max(f64::MIN_POSITIVE).log10()).collect();
        let plot = svg::line_plot(
            &format!("log10 ISE, {}", s.label),
            &[svg::Line { label: "LAG", color: "firebrick", xs: &xs, ys: &ys }],
        );
        write_atomic(&args.output.out_dir.join("runs.svg"), &plot)?;
    }
    Ok(())
}

fn log10(v: Option<f64>) -> Option<f64> {
    v.map(f64::log10)
}

pub fn cmd_compare(args: &CellArgs) -> Result<()> {
    let s = run_cell_args(args, true)?;
    fs::create_dir_all(&args.output.out_dir)?;
    let formats = args.output.formats();
    let quantile_rows: Vec<(&str, Quantiles)> = [("tikhonov", s.ratio_tikhonov), ("tsvd", s.ratio_tsvd)]
        .into_iter()
        .filter_map(|(name, q)| q.map(|q| (name, q)))
        .collect();
    if formats.contains(&Format::Csv) {
        let rows: Vec<Vec<String>> = s.records.iter().map(ratio_row).collect();
        write_csv_atomic(
            &args.output.out_dir.join("ratios.csv"),
            "compare-runs",
            &[
                "replicate",
                "ise_lag",
                "ise_tikhonov",
                "ise_tsvd",
                "ratio_tikhonov",
                "ratio_tsvd",
                "log10_ratio_tikhonov",
                "log10_ratio_tsvd",
                "beta_lag",
                "beta_tikhonov",
                "beta_tsvd",
                "lambda",
                "drop_k",
                "bandwidth",
            ],
            &rows,
        )?;
        let qrows: Vec<Vec<String>> = quantile_rows
            .iter()
            .map(|(name, q)| {
                let mut row = vec![name.to_string()];
                row.extend(q.as_array().iter().map(|v| fmt_f64(*v)));
                row.extend(q.as_array().iter().map(|v| fmt_f64(v.log10())));
                row
            })
            .collect();
        write_csv_atomic(
            &args.output.out_dir.join("ratio_quantiles.csv"),
            "compare-quantiles",
            &[
                "method",
                "min",
                "q25",
                "median",
                "q75",
                "max",
                "log10_min",
                "log10_q25",
                "log10_median",
                "log10_q75",
                "log10_max",
            ],
            &qrows,
        )?;
    }
    if formats.contains(&Format::Json) {
        write_json(&args.output.out_dir.join("summary.json"), &summary_json(&s, "compare"))?;
    }
    if formats.contains(&Format::Svg) {
        let groups: Vec<(&str, [f64; 5])> =
            quantile_rows.iter().map(|(name, q)| (*name, q.as_array().map(|v| v.log10()))).collect();
        let plot = svg::box_plot(&format!("log10 ISE ratio vs LAG, {}", s.label), &groups, 0.0);
        write_atomic(&args.output.out_dir.join("ratios.svg"), &plot)?;
    }
    Ok(())
}

fn ratio_row(r: &RunRecord) -> Vec<String> {
    let tik = r.tikhonov.as_ref();
    let tsvd = r.tsvd.as_ref();
    vec![
        r.replicate.to_string(),
        fmt_f64(r.ise_lag),
        opt(tik.map(|b| b.ise)),
        opt(tsvd.map(|b| b.ise)),
        opt(r.ratio_tikhonov()),
        opt(r.ratio_tsvd()),
        opt(log10(r.ratio_tikhonov())),
        opt(log10(r.ratio_tsvd())),
        fmt_f64(r.beta_lag),
        opt(tik.map(|b| b.beta_hat)),
        opt(tsvd.map(|b| b.beta_hat)),
        opt(tik.map(|b| b.hyperparameter)),
        opt(tsvd.map(|b| b.hyperparameter)),
        opt(r.bandwidth),
    ]
}

#[derive(Serialize)]
struct OrderRow {
    m: usize,
    v_sq: f64,
    rho_sq: f64,
    /// `‖Ĝ_m^{-1}‖_F²`, the value of `v_m²` for an identity `Ω_m`.
    v_sq_unit_omega: f64,
    omega_lambda_min: f64,
    omega_lambda_max: f64,
    omega_flagged: bool,
}

#[derive(Serialize)]
struct SymbolRow {
    theta: f64,
    symbol: Complex64,
    laplace: Complex64,
    abs_diff: f64,
}

pub fn cmd_diagnose(args: &DiagnoseArgs) -> Result<()> {
    let (spec, grid) = match &args.kernel_file {
        Some(p) => {
            let s = io::read_series(p)?;
            let grid = s.grid()?;
            (KernelSpec::sampled(KernelId::Custom(p.display().to_string()), grid.clone(), s.values)?, grid)
        }
        None => {
            let id: KernelId = args.kernel.parse()?;
            (KernelSpec::builtin(&id)?, SampleGrid::equispaced(args.n, args.horizon)?)
        }
    };
    let g_samples = spec.samples_on(&grid)?;
    let opts = FitOptions { max_order_cap: args.max_order, cond_threshold: args.cond_threshold };
    let plan = ScalePlan::select(&grid, &g_samples, args.a, &opts)?;
    let m_max = plan.max_order();
    let omega = omega_eigen_bounds(plan.context())?;
    let unit = inverse_frobenius_table(plan.kernel_operator())?;
    let rows: Vec<OrderRow> = plan
        .v_sq()
        .iter()
        .zip(plan.rho_sq())
        .zip(&omega)
        .zip(&unit)
        .map(|(((&(m, v), (_, r)), o), &(_, u))| OrderRow {
            m,
            v_sq: v,
            rho_sq: r,
            v_sq_unit_omega: u,
            omega_lambda_min: o.lambda_min,
            omega_lambda_max: o.lambda_max,
            omega_flagged: o.flagged,
        })
        .collect();
    let window = |tab: &[(usize, f64)]| -> Option<f64> {
        let sel: Vec<(usize, f64)> = tab.iter().copied().filter(|p| p.0 >= args.growth_from).collect();
        growth_exponent(&sel).ok()
    };
    let growth = window(&unit);
    let growth_raw = window(&plan.v_sq());

    let symbol = match (&spec.form, &spec.laplace) {
        (KernelForm::Closed(_), Some(lt)) => {
            let thetas: Vec<f64> = (1..=32).map(|j| std::f64::consts::PI * j as f64 / 32.0).collect();
            let lt = lt.clone();
            let d = symbol_diagnostics(plan.kernel_coeffs().values(), Some(&move |s| lt(s)), args.a, &thetas)?;
            let mapped = d.mapped_laplace.clone().unwrap_or_default();
            Some(
                d.theta_grid
                    .iter()
                    .zip(&d.symbol_values_normalized)
                    .zip(&mapped)
                    .map(|((&theta, &symbol), &laplace)| SymbolRow {
                        theta,
                        symbol,
                        laplace,
                        abs_diff: (symbol - laplace).norm(),
                    })
                    .collect::<Vec<_>>(),
            )
        }
        _ => None,
    };

    fs::create_dir_all(&args.out_dir)?;
    let report = json!({
        "schema": "lagdeconv.diagnose.v1",
        "kernel": spec.id.to_string(),
        "n": grid.len(),
        "horizon": grid.horizon(),
        "a": args.a,
        "max_order": m_max,
        "implied_eta": implied_eta(grid.len(), m_max),
        "growth_window_start": args.growth_from,
        "growth_exponent": growth,
        "growth_exponent_raw": growth_raw,
        "kernel_r_order": spec.r_order,
        "orders": rows,
        "symbol": symbol,
    });
    write_json(&args.out_dir.join("diagnostics.json"), &report)
}
