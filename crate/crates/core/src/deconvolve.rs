//! Penalized Laguerre deconvolution.
//!
//! For a scale `a` and truncation `M`, the kernel and signal coefficients are
//! estimated by regression on the grid, `f̂_M = G_M^{-1} q̂_M`, and the model
//! size `m̂` minimizes `-‖f̂_m‖² + pen(m)` where `f̂_m` is the `m`-prefix of
//! `f̂_M`. The scale is then chosen by the residual `‖y - q̂(a)‖`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::coeffs::{select_max_order, CoeffVector, Projector, DEFAULT_COND_THRESHOLD, DEFAULT_MAX_ORDER_CAP};
use crate::error::{Error, Result};
use crate::laguerre::{build_context, LaguerreContext, SampleGrid};
use crate::toeplitz::{from_kernel_coeffs, ToeplitzLT};

/// Noise level and sub-Gaussian constant entering the penalty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PenaltyConfig {
    pub sigma: f64,
    pub kappa: f64,
    pub horizon: f64,
    pub n: usize,
}

impl PenaltyConfig {
    /// `sigma = 0` is accepted for noiseless runs; the penalty then vanishes.
    pub fn new(sigma: f64, kappa: f64, horizon: f64, n: usize) -> Result<Self> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidArgument(format!("sigma must be non-negative, got {sigma}")));
        }
        if !(kappa >= 1.0) {
            return Err(Error::InvalidArgument(format!("kappa must be at least 1, got {kappa}")));
        }
        if !(horizon > 0.0) || n == 0 {
            return Err(Error::InvalidArgument("horizon and n must be positive".into()));
        }
        Ok(Self { sigma, kappa, horizon, n })
    }

    /// Gaussian errors (`κ = 1`) on the given grid.
    pub fn gaussian(sigma: f64, grid: &SampleGrid) -> Result<Self> {
        Self::new(sigma, 1.0, grid.horizon(), grid.len())
    }

    fn scale_factor(&self) -> f64 {
        8.0 * self.sigma * self.sigma * self.horizon / self.n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelScore {
    pub m: usize,
    pub v_sq: f64,
    pub rho_sq: f64,
    pub penalty: f64,
    pub contrast: f64,
    pub objective: f64,
}

/// Per-order scores for `m = 1..M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelScores {
    pub entries: Vec<ModelScore>,
}

impl ModelScores {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, m: usize) -> Option<&ModelScore> {
        m.checked_sub(1).and_then(|i| self.entries.get(i))
    }
}

/// `pen(m) = 8σ²T/n [v_m² + 2κ ρ_m² log(m ρ_m / ρ_1)]`, log clamped at 0.
pub fn penalty(cfg: &PenaltyConfig, m: usize, v_sq: f64, rho_sq: f64, rho1_sq: f64) -> f64 {
    let ratio = m as f64 * (rho_sq / rho1_sq).sqrt();
    let log_term = if ratio > 1.0 { ratio.ln() } else { 0.0 };
    cfg.scale_factor() * (v_sq + 2.0 * cfg.kappa * rho_sq * log_term)
}

/// `A_m = √(n/T) G_m^{-1} J_{m,M} (Φ_M^T Φ_M)^{-1} Φ_M^T` as an `m × n` matrix.
///
/// Each column of the projector is truncated to `m` entries and solved
/// against the `m × m` operator.
pub fn build_a(ctx: &LaguerreContext, g_op: &ToeplitzLT, m: usize) -> Result<DMatrix<f64>> {
    let projector = Projector::new(ctx)?;
    build_a_with(ctx.grid(), &projector, g_op, m)
}

fn build_a_with(grid: &SampleGrid, projector: &Projector, g_op: &ToeplitzLT, m: usize) -> Result<DMatrix<f64>> {
    let pinv = projector.matrix();
    let big_m = pinv.nrows();
    if m == 0 || m > big_m || g_op.size() < m {
        return Err(Error::InvalidArgument(format!("order {m} outside 1..={big_m}")));
    }
    let small = g_op.truncated(m)?;
    let n = grid.len();
    let factor = (n as f64 / grid.horizon()).sqrt();
    let mut a = DMatrix::zeros(m, n);
    let mut col = vec![0.0; m];
    for j in 0..n {
        for (i, c) in col.iter_mut().enumerate() {
            *c = pinv[(i, j)];
        }
        let x = small.solve_lower(&col)?;
        for (i, v) in x.into_iter().enumerate() {
            a[(i, j)] = factor * v;
        }
    }
    Ok(a)
}

/// `Tr(Q_m)` with `Q_m = (n/T) [(Φ^T Φ)^{-1}]_m ([G_M G_M^T]_m)^{-1}`.
pub fn trace_q(ctx: &LaguerreContext, g_op: &ToeplitzLT, m: usize) -> Result<f64> {
    let projector = Projector::new(ctx)?;
    let omega = projector.gram_inverse().view((0, 0), (m, m)).into_owned();
    let g = g_op.to_dense();
    let ggt = (&g * g.transpose()).view((0, 0), (m, m)).into_owned();
    let ggt_inv = ggt.try_inverse().ok_or(Error::Singular(g_op.first_col()[0].abs()))?;
    let n = ctx.grid().len() as f64;
    Ok(n / ctx.grid().horizon() * (omega * ggt_inv).trace())
}

/// Eigenvalue extremes of `Ω_m = (n/T)[(Φ^T Φ)^{-1}]_m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaBounds {
    pub m: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `λ_min < 1e-3` or `λ_max > 1e3`.
    pub flagged: bool,
}

pub fn omega_eigen_bounds(ctx: &LaguerreContext) -> Result<Vec<OmegaBounds>> {
    let inv = Projector::new(ctx)?.gram_inverse();
    let factor = ctx.grid().len() as f64 / ctx.grid().horizon();
    (1..=ctx.max_order())
        .map(|m| {
            let block = inv.view((0, 0), (m, m)).into_owned() * factor;
            let eig = SymmetricEigen::new(block).eigenvalues;
            let lambda_min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
            let lambda_max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            Ok(OmegaBounds { m, lambda_min, lambda_max, flagged: lambda_min < 1e-3 || lambda_max > 1e3 })
        })
        .collect()
}

/// Everything at one scale that does not depend on the observations.
#[derive(Debug, Clone)]
pub struct ScalePlan {
    ctx: LaguerreContext,
    projector: Projector,
    g_hat: CoeffVector,
    g_op: ToeplitzLT,
    /// `A_M`; `A_m` is its first `m` rows.
    a_full: DMatrix<f64>,
    v_sq: Vec<f64>,
    rho_sq: Vec<f64>,
}

impl ScalePlan {
    /// Plan at a fixed truncation order.
    pub fn with_order(grid: &SampleGrid, g_samples: &[f64], scale: f64, max_order: usize) -> Result<Self> {
        let ctx = build_context(grid, scale, max_order)?;
        let projector = Projector::new(&ctx)?;
        let g_hat = projector.apply(g_samples)?;
        let g_op = from_kernel_coeffs(&g_hat, scale)?;
        let a_full = build_a_with(grid, &projector, &g_op, max_order)?;
        let gram = &a_full * a_full.transpose();
        let mut v_sq = Vec::with_capacity(max_order);
        let mut rho_sq = Vec::with_capacity(max_order);
        for m in 1..=max_order {
            let block = gram.view((0, 0), (m, m)).into_owned();
            v_sq.push(block.trace());
            let eig = SymmetricEigen::new(block).eigenvalues;
            rho_sq.push(eig.iter().cloned().fold(0.0, f64::max));
        }
        Ok(Self { ctx, projector, g_hat, g_op, a_full, v_sq, rho_sq })
    }

    /// Plan at the largest admissible order `≤ cap`.
    pub fn select(grid: &SampleGrid, g_samples: &[f64], scale: f64, opts: &FitOptions) -> Result<Self> {
        let m = select_max_order(grid, scale, g_samples, opts.max_order_cap, opts.cond_threshold)?;
        Self::with_order(grid, g_samples, scale, m)
    }

    pub fn scale(&self) -> f64 {
        self.ctx.scale()
    }

    pub fn max_order(&self) -> usize {
        self.ctx.max_order()
    }

    pub fn context(&self) -> &LaguerreContext {
        &self.ctx
    }

    pub fn projector(&self) -> &Projector {
        &self.projector
    }

    pub fn kernel_coeffs(&self) -> &CoeffVector {
        &self.g_hat
    }

    pub fn kernel_operator(&self) -> &ToeplitzLT {
        &self.g_op
    }

    pub fn a_matrix(&self, m: usize) -> DMatrix<f64> {
        self.a_full.rows(0, m).into_owned()
    }

    /// `(m, v_m²)` for `m = 1..M`.
    pub fn v_sq(&self) -> Vec<(usize, f64)> {
        self.v_sq.iter().enumerate().map(|(i, v)| (i + 1, *v)).collect()
    }

    pub fn rho_sq(&self) -> Vec<(usize, f64)> {
        self.rho_sq.iter().enumerate().map(|(i, v)| (i + 1, *v)).collect()
    }

    /// `f̂_M = G_M^{-1} q̂_M`.
    pub fn full_coeffs(&self, y: &[f64]) -> Result<CoeffVector> {
        let q_hat = self.projector.apply(y)?;
        let f = self.g_op.solve_lower(q_hat.values())?;
        CoeffVector::new(f, self.scale())
    }

    pub fn scores(&self, cfg: &PenaltyConfig, f_full: &CoeffVector) -> ModelScores {
        let rho1_sq = self.rho_sq[0];
        let mut norm_sq = 0.0;
        let entries = (1..=self.max_order())
            .map(|m| {
                norm_sq += f_full.values()[m - 1].powi(2);
                let v_sq = self.v_sq[m - 1];
                let rho_sq = self.rho_sq[m - 1];
                let penalty = penalty(cfg, m, v_sq, rho_sq, rho1_sq);
                let contrast = -norm_sq;
                ModelScore { m, v_sq, rho_sq, penalty, contrast, objective: contrast + penalty }
            })
            .collect();
        ModelScores { entries }
    }

    /// `Φ_M G_M f` with `f` zero-padded to `M`.
    pub fn fitted_signal(&self, f: &CoeffVector) -> Result<Vec<f64>> {
        let q = self.g_op.apply(&f.zero_padded(self.max_order()))?;
        Ok((self.ctx.design() * DVector::from_vec(q)).as_slice().to_vec())
    }

    pub fn fit(&self, y: &[f64], cfg: &PenaltyConfig) -> Result<DeconvFit> {
        let f_full = self.full_coeffs(y)?;
        let scores = self.scores(cfg, &f_full);
        let m_hat = select_model(&scores);
        let f_hat = f_full.prefix(m_hat)?;
        let q_hat = self.fitted_signal(&f_hat)?;
        let residual_norm = y.iter().zip(&q_hat).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        Ok(DeconvFit {
            f_hat,
            f_full,
            m_hat,
            a_hat: self.scale(),
            max_order: self.max_order(),
            scores,
            q_hat,
            residual_norm,
            sigma_used: cfg.sigma,
            scale_trace: Vec::new(),
        })
    }
}

/// Smallest `m` attaining the minimum objective.
pub fn select_model(scores: &ModelScores) -> usize {
    let mut best = 1;
    let mut best_obj = f64::INFINITY;
    for s in &scores.entries {
        if s.objective < best_obj {
            best_obj = s.objective;
            best = s.m;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_order_cap: usize,
    pub cond_threshold: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { max_order_cap: DEFAULT_MAX_ORDER_CAP, cond_threshold: DEFAULT_COND_THRESHOLD }
    }
}

/// Default scale grid: 16 log-spaced values in `[0.1, 5]`.
pub fn default_a_grid() -> Vec<f64> {
    log_spaced(0.1, 5.0, 16)
}

pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (l, h) = (lo.ln(), hi.ln());
    (0..count).map(|i| (l + (h - l) * i as f64 / (count - 1) as f64).exp()).collect()
}

/// Outcome of one scale in the a-grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleOutcome {
    pub a: f64,
    pub max_order: Option<usize>,
    pub m_hat: Option<usize>,
    pub residual_norm: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeconvFit {
    pub f_hat: CoeffVector,
    /// All `M` coefficients at `â`; `f_hat` is its `m̂`-prefix.
    pub f_full: CoeffVector,
    pub m_hat: usize,
    pub a_hat: f64,
    pub max_order: usize,
    pub scores: ModelScores,
    pub q_hat: Vec<f64>,
    pub residual_norm: f64,
    pub sigma_used: f64,
    pub scale_trace: Vec<ScaleOutcome>,
}

/// Observation-independent state for every scale of an a-grid.
#[derive(Debug, Clone)]
pub struct DeconvPlan {
    grid: SampleGrid,
    plans: Vec<ScalePlan>,
    failures: Vec<(f64, String)>,
}

impl DeconvPlan {
    pub fn new(grid: &SampleGrid, g_samples: &[f64], a_grid: &[f64], opts: &FitOptions) -> Result<Self> {
        if a_grid.is_empty() {
            return Err(Error::InvalidArgument("empty a-grid".into()));
        }
        if g_samples.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: g_samples.len() });
        }
        let mut plans = Vec::new();
        let mut failures = Vec::new();
        for &a in a_grid {
            match ScalePlan::select(grid, g_samples, a, opts) {
                Ok(p) => plans.push(p),
                Err(e) => failures.push((a, e.to_string())),
            }
        }
        if plans.is_empty() {
            let msg = failures.iter().map(|(a, e)| format!("a={a}: {e}")).collect::<Vec<_>>().join("; ");
            return Err(Error::AllScalesFailed(msg));
        }
        Ok(Self { grid: grid.clone(), plans, failures })
    }

    pub fn grid(&self) -> &SampleGrid {
        &self.grid
    }

    pub fn scale_plans(&self) -> &[ScalePlan] {
        &self.plans
    }

    /// Fits every scale and keeps the one with the smallest `‖y - q̂(a)‖`
    /// (ties go to the smaller `a`).
    pub fn fit(&self, y: &[f64], cfg: &PenaltyConfig) -> Result<DeconvFit> {
        if y.len() != self.grid.len() {
            return Err(Error::LengthMismatch { expected: self.grid.len(), got: y.len() });
        }
        let mut trace: Vec<ScaleOutcome> = self
            .failures
            .iter()
            .map(|(a, e)| ScaleOutcome {
                a: *a,
                max_order: None,
                m_hat: None,
                residual_norm: None,
                error: Some(e.clone()),
            })
            .collect();
        let mut best: Option<DeconvFit> = None;
        for plan in &self.plans {
            match plan.fit(y, cfg) {
                Ok(fit) => {
                    trace.push(ScaleOutcome {
                        a: fit.a_hat,
                        max_order: Some(fit.max_order),
                        m_hat: Some(fit.m_hat),
                        residual_norm: Some(fit.residual_norm),
                        error: None,
                    });
                    let better = match &best {
                        None => true,
                        Some(b) => {
                            fit.residual_norm < b.residual_norm
                                || (fit.residual_norm == b.residual_norm && fit.a_hat < b.a_hat)
                        }
                    };
                    if better {
                        best = Some(fit);
                    }
                }
                Err(e) => trace.push(ScaleOutcome {
                    a: plan.scale(),
                    max_order: Some(plan.max_order()),
                    m_hat: None,
                    residual_norm: None,
                    error: Some(e.to_string()),
                }),
            }
        }
        trace.sort_by(|x, y| x.a.total_cmp(&y.a));
        let mut fit = best.ok_or_else(|| {
            Error::AllScalesFailed(trace.iter().filter_map(|t| t.error.clone()).collect::<Vec<_>>().join("; "))
        })?;
        fit.scale_trace = trace;
        Ok(fit)
    }
}

/// End-to-end fit over an a-grid.
pub fn fit(
    grid: &SampleGrid,
    y: &[f64],
    g_samples: &[f64],
    cfg: &PenaltyConfig,
    a_grid: &[f64],
    opts: &FitOptions,
) -> Result<DeconvFit> {
    DeconvPlan::new(grid, g_samples, a_grid, opts)?.fit(y, cfg)
}

/// Sample standard deviation of the samples before `arrival_index`.
pub fn estimate_sigma(y: &[f64], arrival_index: usize) -> Result<f64> {
    if arrival_index < 3 {
        return Err(Error::InvalidArgument(format!("arrival index must be at least 3, got {arrival_index}")));
    }
    if arrival_index > y.len() {
        return Err(Error::InvalidArgument(format!("arrival index {arrival_index} beyond {} samples", y.len())));
    }
    let pre = &y[..arrival_index];
    let k = pre.len() as f64;
    let mean = pre.iter().sum::<f64>() / k;
    Ok((pre.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scores_from(objectives: &[f64]) -> ModelScores {
        ModelScores {
            entries: objectives
                .iter()
                .enumerate()
                .map(|(i, &o)| ModelScore { m: i + 1, v_sq: 0.0, rho_sq: 0.0, penalty: 0.0, contrast: o, objective: o })
                .collect(),
        }
    }

    #[test]
    fn select_model_monotone_cases() {
        assert_eq!(select_model(&scores_from(&[1.0, 2.0, 3.0])), 1);
        assert_eq!(select_model(&scores_from(&[3.0, 2.0, 1.0])), 3);
        assert_eq!(select_model(&scores_from(&[2.0, 1.0, 1.0, 4.0])), 2);
    }

    #[test]
    fn penalty_at_first_order_has_no_log_term() {
        let cfg = PenaltyConfig::new(0.3, 1.0, 10.0, 100).unwrap();
        let p = penalty(&cfg, 1, 4.0, 4.0, 4.0);
        assert!((p - 8.0 * 0.09 * 10.0 / 100.0 * 4.0).abs() < 1e-15);
        // ratio below one clamps the log at zero
        let p = penalty(&cfg, 2, 1.0, 0.01, 4.0);
        assert!((p - 8.0 * 0.09 * 0.1).abs() < 1e-15);
    }

    #[test]
    fn sigma_estimates() {
        assert_eq!(estimate_sigma(&[2.0, 2.0, 2.0, 9.0], 3).unwrap(), 0.0);
        let s = estimate_sigma(&[0.0, 1.0, -1.0, 0.0, 50.0], 4).unwrap();
        assert!((s - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(estimate_sigma(&[0.0, 1.0, 2.0], 2).is_err());
        assert!(estimate_sigma(&[0.0, 1.0, 2.0], 4).is_err());
    }

    #[test]
    fn penalty_config_validation() {
        assert!(PenaltyConfig::new(-1.0, 1.0, 1.0, 10).is_err());
        assert!(PenaltyConfig::new(1.0, 0.5, 1.0, 10).is_err());
        assert!(PenaltyConfig::new(0.0, 1.0, 1.0, 10).is_ok());
    }

    #[test]
    fn log_spacing_endpoints() {
        let g = default_a_grid();
        assert_eq!(g.len(), 16);
        assert!((g[0] - 0.1).abs() < 1e-15);
        assert!((g[15] - 5.0).abs() < 1e-12);
    }
}
