//! Generic regularized competitors: the trapezoid-rule discretization
//! `q ≈ A f`, Tikhonov filtering and truncated SVD, with hyperparameters tuned
//! against a local-linear presmoothing of the observations.

use nalgebra::{DMatrix, DVector, SVD};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laguerre::SampleGrid;
use crate::simbench::functions::interpolate;

/// Lower-triangular trapezoid discretization of `∫_0^t g(t-τ) f(τ) dτ`.
#[derive(Debug, Clone)]
pub struct ConvMatrix {
    entries: DMatrix<f64>,
}

impl ConvMatrix {
    pub fn from_entries(entries: DMatrix<f64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::InvalidArgument("convolution matrix must be square".into()));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        (&self.entries * DVector::from_column_slice(f)).as_slice().to_vec()
    }
}

/// Row `i` holds trapezoid weights over `t_1..t_i` times `g(t_i - t_j)`, with
/// `g` interpolated linearly between grid points. A leading segment `[0, t_1]`
/// is charged to node `t_1` by a one-node rule, which vanishes when `t_1 = 0`.
pub fn conv_matrix(grid: &SampleGrid, g_samples: &[f64]) -> Result<ConvMatrix> {
    let n = grid.len();
    if g_samples.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: g_samples.len() });
    }
    let t = grid.times();
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut w = 0.0;
            if j == 0 {
                w += t[0];
            }
            if j > 0 {
                w += 0.5 * (t[j] - t[j - 1]);
            }
            if j < i {
                w += 0.5 * (t[j + 1] - t[j]);
            }
            if w != 0.0 {
                entries[(i, j)] = w * interpolate(t, g_samples, t[i] - t[j]);
            }
        }
    }
    Ok(ConvMatrix { entries })
}

/// SVD `A = U S V^T` with singular values sorted in decreasing order.
#[derive(Debug, Clone)]
pub struct SvdFilter {
    u: DMatrix<f64>,
    s: Vec<f64>,
    vt: DMatrix<f64>,
    zero_tol: f64,
}

impl SvdFilter {
    pub fn new(conv: &ConvMatrix) -> Self {
        let n = conv.n();
        let svd = SVD::new(conv.entries.clone(), true, true);
        let u0 = svd.u.expect("requested U");
        let vt0 = svd.v_t.expect("requested V^T");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        let u = DMatrix::from_fn(n, order.len(), |r, c| u0[(r, order[c])]);
        let vt = DMatrix::from_fn(order.len(), n, |r, c| vt0[(order[r], c)]);
        let s: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
        let zero_tol = s.first().copied().unwrap_or(0.0) * n as f64 * f64::EPSILON;
        Self { u, s, vt, zero_tol }
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.s
    }

    /// `‖A‖₂`.
    pub fn spectral_norm(&self) -> f64 {
        self.s.first().copied().unwrap_or(0.0)
    }

    /// Number of numerically zero singular values.
    pub fn null_count(&self) -> usize {
        self.s.iter().filter(|&&v| v <= self.zero_tol).count()
    }

    fn filtered(&self, y: &[f64], factor: impl Fn(usize, f64) -> f64) -> Vec<f64> {
        let uty = self.u.transpose() * DVector::from_column_slice(y);
        let mut coef = DVector::zeros(self.s.len());
        for (k, &s) in self.s.iter().enumerate() {
            if s > self.zero_tol {
                coef[k] = factor(k, s) * uty[k];
            }
        }
        (self.vt.transpose() * coef).as_slice().to_vec()
    }

    /// `V S (S² + λI)^{-1} U^T y`.
    pub fn tikhonov(&self, y: &[f64], lambda: f64) -> Vec<f64> {
        self.filtered(y, |_, s| s / (s * s + lambda))
    }

    /// `V S_k^{-1} U^T y` with the `drop_k` smallest singular values removed.
    pub fn tsvd(&self, y: &[f64], drop_k: usize) -> Vec<f64> {
        let keep = self.s.len().saturating_sub(drop_k);
        self.filtered(y, |k, s| if k < keep { 1.0 / s } else { 0.0 })
    }
}

pub fn tikhonov(conv: &ConvMatrix, y: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!("lambda must be non-negative, got {lambda}")));
    }
    check_len(conv.n(), y.len())?;
    Ok(SvdFilter::new(conv).tikhonov(y, lambda))
}

pub fn tsvd(conv: &ConvMatrix, y: &[f64], drop_k: usize) -> Result<Vec<f64>> {
    check_len(conv.n(), y.len())?;
    if drop_k >= conv.n() {
        return Err(Error::InvalidArgument(format!("drop_k {drop_k} must be below n = {}", conv.n())));
    }
    Ok(SvdFilter::new(conv).tsvd(y, drop_k))
}

fn check_len(n: usize, got: usize) -> Result<()> {
    if n != got {
        return Err(Error::LengthMismatch { expected: n, got });
    }
    Ok(())
}

/// Local-linear smoother weights for one evaluation point, as a row of the
/// hat matrix.
fn local_linear_row(t: &[f64], center: f64, bandwidth: f64) -> Result<Vec<f64>> {
    let w: Vec<f64> = t
        .iter()
        .map(|&x| {
            let d = ((x - center) / bandwidth).abs();
            if d < 1.0 {
                (1.0 - d * d * d).powi(3)
            } else {
                0.0
            }
        })
        .collect();
    let count = w.iter().filter(|&&v| v > 0.0).count();
    if count < 3 {
        return Err(Error::BandwidthTooSmall { bandwidth, center, count });
    }
    let s0: f64 = w.iter().sum();
    let s1: f64 = w.iter().zip(t).map(|(w, x)| w * (x - center)).sum();
    let s2: f64 = w.iter().zip(t).map(|(w, x)| w * (x - center).powi(2)).sum();
    let det = s0 * s2 - s1 * s1;
    if !(det > 1e-14 * s0 * s2) {
        return Err(Error::BandwidthTooSmall { bandwidth, center, count });
    }
    Ok(w.iter().zip(t).map(|(w, x)| w * (s2 - s1 * (x - center)) / det).collect())
}

/// Local-linear fit with tricube weights at every grid point.
pub fn presmooth(grid: &SampleGrid, y: &[f64], bandwidth: f64) -> Result<Vec<f64>> {
    check_len(grid.len(), y.len())?;
    if !(bandwidth > 0.0) {
        return Err(Error::InvalidArgument(format!("bandwidth must be positive, got {bandwidth}")));
    }
    let t = grid.times();
    t.iter().map(|&c| Ok(local_linear_row(t, c, bandwidth)?.iter().zip(y).map(|(l, v)| l * v).sum())).collect()
}

/// Smallest bandwidth for which every window holds at least three points.
pub fn min_feasible_bandwidth(grid: &SampleGrid) -> f64 {
    let t = grid.times();
    t.iter()
        .map(|&c| {
            let mut d: Vec<f64> = t.iter().map(|x| (x - c).abs()).collect();
            d.sort_by(f64::total_cmp);
            d[2.min(d.len() - 1)]
        })
        .fold(0.0, f64::max)
}

/// Bandwidth candidates for cross-validation: 20 log-spaced values from just
/// above the feasibility limit to half the horizon.
pub fn default_bandwidth_grid(grid: &SampleGrid) -> Vec<f64> {
    let lo = min_feasible_bandwidth(grid) * 1.05;
    let hi = (grid.horizon() * 0.5).max(lo * 1.5);
    crate::deconvolve::log_spaced(lo, hi, 20)
}

#[derive(Debug, Clone, Serialize)]
pub struct Presmoothed {
    pub bandwidth: f64,
    pub cv_score: f64,
    pub values: Vec<f64>,
}

/// Presmoother with bandwidth chosen by leave-one-out cross-validation.
pub fn presmooth_cv(grid: &SampleGrid, y: &[f64], bandwidths: &[f64]) -> Result<Presmoothed> {
    check_len(grid.len(), y.len())?;
    let t = grid.times();
    let mut best: Option<Presmoothed> = None;
    for &h in bandwidths {
        let Ok(rows) = t.iter().map(|&c| local_linear_row(t, c, h)).collect::<Result<Vec<_>>>() else {
            continue;
        };
        let mut score = 0.0;
        let mut values = Vec::with_capacity(t.len());
        for (i, row) in rows.iter().enumerate() {
            let fitted: f64 = row.iter().zip(y).map(|(l, v)| l * v).sum();
            values.push(fitted);
            let lii = row[i];
            if lii >= 1.0 - 1e-10 {
                score = f64::INFINITY;
                break;
            }
            score += ((y[i] - fitted) / (1.0 - lii)).powi(2);
        }
        if best.as_ref().is_none_or(|b| score < b.cv_score) {
            best = Some(Presmoothed { bandwidth: h, cv_score: score, values });
        }
    }
    best.filter(|b| b.cv_score.is_finite())
        .ok_or_else(|| Error::InvalidArgument("no bandwidth in the grid admits a local-linear fit".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BaselineMethod {
    Tikhonov,
    Tsvd,
}

#[derive(Debug, Clone, Serialize)]
pub struct TunedBaseline {
    pub method: BaselineMethod,
    /// `λ` for Tikhonov, `drop_k` for tSVD.
    pub hyperparameter: f64,
    pub residual: f64,
    pub solution: Vec<f64>,
}

/// Tikhonov grid: 40 log-spaced `λ` in `[1e-8, 1e2] · ‖A‖²`.
pub fn lambda_grid(svd: &SvdFilter) -> Vec<f64> {
    let s2 = svd.spectral_norm().powi(2);
    crate::deconvolve::log_spaced(1e-8, 1e2, 40).into_iter().map(|l| l * s2).collect()
}

/// Grid search minimizing `‖A f̂ - q̃‖`; ties go to heavier regularization.
pub fn tune_baseline(
    conv: &ConvMatrix,
    svd: &SvdFilter,
    y: &[f64],
    q_tilde: &[f64],
    method: BaselineMethod,
) -> Result<TunedBaseline> {
    check_len(conv.n(), y.len())?;
    check_len(conv.n(), q_tilde.len())?;
    let residual =
        |f: &[f64]| -> f64 { conv.apply(f).iter().zip(q_tilde).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() };
    // candidates ordered from heaviest to lightest regularization
    let candidates: Vec<(f64, Vec<f64>)> = match method {
        BaselineMethod::Tikhonov => lambda_grid(svd).into_iter().rev().map(|l| (l, svd.tikhonov(y, l))).collect(),
        BaselineMethod::Tsvd => (0..conv.n()).rev().map(|k| (k as f64, svd.tsvd(y, k))).collect(),
    };
    let mut best: Option<TunedBaseline> = None;
    for (h, solution) in candidates {
        let r = residual(&solution);
        if best.as_ref().is_none_or(|b| r < b.residual) {
            best = Some(TunedBaseline { method, hyperparameter: h, residual: r, solution });
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("empty hyperparameter grid".into()))
}
