//! Least-squares Laguerre coefficients from sampled values and the
//! truncation-order selection rule.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laguerre::{build_context, fill_laguerre_fns, LaguerreContext, SampleGrid};
use crate::toeplitz::from_kernel_coeffs;

/// Default cap on the truncation order.
pub const DEFAULT_MAX_ORDER_CAP: usize = 25;
/// Default condition-number ceiling for the "full rank" test.
pub const DEFAULT_COND_THRESHOLD: f64 = 1e12;
/// Relative pivot size below which the design is declared rank deficient.
const PIVOT_TOL: f64 = 1e-13;

/// Laguerre coefficients `c^{(0)}, …, c^{(m-1)}` relative to scale `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffVector {
    values: Vec<f64>,
    scale: f64,
}

impl CoeffVector {
    pub fn new(values: Vec<f64>, scale: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("coefficient vector must be non-empty".into()));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {scale}")));
        }
        Ok(Self { values, scale })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// First `m` coefficients.
    pub fn prefix(&self, m: usize) -> Result<CoeffVector> {
        if m == 0 || m > self.len() {
            return Err(Error::InvalidArgument(format!("prefix {m} of length {}", self.len())));
        }
        Ok(CoeffVector { values: self.values[..m].to_vec(), scale: self.scale })
    }

    /// Squared L² norm of the represented function (orthonormal basis).
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Pads with zeros up to length `m`.
    pub fn zero_padded(&self, m: usize) -> Vec<f64> {
        let mut v = self.values.clone();
        if v.len() < m {
            v.resize(m, 0.0);
        }
        v
    }
}

/// Precomputed least-squares map `(Φ^T Φ)^{-1} Φ^T = R^{-1} Q^T`.
#[derive(Debug, Clone)]
pub struct Projector {
    scale: f64,
    pinv: DMatrix<f64>,
    r: DMatrix<f64>,
}

impl Projector {
    pub fn new(ctx: &LaguerreContext) -> Result<Self> {
        let qr = ctx.design().clone().qr();
        let r = qr.r();
        let m = r.ncols();
        let largest = (0..m).map(|k| r[(k, k)].abs()).fold(0.0, f64::max);
        for k in 0..m {
            if !(r[(k, k)].abs() > PIVOT_TOL * largest) {
                return Err(Error::RankDeficient { order: k });
            }
        }
        let qt = qr.q().transpose();
        let pinv = r.solve_upper_triangular(&qt).ok_or(Error::RankDeficient { order: m - 1 })?;
        Ok(Self { scale: ctx.scale(), pinv, r })
    }

    /// The `M × n` matrix applied to samples.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.pinv
    }

    pub fn apply(&self, samples: &[f64]) -> Result<CoeffVector> {
        let n = self.pinv.ncols();
        if samples.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: samples.len() });
        }
        let c = &self.pinv * DVector::from_column_slice(samples);
        CoeffVector::new(c.as_slice().to_vec(), self.scale)
    }

    /// `(Φ^T Φ)^{-1} = R^{-1} R^{-T}`, formed without inverting the gram.
    pub fn gram_inverse(&self) -> DMatrix<f64> {
        let m = self.r.ncols();
        let rinv = self.r.solve_upper_triangular(&DMatrix::identity(m, m)).expect("pivots checked at construction");
        &rinv * rinv.transpose()
    }
}

/// Least-squares coefficients minimizing `‖Φ_M c - samples‖`.
pub fn project_samples(ctx: &LaguerreContext, samples: &[f64]) -> Result<CoeffVector> {
    Projector::new(ctx)?.apply(samples)
}

/// Evaluates `Σ_k c^{(k)} φ_k(t)` at each `t`.
pub fn reconstruct(coeffs: &CoeffVector, ts: &[f64]) -> Vec<f64> {
    let mut phi = vec![0.0; coeffs.len()];
    ts.iter()
        .map(|&t| {
            fill_laguerre_fns(coeffs.scale(), t, &mut phi);
            phi.iter().zip(coeffs.values()).map(|(p, c)| p * c).sum()
        })
        .collect()
}

/// Ratio of extreme singular values; infinite when the smallest is zero.
pub(crate) fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min > 0.0 && min.is_finite() {
        max / min
    } else {
        f64::INFINITY
    }
}

/// Largest `M ≤ cap` (clamped to `n`) for which both `Φ_M^T Φ_M` and
/// `Ĝ_M Ĝ_M^T` have condition number below `cond_threshold`.
///
/// `Ĝ_M` is built from the regression coefficients of `g_samples` at order `M`.
pub fn select_max_order(
    grid: &SampleGrid,
    scale: f64,
    g_samples: &[f64],
    cap: usize,
    cond_threshold: f64,
) -> Result<usize> {
    if g_samples.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: g_samples.len() });
    }
    let top = cap.min(grid.len());
    if top == 0 {
        return Err(Error::DegenerateGrid);
    }
    let full = build_context(grid, scale, top)?;
    for m in (1..=top).rev() {
        let ctx = full.truncated(m)?;
        // cond(Φ^T Φ) = cond(Φ)²
        let design_cond = condition_number(ctx.design()).powi(2);
        if !(design_cond < cond_threshold) {
            continue;
        }
        let Ok(g_hat) = project_samples(&ctx, g_samples) else { continue };
        let Ok(g_op) = from_kernel_coeffs(&g_hat, scale) else { continue };
        let kernel_cond = condition_number(&g_op.to_dense()).powi(2);
        if kernel_cond < cond_threshold {
            return Ok(m);
        }
    }
    Err(Error::DegenerateGrid)
}

/// `η` such that `M = n^{(1+η)/3}`.
pub fn implied_eta(n: usize, max_order: usize) -> f64 {
    3.0 * (max_order as f64).ln() / (n as f64).ln() - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_recovery_in_column_space() {
        let grid = SampleGrid::equispaced(40, 8.0).unwrap();
        let ctx = build_context(&grid, 0.7, 6).unwrap();
        let c = [0.5, -1.0, 0.25, 0.0, 2.0, -0.3];
        let y = ctx.design() * DVector::from_column_slice(&c);
        let got = project_samples(&ctx, y.as_slice()).unwrap();
        for (g, e) in got.values().iter().zip(c) {
            assert!((g - e).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_samples_give_zero_coefficients() {
        let grid = SampleGrid::equispaced(20, 5.0).unwrap();
        let ctx = build_context(&grid, 0.5, 5).unwrap();
        let got = project_samples(&ctx, &[0.0; 20]).unwrap();
        assert!(got.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn duplicate_times_make_design_rank_deficient() {
        let grid = SampleGrid::new(vec![1.0, 1.0, 1.0], 2.0).unwrap();
        let ctx = build_context(&grid, 0.5, 2).unwrap();
        assert!(matches!(project_samples(&ctx, &[1.0, 1.0, 1.0]), Err(Error::RankDeficient { order: 1 })));
    }

    #[test]
    fn reconstruct_basics() {
        let c = CoeffVector::new(vec![1.0], 0.5).unwrap();
        assert!((reconstruct(&c, &[0.0])[0] - 1.0).abs() < 1e-15);
        let z = CoeffVector::new(vec![0.0; 4], 1.3).unwrap();
        assert!(reconstruct(&z, &[0.0, 1.0, 5.0]).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn two_point_grid_caps_order() {
        let grid = SampleGrid::new(vec![0.0, 1.0], 1.0).unwrap();
        let g = [1.0, (-5.0f64).exp()];
        let m = select_max_order(&grid, 0.5, &g, 25, DEFAULT_COND_THRESHOLD).unwrap();
        assert!(m <= 2);
    }

    #[test]
    fn eta_of_setting_sizes() {
        assert!((implied_eta(100, 25) - 1.097).abs() < 1e-3);
        assert!((implied_eta(28, 25) - 1.90).abs() < 0.01);
    }
}
