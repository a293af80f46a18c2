//! Lower-triangular Toeplitz operators `G_m` mapping Laguerre coefficients of
//! `f` to those of `q = g * f`, plus symbol and growth-rate diagnostics.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::coeffs::CoeffVector;
use crate::error::{Error, Result};

/// `|b_0|` below this is treated as singular.
pub const SINGULAR_TOL: f64 = 1e-13;

/// Lower-triangular Toeplitz matrix stored by its first column.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzLT {
    first_col: Vec<f64>,
}

impl ToeplitzLT {
    pub fn new(first_col: Vec<f64>) -> Result<Self> {
        if first_col.is_empty() {
            return Err(Error::InvalidArgument("empty first column".into()));
        }
        Ok(Self { first_col })
    }

    /// Identity of size `m`.
    pub fn identity(m: usize) -> Self {
        let mut first_col = vec![0.0; m.max(1)];
        first_col[0] = 1.0;
        Self { first_col }
    }

    pub fn first_col(&self) -> &[f64] {
        &self.first_col
    }

    pub fn size(&self) -> usize {
        self.first_col.len()
    }

    /// Leading `m × m` block, which is again lower-triangular Toeplitz.
    pub fn truncated(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.size() {
            return Err(Error::InvalidArgument(format!("cannot truncate size {} to {m}", self.size())));
        }
        Ok(Self { first_col: self.first_col[..m].to_vec() })
    }

    /// `op · x`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let m = self.size();
        if x.len() != m {
            return Err(Error::LengthMismatch { expected: m, got: x.len() });
        }
        Ok((0..m).map(|i| (0..=i).map(|j| self.first_col[i - j] * x[j]).sum()).collect())
    }

    /// Product `T(b) T(d)` of two same-size operators; the first column of
    /// the result is the truncated polynomial product of the first columns.
    pub fn compose(&self, other: &ToeplitzLT) -> Result<ToeplitzLT> {
        let m = self.size();
        if other.size() != m {
            return Err(Error::LengthMismatch { expected: m, got: other.size() });
        }
        let first_col = (0..m).map(|k| (0..=k).map(|j| self.first_col[j] * other.first_col[k - j]).sum()).collect();
        Ok(ToeplitzLT { first_col })
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let m = self.size();
        DMatrix::from_fn(m, m, |i, j| if i >= j { self.first_col[i - j] } else { 0.0 })
    }

    pub fn solve_lower(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.solve_lower_with_tol(rhs, SINGULAR_TOL)
    }

    /// Forward substitution; `|b_0| < tol` is reported as singular.
    pub fn solve_lower_with_tol(&self, rhs: &[f64], tol: f64) -> Result<Vec<f64>> {
        let m = self.size();
        if rhs.len() != m {
            return Err(Error::LengthMismatch { expected: m, got: rhs.len() });
        }
        let b0 = self.first_col[0];
        if !(b0.abs() >= tol) {
            return Err(Error::Singular(b0.abs()));
        }
        let mut x = vec![0.0; m];
        for i in 0..m {
            let mut acc = rhs[i];
            for j in 0..i {
                acc -= self.first_col[i - j] * x[j];
            }
            x[i] = acc / b0;
        }
        Ok(x)
    }

    /// First column of the inverse, itself lower-triangular Toeplitz.
    pub fn inverse(&self) -> Result<ToeplitzLT> {
        let mut e = vec![0.0; self.size()];
        e[0] = 1.0;
        Ok(ToeplitzLT { first_col: self.solve_lower(&e)? })
    }
}

/// `G_m` from kernel coefficients: `b_0 = g^{(0)}/√(2a)`,
/// `b_k = (g^{(k)} - g^{(k-1)})/√(2a)`.
pub fn from_kernel_coeffs(g_coeffs: &CoeffVector, scale: f64) -> Result<ToeplitzLT> {
    let tagged = g_coeffs.scale();
    if (tagged - scale).abs() > 1e-12 * scale.abs().max(tagged.abs()) {
        return Err(Error::ScaleMismatch { coeffs: tagged, requested: scale });
    }
    let norm = (2.0 * scale).sqrt();
    let first_col = raw_symbol_coeffs(g_coeffs.values()).into_iter().map(|b| b / norm).collect();
    ToeplitzLT::new(first_col)
}

/// Unnormalized differences `g^{(0)}, g^{(1)} - g^{(0)}, …`.
pub fn raw_symbol_coeffs(g: &[f64]) -> Vec<f64> {
    (0..g.len()).map(|k| if k == 0 { g[0] } else { g[k] - g[k - 1] }).collect()
}

/// Compares `[solve(op_M, rhs_M)]_m` against `solve([op_M]_m, [rhs_M]_m)`.
pub fn nesting_check(op_m: &ToeplitzLT, m: usize, rhs_m: &[f64]) -> bool {
    let Ok(full) = op_m.solve_lower(rhs_m) else { return false };
    let Ok(small_op) = op_m.truncated(m) else { return false };
    let Ok(small) = small_op.solve_lower(&rhs_m[..m]) else { return false };
    let scale = full[..m].iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    full[..m].iter().zip(&small).all(|(a, b)| (a - b).abs() <= 1e-10 * scale)
}

/// Symbol of the kernel operator on the unit circle against the mapped
/// Laplace transform `G(a(1+z)/(1-z))`.
#[derive(Debug, Clone, Serialize)]
pub struct SymbolDiagnostics {
    pub theta_grid: Vec<f64>,
    /// `Σ_k b_k e^{ikθ}` with unnormalized `b_k = g^{(k)} - g^{(k-1)}`.
    pub symbol_values: Vec<Complex64>,
    /// Same sum for the `1/√(2a)`-normalized first column of `G_m`.
    pub symbol_values_normalized: Vec<Complex64>,
    pub mapped_laplace: Option<Vec<Complex64>>,
    pub growth_exponent: Option<f64>,
}

/// Minimum distance of every angle from `θ = 0 (mod 2π)`.
pub const THETA_EXCLUSION: f64 = 1e-3;

pub fn symbol_diagnostics(
    g_coeffs: &[f64],
    laplace_transform: Option<&dyn Fn(Complex64) -> Complex64>,
    scale: f64,
    theta_grid: &[f64],
) -> Result<SymbolDiagnostics> {
    let two_pi = 2.0 * std::f64::consts::PI;
    for &theta in theta_grid {
        let r = theta.rem_euclid(two_pi);
        if r.min(two_pi - r) < THETA_EXCLUSION {
            return Err(Error::InvalidArgument(format!("theta {theta} too close to 0 (mod 2π)")));
        }
    }
    let raw = raw_symbol_coeffs(g_coeffs);
    let norm = (2.0 * scale).sqrt();
    let symbol_values: Vec<Complex64> = theta_grid
        .iter()
        .map(|&theta| raw.iter().enumerate().map(|(k, b)| Complex64::from_polar(*b, k as f64 * theta)).sum())
        .collect();
    let symbol_values_normalized = symbol_values.iter().map(|v| v / norm).collect();
    let mapped_laplace = laplace_transform.map(|lt| {
        theta_grid
            .iter()
            .map(|&theta| {
                let z = Complex64::from_polar(1.0, theta);
                lt(scale * (1.0 + z) / (1.0 - z))
            })
            .collect()
    });
    Ok(SymbolDiagnostics {
        theta_grid: theta_grid.to_vec(),
        symbol_values,
        symbol_values_normalized,
        mapped_laplace,
        growth_exponent: None,
    })
}

/// `‖G_m^{-1}‖_F²` for `m = 1..size`; from the inverse's first column `c`,
/// `Σ_{k<m} (m-k) c_k²`.
pub fn inverse_frobenius_table(op: &ToeplitzLT) -> Result<Vec<(usize, f64)>> {
    let c = op.inverse()?.first_col().to_vec();
    Ok((1..=c.len()).map(|m| (m, c[..m].iter().enumerate().map(|(k, v)| (m - k) as f64 * v * v).sum())).collect())
}

/// Least-squares slope of `log v_m²` against `log m`.
pub fn growth_exponent(v_squared_by_m: &[(usize, f64)]) -> Result<f64> {
    let mut ms: Vec<usize> = v_squared_by_m.iter().map(|p| p.0).collect();
    ms.sort_unstable();
    ms.dedup();
    if ms.len() < 5 {
        return Err(Error::InvalidArgument(format!("growth fit needs at least 5 distinct orders, got {}", ms.len())));
    }
    if let Some(bad) = v_squared_by_m.iter().find(|p| p.0 == 0 || !(p.1 > 0.0)) {
        return Err(Error::InvalidArgument(format!("non-positive pair ({}, {})", bad.0, bad.1)));
    }
    let pts: Vec<(f64, f64)> = v_squared_by_m.iter().map(|&(m, v)| ((m as f64).ln(), v.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
