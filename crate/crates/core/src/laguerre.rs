//! Laguerre polynomials, Laguerre functions `φ_k(t) = √(2a) e^{-at} L_k(2at)`
//! and their design matrices over a sampling grid.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// Ordered observation times `t_1 ≤ … ≤ t_n` on `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    times: Vec<f64>,
    horizon: f64,
}

impl SampleGrid {
    pub fn new(times: Vec<f64>, horizon: f64) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {}", times.len())));
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidGrid(format!("horizon must be positive, got {horizon}")));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid("non-finite time".into()));
        }
        if times[0] < 0.0 {
            return Err(Error::InvalidGrid(format!("first time {} is negative", times[0])));
        }
        if let Some(i) = times.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::InvalidGrid(format!("times decrease at index {}", i + 1)));
        }
        let last = times[times.len() - 1];
        if last > horizon * (1.0 + 1e-12) {
            return Err(Error::InvalidGrid(format!("last time {last} exceeds horizon {horizon}")));
        }
        Ok(Self { times, horizon })
    }

    /// Grid whose horizon is its last time point.
    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        let horizon = times.last().copied().unwrap_or(0.0);
        Self::new(times, horizon)
    }

    /// `n` equispaced points `0, h, …, T` with `h = T/(n-1)`.
    pub fn equispaced(n: usize, horizon: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n}")));
        }
        let h = horizon / (n - 1) as f64;
        let mut times: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
        times[n - 1] = horizon;
        Self::new(times, horizon)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `L_order(x)` by the three-term recurrence.
pub fn laguerre_poly(order: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if order == 0 {
        return prev;
    }
    let mut cur = 1.0 - x;
    for k in 1..order {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `φ_order(t)` at scale `a`.
///
/// The damping factor `√(2a) e^{-at}` is applied to the two seeds of the
/// recurrence, so every iterate is already a Laguerre function value and
/// `L_k(2at)` is never formed on its own.
pub fn laguerre_fn(order: usize, scale: f64, t: f64) -> f64 {
    let x = 2.0 * scale * t;
    let mut prev = (2.0 * scale).sqrt() * (-scale * t).exp();
    if order == 0 {
        return prev;
    }
    let mut cur = prev * (1.0 - x);
    for k in 1..order {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Writes `φ_0(t), …, φ_{len-1}(t)` into `out`.
pub fn fill_laguerre_fns(scale: f64, t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let x = 2.0 * scale * t;
    let mut prev = (2.0 * scale).sqrt() * (-scale * t).exp();
    out[0] = prev;
    if out.len() == 1 {
        return;
    }
    let mut cur = prev * (1.0 - x);
    out[1] = cur;
    for k in 1..out.len() - 1 {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        out[k + 1] = next;
        prev = cur;
        cur = next;
    }
}

/// Laguerre functions at scale `a`, truncated at `M`, with the design
/// matrix `Φ_M` (rows = samples, columns = orders) and its gram matrix.
#[derive(Debug, Clone)]
pub struct LaguerreContext {
    scale: f64,
    max_order: usize,
    grid: SampleGrid,
    design: DMatrix<f64>,
    gram: DMatrix<f64>,
}

impl LaguerreContext {
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn grid(&self) -> &SampleGrid {
        &self.grid
    }

    pub fn design(&self) -> &DMatrix<f64> {
        &self.design
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Same grid and scale, first `m` columns only.
    pub fn truncated(&self, m: usize) -> Result<LaguerreContext> {
        if m == 0 || m > self.max_order {
            return Err(Error::InvalidArgument(format!("cannot truncate order {} context to {m}", self.max_order)));
        }
        let design = self.design.columns(0, m).into_owned();
        let gram = self.gram.view((0, 0), (m, m)).into_owned();
        Ok(LaguerreContext { scale: self.scale, max_order: m, grid: self.grid.clone(), design, gram })
    }
}

pub fn build_context(grid: &SampleGrid, scale: f64, max_order: usize) -> Result<LaguerreContext> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {scale}")));
    }
    let n = grid.len();
    if max_order == 0 {
        return Err(Error::InvalidArgument("max order must be at least 1".into()));
    }
    if max_order > n {
        return Err(Error::OrderTooLarge { max_order, n });
    }
    let design = design_matrix(grid.times(), scale, max_order);
    let gram = design.transpose() * &design;
    Ok(LaguerreContext { scale, max_order, grid: grid.clone(), design, gram })
}

/// `len(ts) × order` matrix of `φ_k(t_i)`.
pub fn design_matrix(ts: &[f64], scale: f64, order: usize) -> DMatrix<f64> {
    let mut design = DMatrix::zeros(ts.len(), order);
    let mut row = vec![0.0; order];
    for (i, &t) in ts.iter().enumerate() {
        fill_laguerre_fns(scale, t, &mut row);
        for (k, v) in row.iter().enumerate() {
            design[(i, k)] = *v;
        }
    }
    design
}

/// Half-line coefficients `∫_0^∞ f φ_k` for `k < order`, by composite
/// Gauss–Legendre on `[0, cutoff]`.
pub fn half_line_coeffs(f: &dyn Fn(f64) -> f64, scale: f64, order: usize, cutoff: f64) -> Vec<f64> {
    let panels = (cutoff * scale.max(1.0) * 4.0).ceil().max(64.0) as usize;
    let quad_order = 24.max(order / 2 + 8);
    (0..order)
        .map(|k| quadrature::integrate(|t| f(t) * laguerre_fn(k, scale, t), 0.0, cutoff, panels, quad_order))
        .collect()
}

/// Both sides of `∫_0^t φ_k(x) φ_j(t-x) dx = (2a)^{-1/2} [φ_{k+j}(t) - φ_{k+j+1}(t)]`:
/// returns `(quadrature of the left side, closed-form right side)`.
pub fn convolve_basis_identity_check(k: usize, j: usize, scale: f64, t: f64) -> (f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0);
    }
    let panels = ((2.0 * scale * t).ceil() as usize).max(1) * 4;
    let order = 24.max(k + j + 2);
    let lhs = quadrature::integrate(|x| laguerre_fn(k, scale, x) * laguerre_fn(j, scale, t - x), 0.0, t, panels, order);
    let rhs = (laguerre_fn(k + j, scale, t) - laguerre_fn(k + j + 1, scale, t)) / (2.0 * scale).sqrt();
    (lhs, rhs)
}
