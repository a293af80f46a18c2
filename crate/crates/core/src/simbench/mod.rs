//! Simulation benchmark: observation model, ISE metric and Monte Carlo cells
//! for the closed-form kernel suite and the sampled DCE-type kernels.

pub mod functions;
pub mod io;
pub mod runner;
pub mod synthetic;

pub use functions::{g45_coeffs, gamma_sf, KernelForm, KernelId, KernelSpec, TestFunction};
pub use runner::{run_cell, run_setting1, run_setting2, Cell, CellSummary, RunOptions, RunRecord};

use crate::error::{Error, Result};
use crate::laguerre::SampleGrid;

/// Sub-intervals per gap between observation times in [`true_q`].
pub const REFINEMENT: usize = 32;

/// `q(t_i) = ∫_0^{t_i} g(t_i - τ) f(τ) dτ` on a subgrid refined `REFINEMENT`
/// times between observation nodes.
///
/// The trapezoid sums at the full and half refinement are combined by one
/// Richardson step (composite Simpson weights).
pub fn true_q(kernel: &KernelSpec, f: &dyn Fn(f64) -> f64, grid: &SampleGrid) -> Result<Vec<f64>> {
    if let KernelForm::Sampled { grid: own, .. } = &kernel.form {
        functions::check_same_grid(own, grid)?;
    }
    let t = grid.times();
    let mut out = Vec::with_capacity(t.len());
    for &ti in t {
        let integrand = |tau: f64| kernel.eval(ti - tau) * f(tau);
        let mut total = 0.0;
        let mut lo = 0.0;
        for &hi in t.iter().take_while(|&&x| x <= ti) {
            if hi > lo {
                total += simpson(&integrand, lo, hi, REFINEMENT);
            }
            lo = hi;
        }
        out.push(total);
    }
    Ok(out)
}

fn simpson(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, pieces: usize) -> f64 {
    let h = (hi - lo) / pieces as f64;
    let mut s = f(lo) + f(hi);
    for k in 1..pieces {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(lo + k as f64 * h);
    }
    s * h / 3.0
}

/// Trapezoid integral of `(f̂ - f)²` over `[t_1, t_n]`.
pub fn ise(grid: &SampleGrid, f_hat: &[f64], f_true: &[f64]) -> Result<f64> {
    check_lengths(grid, f_hat, f_true)?;
    Ok(trapezoid_sq_error(grid.times(), f_hat, f_true))
}

/// ISE restricted to the central `fraction` of `[t_1, t_n]`, trimming the
/// same amount from both ends.
pub fn ise_interior(grid: &SampleGrid, f_hat: &[f64], f_true: &[f64], fraction: f64) -> Result<f64> {
    check_lengths(grid, f_hat, f_true)?;
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!("fraction must be in (0, 1], got {fraction}")));
    }
    let t = grid.times();
    let (first, last) = (t[0], t[t.len() - 1]);
    let trim = 0.5 * (1.0 - fraction) * (last - first);
    let keep: Vec<usize> =
        (0..t.len()).filter(|&i| t[i] >= first + trim - 1e-12 && t[i] <= last - trim + 1e-12).collect();
    if keep.len() < 2 {
        return Ok(0.0);
    }
    let ts: Vec<f64> = keep.iter().map(|&i| t[i]).collect();
    let a: Vec<f64> = keep.iter().map(|&i| f_hat[i]).collect();
    let b: Vec<f64> = keep.iter().map(|&i| f_true[i]).collect();
    Ok(trapezoid_sq_error(&ts, &a, &b))
}

fn check_lengths(grid: &SampleGrid, a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: a.len() });
    }
    if b.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: b.len() });
    }
    Ok(())
}

fn trapezoid_sq_error(t: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let e: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).collect();
    t.windows(2).zip(e.windows(2)).map(|(tw, ew)| 0.5 * (tw[1] - tw[0]) * (ew[0] + ew[1])).sum()
}

/// Pairwise summation; the result depends only on the order of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    (mean, (pairwise_sum(&dev) / (n - 1.0)).sqrt())
}

/// Linear-interpolated quantile of already sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v: Vec<f64> = xs.iter().copied().filter(|x| !x.is_nan()).collect();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, 0.5)
}
