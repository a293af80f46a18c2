//! Synthetic stand-ins for the measured DCE arterial input functions.
//!
//! Both are gamma-variate first passes with a delayed, wider recirculation
//! bump and a slow washout plateau, sampled on protocol-like time grids and
//! rescaled to `[0, 10]`. They are not patient data.

use crate::error::Result;
use crate::laguerre::SampleGrid;
use crate::simbench::functions::{KernelId, KernelSpec};

/// Rescaled horizon shared by both synthetic kernels.
pub const HORIZON: f64 = 10.0;

fn gamma_variate(t: f64, onset: f64, peak_after: f64, alpha: f64) -> f64 {
    if t <= onset {
        return 0.0;
    }
    let s = (t - onset) / peak_after;
    s.powf(alpha) * (alpha * (1.0 - s)).exp()
}

/// Enhancement curve in rescaled time with unit first-pass peak.
fn aif_shape(t: f64) -> f64 {
    let first_pass = gamma_variate(t, 0.25, 1.0, 3.0);
    let recirculation = 0.18 * gamma_variate(t, 1.6, 1.4, 2.5);
    let plateau = 0.12 * (1.0 - (-(t - 0.25).max(0.0) / 1.5).exp()) * (-(t / 25.0)).exp();
    first_pass + recirculation + plateau
}

/// DCE-CT-like acquisition: 20 frames every 2 s, then 8 sparser frames up to
/// 100 s; times rescaled to `[0, 10]`.
pub fn ct_grid() -> SampleGrid {
    let mut secs: Vec<f64> = (0..20).map(|i| 2.0 * i as f64).collect();
    secs.extend([44.0, 50.0, 56.0, 62.0, 70.0, 80.0, 90.0, 100.0]);
    let times = secs.iter().map(|s| s * HORIZON / 100.0).collect();
    SampleGrid::new(times, HORIZON).expect("static grid is valid")
}

/// DCE-MRI-like acquisition: 91 equispaced frames on `[0, 10]`.
pub fn mri_grid() -> SampleGrid {
    SampleGrid::equispaced(91, HORIZON).expect("static grid is valid")
}

/// Peak enhancement of the CT stand-in (HU-like units).
pub const CT_PEAK: f64 = 350.0;
/// Peak enhancement of the MRI stand-in (arbitrary signal units).
pub const MRI_PEAK: f64 = 1200.0;

pub fn ct_kernel() -> Result<KernelSpec> {
    let grid = ct_grid();
    let values = grid.times().iter().map(|&t| CT_PEAK * aif_shape(t)).collect();
    KernelSpec::sampled(KernelId::Ct, grid, values)
}

pub fn mri_kernel() -> Result<KernelSpec> {
    let grid = mri_grid();
    let values = grid.times().iter().map(|&t| MRI_PEAK * aif_shape(t)).collect();
    KernelSpec::sampled(KernelId::Mri, grid, values)
}

/// Noise levels for the two DCE settings.
pub const CT_SIGMA: f64 = 25.0;
pub const MRI_SIGMA: f64 = 60.0;
