//! Test functions `f1..f4`, kernels `g1..g5` and sampled kernels.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laguerre::SampleGrid;

/// Survival function of the Gamma(shape, scale) distribution at `t`.
pub fn gamma_sf(shape: f64, scale_param: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    regularized_upper_gamma(shape, t / scale_param)
}

/// `Q(s, x) = Γ(s, x)/Γ(s)`: power series for `x < s + 1`, Lentz continued
/// fraction otherwise.
pub fn regularized_upper_gamma(s: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let log_prefactor = -x + s * x.ln() - ln_gamma(s);
    if x < s + 1.0 {
        let mut term = 1.0 / s;
        let mut sum = term;
        let mut denom = s;
        for _ in 0..1000 {
            denom += 1.0;
            term *= x / denom;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                break;
            }
        }
        (1.0 - sum * log_prefactor.exp()).clamp(0.0, 1.0)
    } else {
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0 - s;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..1000 {
            let an = -(i as f64) * (i as f64 - s);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (log_prefactor.exp() * h).clamp(0.0, 1.0)
    }
}

/// Lanczos approximation (g = 7, nine terms).
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEFFS[0];
    let t = x + 7.5;
    for (i, c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TestFunction {
    F1,
    F2,
    F3,
    F4,
}

impl TestFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TestFunction::F1 => t * t * (-t).exp(),
            TestFunction::F2 => gamma_sf(2.0, 2.0, t),
            TestFunction::F3 => gamma_sf(3.0, 0.75, t),
            TestFunction::F4 => (-2.0 * t).exp(),
        }
    }

    pub fn sample(&self, ts: &[f64]) -> Vec<f64> {
        ts.iter().map(|&t| self.eval(t)).collect()
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestFunction::F1 => "f1",
            TestFunction::F2 => "f2",
            TestFunction::F3 => "f3",
            TestFunction::F4 => "f4",
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "f1" => Ok(TestFunction::F1),
            "f2" => Ok(TestFunction::F2),
            "f3" => Ok(TestFunction::F3),
            "f4" => Ok(TestFunction::F4),
            other => Err(Error::InvalidArgument(format!("unknown test function '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum KernelId {
    G1,
    G2,
    G3,
    G4,
    G5,
    Mri,
    Ct,
    Custom(String),
}

impl KernelId {
    pub fn name(&self) -> &str {
        match self {
            KernelId::G1 => "g1",
            KernelId::G2 => "g2",
            KernelId::G3 => "g3",
            KernelId::G4 => "g4",
            KernelId::G5 => "g5",
            KernelId::Mri => "gMRI",
            KernelId::Ct => "gCT",
            KernelId::Custom(s) => s,
        }
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "g1" => KernelId::G1,
            "g2" => KernelId::G2,
            "g3" => KernelId::G3,
            "g4" => KernelId::G4,
            "g5" => KernelId::G5,
            "gmri" | "mri" => KernelId::Mri,
            "gct" | "ct" => KernelId::Ct,
            other => return Err(Error::InvalidArgument(format!("unknown kernel '{other}'"))),
        })
    }
}

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ComplexFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum KernelForm {
    Closed(RealFn),
    /// Values on a grid, linearly interpolated in between.
    Sampled {
        grid: SampleGrid,
        values: Vec<f64>,
    },
}

#[derive(Clone)]
pub struct KernelSpec {
    pub id: KernelId,
    pub form: KernelForm,
    pub laplace: Option<ComplexFn>,
    pub r_order: Option<u32>,
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelSpec")
            .field("id", &self.id)
            .field("sampled", &matches!(self.form, KernelForm::Sampled { .. }))
            .field("r_order", &self.r_order)
            .finish()
    }
}

/// Roots of the numerator of `G(s)` for g4 and g5.
pub fn g4_roots() -> Vec<Complex64> {
    vec![Complex64::new(-4.0, 2.5), Complex64::new(-4.0, -2.5), Complex64::new(-0.75, 1.5), Complex64::new(-0.75, -1.5)]
}

pub fn g5_roots() -> Vec<Complex64> {
    let mut r = g4_roots();
    r.push(Complex64::new(-2.0, 2.0));
    r.push(Complex64::new(-2.0, -2.0));
    r
}

/// Coefficients `ρ_0 = 1, …, ρ_k` of `Π_j (s - root_j) = Σ_j ρ_j (s+3)^{k-j}`.
pub fn g45_coeffs(root_set: &[Complex64], k: usize) -> Result<Vec<f64>> {
    if root_set.len() != k {
        return Err(Error::InvalidArgument(format!("expected {k} roots, got {}", root_set.len())));
    }
    // poly[i] is the coefficient of u^i with u = s + 3
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for r in root_set {
        let w = r + 3.0;
        let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * w;
        }
        poly = next;
    }
    let residue = poly.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    let size = poly.iter().map(|c| c.norm()).fold(1.0, f64::max);
    if residue > 1e-10 * size {
        return Err(Error::NonConjugateRoots(residue));
    }
    Ok((0..=k).map(|j| poly[k - j].re).collect())
}

fn closed(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> KernelForm {
    KernelForm::Closed(Arc::new(f))
}

fn g45_kernel(id: KernelId, roots: Vec<Complex64>) -> KernelSpec {
    let k = roots.len();
    let rho = g45_coeffs(&roots, k).expect("built-in root sets are conjugate-closed");
    let factorials: Vec<f64> = (0..=k).map(|j| (1..=j + 2).map(|v| v as f64).product()).collect();
    let rho_t = rho.clone();
    let form = closed(move |t| {
        if t < 0.0 {
            return 0.0;
        }
        let poly: f64 = rho_t.iter().zip(&factorials).enumerate().map(|(j, (r, fct))| r / fct * t.powi(j as i32)).sum();
        (-3.0 * t).exp() * t * t * poly
    });
    let laplace: ComplexFn = Arc::new(move |s: Complex64| {
        let u = s + 3.0;
        rho.iter().enumerate().map(|(j, r)| *r / u.powi(j as i32 + 3)).sum()
    });
    KernelSpec { id, form, laplace: Some(laplace), r_order: Some(3) }
}

impl KernelSpec {
    pub fn builtin(id: &KernelId) -> Result<KernelSpec> {
        Ok(match id {
            KernelId::G1 => KernelSpec {
                id: id.clone(),
                form: closed(|t| if t < 0.0 { 0.0 } else { (-5.0 * t).exp() * (2.0 * t - (2.0 * t).sin()) }),
                laplace: Some(Arc::new(|s: Complex64| {
                    let u = s + 5.0;
                    8.0 / (u * u * (u * u + 4.0))
                })),
                r_order: Some(4),
            },
            KernelId::G2 => KernelSpec {
                id: id.clone(),
                form: closed(|t| if t < 0.0 { 0.0 } else { (-5.0 * t).exp() }),
                laplace: Some(Arc::new(|s: Complex64| 1.0 / (s + 5.0))),
                r_order: Some(1),
            },
            KernelId::G3 => KernelSpec {
                id: id.clone(),
                form: closed(|t| if t < 0.0 { 0.0 } else { (-t).exp() * (2.0 * t + 1.0) }),
                laplace: Some(Arc::new(|s: Complex64| (s + 3.0) / ((s + 1.0) * (s + 1.0)))),
                r_order: Some(1),
            },
            KernelId::G4 => g45_kernel(id.clone(), g4_roots()),
            KernelId::G5 => g45_kernel(id.clone(), g5_roots()),
            other => {
                return Err(Error::InvalidArgument(format!("kernel '{other}' has no closed form; load it from a file")))
            }
        })
    }

    pub fn sampled(id: KernelId, grid: SampleGrid, values: Vec<f64>) -> Result<KernelSpec> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(KernelSpec { id, form: KernelForm::Sampled { grid, values }, laplace: None, r_order: None })
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.form {
            KernelForm::Closed(f) => f(t),
            KernelForm::Sampled { grid, values } => interpolate(grid.times(), values, t),
        }
    }

    /// Kernel values on `grid`; a sampled kernel must live on the same grid.
    pub fn samples_on(&self, grid: &SampleGrid) -> Result<Vec<f64>> {
        match &self.form {
            KernelForm::Closed(f) => Ok(grid.times().iter().map(|&t| f(t)).collect()),
            KernelForm::Sampled { grid: own, values } => {
                check_same_grid(own, grid)?;
                Ok(values.clone())
            }
        }
    }

    /// Nominal noise level `σ_0(g)` of the closed-form benchmark kernels.
    pub fn nominal_sigma(&self) -> Option<f64> {
        match self.id {
            KernelId::G1 => Some(0.001),
            KernelId::G2 => Some(0.1),
            KernelId::G3 => Some(0.01),
            KernelId::G4 | KernelId::G5 => Some(0.002),
            _ => None,
        }
    }
}

pub(crate) fn check_same_grid(a: &SampleGrid, b: &SampleGrid) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { expected: a.len(), got: b.len() });
    }
    for (row, (x, y)) in a.times().iter().zip(b.times()).enumerate() {
        if (x - y).abs() > 1e-9 * x.abs().max(y.abs()).max(1.0) {
            return Err(Error::GridMismatch { row: row + 1, left: *x, right: *y });
        }
    }
    Ok(())
}

/// Piecewise-linear interpolation, constant beyond the end points.
pub fn interpolate(ts: &[f64], values: &[f64], t: f64) -> f64 {
    let n = ts.len();
    if t <= ts[0] {
        return values[0];
    }
    if t >= ts[n - 1] {
        return values[n - 1];
    }
    let hi = ts.partition_point(|&x| x <= t).min(n - 1);
    let lo = hi - 1;
    let span = ts[hi] - ts[lo];
    if span <= 0.0 {
        return values[hi];
    }
    let w = (t - ts[lo]) / span;
    values[lo] + w * (values[hi] - values[lo])
}
