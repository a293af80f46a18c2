#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Exact rational value of a finite double.
pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

/// `L_k(x)` from the explicit sum `Σ_j (-1)^j C(k,j) x^j / j!` in exact arithmetic.
pub fn laguerre_exact(k: usize, x: f64) -> BigRational {
    let x = rational(x);
    let mut total = BigRational::zero();
    let mut power = BigRational::one();
    let mut factorial = BigInt::one();
    let mut binom = BigInt::one();
    for j in 0..=k {
        if j > 0 {
            power *= &x;
            factorial *= BigInt::from(j);
            binom = binom * BigInt::from(k + 1 - j) / BigInt::from(j);
        }
        let term = &power * BigRational::new(binom.clone(), factorial.clone());
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().expect("representable")
}

/// Composite Simpson rule with `panels` (even) subintervals.
pub fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let panels = panels + panels % 2;
    let h = (hi - lo) / panels as f64;
    let mut s = f(lo) + f(hi);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(lo + i as f64 * h);
    }
    s * h / 3.0
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if hi <= lo {
        return 0.0;
    }
    // start from fixed panels so oscillatory integrands cannot fool the first estimate
    let panels = 64;
    let h = (hi - lo) / panels as f64;
    (0..panels)
        .map(|p| {
            let a = lo + p as f64 * h;
            let b = if p + 1 == panels { hi } else { a + h };
            let fa = f(a);
            let fb = f(b);
            let m = 0.5 * (a + b);
            let fm = f(m);
            let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
            step(f, a, b, fa, fm, fb, whole, tol / panels as f64, 40)
        })
        .sum()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` values uniform in `[-1, 1)`.
pub fn uniform_values(seed: u64, count: usize) -> Vec<f64> {
    let mut r = rng(seed);
    (0..count).map(|_| r.random_range(-1.0..1.0)).collect()
}

/// One standard normal draw.
pub fn gaussian(r: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(r)
}
