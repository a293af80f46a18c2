mod common;

use common::{adaptive_simpson, uniform_values};
use lagdeconv::coeffs::{project_samples, select_max_order, CoeffVector, DEFAULT_COND_THRESHOLD};
use lagdeconv::laguerre::{build_context, laguerre_fn, SampleGrid};
use lagdeconv::simbench::{KernelId, KernelSpec};
use lagdeconv::toeplitz::{
    from_kernel_coeffs, growth_exponent, inverse_frobenius_table, nesting_check, symbol_diagnostics, ToeplitzLT,
};
use lagdeconv::Error;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

/// `∫_0^∞ e^{-ct} φ_k(t) dt` in closed form.
fn exp_coeff(c: f64, a: f64, k: usize) -> f64 {
    (2.0 * a).sqrt() * (c - a).powi(k as i32) / (c + a).powi(k as i32 + 1)
}

/// `∫_0^∞ t e^{-ct} φ_k(t) dt`, minus the `c`-derivative of [`exp_coeff`].
fn t_exp_coeff(c: f64, a: f64, k: usize) -> f64 {
    let (d, s) = (c - a, c + a);
    let kf = k as f64;
    let deriv = if k == 0 { 0.0 } else { kf * d.powi(k as i32 - 1) / s.powi(k as i32 + 1) }
        - (kf + 1.0) * d.powi(k as i32) / s.powi(k as i32 + 2);
    -(2.0 * a).sqrt() * deriv
}

fn g2_coeffs(a: f64, m: usize) -> CoeffVector {
    CoeffVector::new((0..m).map(|k| exp_coeff(5.0, a, k)).collect(), a).unwrap()
}

fn g3_coeffs(a: f64, m: usize) -> CoeffVector {
    CoeffVector::new((0..m).map(|k| exp_coeff(1.0, a, k) + 2.0 * t_exp_coeff(1.0, a, k)).collect(), a).unwrap()
}

#[test]
fn closed_form_coefficients_match_quadrature() {
    for k in 0..8 {
        let quad = adaptive_simpson(&|t| (-5.0 * t).exp() * laguerre_fn(k, 0.5, t), 0.0, 40.0, 1e-13);
        assert!((quad - exp_coeff(5.0, 0.5, k)).abs() < 1e-10, "g2 k={k}");
        let g3 = |t: f64| (-t).exp() * (2.0 * t + 1.0) * laguerre_fn(k, 0.5, t);
        let quad = adaptive_simpson(&g3, 0.0, 80.0, 1e-13);
        let closed = g3_coeffs(0.5, k + 1).values()[k];
        assert!((quad - closed).abs() < 1e-10, "g3 k={k}: {quad} vs {closed}");
    }
}

#[test]
fn first_column_from_unit_leading_coefficient() {
    for a in [0.3f64, 0.5, 4.0] {
        let g = CoeffVector::new(vec![(2.0 * a).sqrt(), 0.0, 0.0], a).unwrap();
        let op = from_kernel_coeffs(&g, a).unwrap();
        let col = op.first_col();
        assert!((col[0] - 1.0).abs() < 1e-15 && (col[1] + 1.0).abs() < 1e-15 && col[2] == 0.0);
    }
    let g = CoeffVector::new(vec![0.7], 2.0).unwrap();
    let op = from_kernel_coeffs(&g, 2.0).unwrap();
    assert_eq!(op.size(), 1);
    assert!((op.first_col()[0] - 0.35).abs() < 1e-15);
}

#[test]
fn g2_first_column_at_half() {
    let op = from_kernel_coeffs(&g2_coeffs(0.5, 25), 0.5).unwrap();
    for k in 0..25 {
        let gk = 4.5f64.powi(k as i32) / 5.5f64.powi(k as i32 + 1);
        let prev = if k == 0 { 0.0 } else { 4.5f64.powi(k as i32 - 1) / 5.5f64.powi(k as i32) };
        assert!((op.first_col()[k] - (gk - prev)).abs() < 1e-9, "k={k}");
    }
}

#[test]
fn scale_tag_must_match() {
    let g = g2_coeffs(0.5, 4);
    assert!(matches!(from_kernel_coeffs(&g, 0.7), Err(Error::ScaleMismatch { .. })));
}

#[test]
fn small_solves() {
    let rhs = [0.3, -2.0, 5.5, 1.0];
    assert_eq!(ToeplitzLT::identity(4).solve_lower(&rhs).unwrap(), rhs.to_vec());
    let op = ToeplitzLT::new(vec![1.0, -1.0]).unwrap();
    assert_eq!(op.solve_lower(&[1.0, 0.0]).unwrap(), vec![1.0, 1.0]);
}

#[test]
fn singular_operators_are_rejected() {
    for b0 in [0.0, 1e-14, -5e-14] {
        let op = ToeplitzLT::new(vec![b0, 1.0, 2.0]).unwrap();
        assert!(matches!(op.solve_lower(&[1.0, 1.0, 1.0]), Err(Error::Singular(_))));
    }
}

#[test]
fn solve_matches_dense_lu() {
    for seed in 0..20 {
        let mut col = uniform_values(seed, 10);
        col[0] = 2.0 + col[0].abs();
        for v in col.iter_mut().skip(1) {
            *v *= 0.4;
        }
        let rhs = uniform_values(1000 + seed, 10);
        let op = ToeplitzLT::new(col).unwrap();
        let x = op.solve_lower(&rhs).unwrap();
        let oracle = op.to_dense().lu().solve(&DVector::from_column_slice(&rhs)).unwrap();
        for (a, b) in x.iter().zip(oracle.iter()) {
            assert!((a - b).abs() < 1e-10, "seed={seed}");
        }
    }
}

#[test]
fn nesting_holds_for_all_orders_on_benchmark_kernels() {
    let grid = SampleGrid::equispaced(100, 10.0).unwrap();
    let ids = [KernelId::G1, KernelId::G2, KernelId::G3, KernelId::G4, KernelId::G5];
    for id in &ids {
        let spec = KernelSpec::builtin(id).unwrap();
        let g = spec.samples_on(&grid).unwrap();
        for &a in &[0.5, 2.0, 5.0] {
            let big_m = select_max_order(&grid, a, &g, 25, DEFAULT_COND_THRESHOLD).unwrap();
            let ctx = build_context(&grid, a, big_m).unwrap();
            let op = from_kernel_coeffs(&project_samples(&ctx, &g).unwrap(), a).unwrap();
            let rhs = uniform_values(7, big_m);
            let full = op.solve_lower(&rhs).unwrap();
            for m in 1..=big_m {
                assert!(nesting_check(&op, m, &rhs), "{id} a={a} m={m}");
                let small = op
                    .truncated(m)
                    .unwrap()
                    .to_dense()
                    .solve_lower_triangular(&DVector::from_column_slice(&rhs[..m]))
                    .unwrap();
                let scale = full[..m].iter().fold(1.0f64, |s, v| s.max(v.abs()));
                for (x, y) in full[..m].iter().zip(small.iter()) {
                    assert!((x - y).abs() <= 1e-10 * scale, "{id} a={a} m={m}");
                }
            }
        }
    }
}

#[test]
fn nesting_trivial_cases() {
    let rhs = [1.0, 2.0, 3.0];
    assert!(nesting_check(&ToeplitzLT::identity(3), 2, &rhs));
    let op = ToeplitzLT::new(vec![1.5, 0.2, -0.7]).unwrap();
    assert!(nesting_check(&op, 3, &rhs));
}

#[test]
fn g2_symbol_at_pi_matches_mapped_laplace() {
    let lt = |s: Complex64| 1.0 / (s + 5.0);
    for &a in &[0.5, 2.0] {
        let coeffs = g2_coeffs(a, 25);
        let diag = symbol_diagnostics(coeffs.values(), Some(&lt), a, &[PI]).unwrap();
        let mapped = diag.mapped_laplace.as_ref().unwrap()[0];
        // a(1+e^{iπ})/(1-e^{iπ}) = 0
        assert!((mapped - Complex64::new(0.2, 0.0)).norm() < 1e-12);
        // alternating tail: bounded by the first omitted normalized coefficient
        let r = (5.0 - a) / (5.0 + a);
        let first_omitted = r.powi(24) * (1.0 - r) / (5.0 + a);
        let err = (diag.symbol_values_normalized[0] - mapped).norm();
        assert!(err < 1e-3 && err <= first_omitted * (1.0 + 1e-9), "a={a}: {err} vs {first_omitted}");
    }
}

#[test]
fn g2_symbol_away_from_zero() {
    let lt = |s: Complex64| 1.0 / (s + 5.0);
    let thetas: Vec<f64> = (1..12).map(|i| i as f64 * 2.0 * PI / 12.0).collect();
    let diag = symbol_diagnostics(g2_coeffs(2.0, 60).values(), Some(&lt), 2.0, &thetas).unwrap();
    let mapped = diag.mapped_laplace.unwrap();
    for (s, m) in diag.symbol_values_normalized.iter().zip(&mapped) {
        assert!((s - m).norm() < 1e-8);
    }
}

#[test]
fn g3_partial_sums_converge_to_three() {
    let lt = |s: Complex64| (s + 3.0) / ((s + 1.0) * (s + 1.0));
    let mut errors = Vec::new();
    for m in [2, 4, 8, 16, 32] {
        let diag = symbol_diagnostics(g3_coeffs(0.5, m).values(), Some(&lt), 0.5, &[PI]).unwrap();
        assert!((diag.mapped_laplace.unwrap()[0] - Complex64::new(3.0, 0.0)).norm() < 1e-12);
        errors.push((diag.symbol_values_normalized[0] - Complex64::new(3.0, 0.0)).norm());
    }
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    // coefficients decay like k 3^{-k} at a = 0.5
    assert!(errors[4] < 1e-12, "{errors:?}");
}

#[test]
fn empty_symbol_is_zero() {
    let diag = symbol_diagnostics(&[], None, 1.0, &[0.5, PI, 4.0]).unwrap();
    assert!(diag.symbol_values.iter().all(|v| v.norm() == 0.0));
    assert!(diag.mapped_laplace.is_none());
}

#[test]
fn angles_near_zero_are_rejected() {
    assert!(symbol_diagnostics(&[1.0], None, 1.0, &[5e-4]).is_err());
    assert!(symbol_diagnostics(&[1.0], None, 1.0, &[2.0 * PI - 1e-4]).is_err());
}

#[test]
fn growth_exponent_of_exact_powers() {
    let sq: Vec<(usize, f64)> = (10..=25).map(|m| (m, (m * m) as f64)).collect();
    assert!((growth_exponent(&sq).unwrap() - 2.0).abs() < 1e-12);
    let quartic: Vec<(usize, f64)> = (3..=9).map(|m| (m, 0.37 * (m as f64).powi(4))).collect();
    assert!((growth_exponent(&quartic).unwrap() - 4.0).abs() < 1e-12);
    assert!(growth_exponent(&sq[..4]).is_err());
}

#[test]
fn inverse_frobenius_matches_dense_inverse() {
    let op = from_kernel_coeffs(&g3_coeffs(1.0, 12), 1.0).unwrap();
    let table = inverse_frobenius_table(&op).unwrap();
    for (m, v) in table {
        let dense: DMatrix<f64> = op.truncated(m).unwrap().to_dense().try_inverse().unwrap();
        let fro = dense.iter().map(|x| x * x).sum::<f64>();
        assert!((v - fro).abs() <= 1e-10 * fro, "m={m}");
    }
}

fn first_col_strategy() -> impl Strategy<Value = Vec<f64>> {
    (1usize..=11).prop_flat_map(|len| prop::collection::vec(-1.0f64..1.0, len))
}

proptest! {
    #[test]
    fn product_of_symbols(b in first_col_strategy(), d in first_col_strategy()) {
        let m = b.len().max(d.len());
        let pad = |v: &[f64]| { let mut w = v.to_vec(); w.resize(m, 0.0); w };
        let tb = ToeplitzLT::new(pad(&b)).unwrap();
        let td = ToeplitzLT::new(pad(&d)).unwrap();
        let dense = tb.to_dense() * td.to_dense();
        // polynomial product of the symbols, truncated at degree m - 1
        let mut poly = vec![0.0; b.len() + d.len() - 1];
        for (i, x) in b.iter().enumerate() {
            for (j, y) in d.iter().enumerate() {
                poly[i + j] += x * y;
            }
        }
        poly.resize(m, 0.0);
        let from_poly = ToeplitzLT::new(poly).unwrap().to_dense();
        for (x, y) in dense.iter().zip(from_poly.iter()) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        let composed = tb.compose(&td).unwrap().to_dense();
        for (x, y) in composed.iter().zip(from_poly.iter()) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn solve_then_apply_reproduces_rhs(
        tail in prop::collection::vec(-0.3f64..0.3, 0..16),
        b0 in 1.0f64..3.0,
        rhs_seed in 0u64..1000,
    ) {
        let mut col = vec![b0];
        col.extend(tail);
        let rhs = uniform_values(rhs_seed, col.len());
        let op = ToeplitzLT::new(col).unwrap();
        let x = op.solve_lower(&rhs).unwrap();
        let back = op.apply(&x).unwrap();
        let norm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        let res = back.iter().zip(&rhs).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        prop_assert!(res <= 1e-10 * norm.max(1e-300));
    }

    #[test]
    fn nesting_on_random_operators(
        tail in prop::collection::vec(-1.0f64..1.0, 1..25),
        m_frac in 0.0f64..1.0,
        seed in 0u64..1000,
    ) {
        let mut col = vec![1.0];
        col.extend(tail);
        let big = col.len();
        let m = 1 + ((big - 1) as f64 * m_frac) as usize;
        let op = ToeplitzLT::new(col).unwrap();
        prop_assert!(nesting_check(&op, m, &uniform_values(seed, big)));
    }
}
