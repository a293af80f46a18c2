mod common;

use common::{adaptive_simpson, laguerre_exact, rational, to_f64};
use lagdeconv::laguerre::{
    build_context, convolve_basis_identity_check, design_matrix, half_line_coeffs, laguerre_fn, laguerre_poly,
    SampleGrid,
};
use lagdeconv::quadrature::integrate;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

#[test]
fn recurrence_matches_exact_sum() {
    let xs = [0.0, 0.3, 1.0, 2.5, 4.0, 7.25, 11.0, 17.5, 25.0, 33.3, 42.0, 50.0];
    for k in 0..=20 {
        for &x in &xs {
            let exact = to_f64(&laguerre_exact(k, x));
            let got = laguerre_poly(k, x);
            let rel = (got - exact).abs() / exact.abs().max(1e-300);
            assert!(rel <= 1e-10, "k={k} x={x}: {got} vs {exact} (rel {rel:e})");
        }
    }
}

#[test]
fn order_five_at_one() {
    let exact = to_f64(&laguerre_exact(5, 1.0));
    assert!((laguerre_poly(5, 1.0) - exact).abs() < 1e-14);
}

#[test]
fn damped_recurrence_matches_exact_product() {
    // √(2a) = 1 at a = 0.5, so φ_10(20) = e^{-10} L_10(20)
    let exact = to_f64(&laguerre_exact(10, 20.0)) * (-10.0f64).exp();
    let got = laguerre_fn(10, 0.5, 20.0);
    assert!((got - exact).abs() <= 1e-12 * exact.abs().max(1e-3), "{got} vs {exact}");
}

#[test]
fn design_entries_match_direct_evaluation() {
    let grid = SampleGrid::equispaced(40, 10.0).unwrap();
    let ctx = build_context(&grid, 1.3, 18).unwrap();
    for (i, &t) in grid.times().iter().enumerate() {
        for k in 0..18 {
            let direct = laguerre_fn(k, 1.3, t);
            let got = ctx.design()[(i, k)];
            assert!((got - direct).abs() <= 1e-12 * direct.abs().max(1e-12), "i={i} k={k}");
        }
    }
}

#[test]
fn gram_matches_exact_product() {
    let grid = SampleGrid::equispaced(100, 10.0).unwrap();
    let ctx = build_context(&grid, 0.5, 25).unwrap();
    let design = ctx.design();
    let cols: Vec<Vec<BigRational>> = (0..25).map(|k| (0..100).map(|i| rational(design[(i, k)])).collect()).collect();
    for k in 0..25 {
        for j in 0..=k {
            let mut s = BigRational::zero();
            for i in 0..100 {
                s += &cols[k][i] * &cols[j][i];
            }
            let exact = to_f64(&s);
            assert!((ctx.gram()[(k, j)] - exact).abs() < 1e-8, "({k},{j})");
            assert_eq!(ctx.gram()[(k, j)], ctx.gram()[(j, k)]);
        }
    }
}

#[test]
fn gram_is_positive_semidefinite() {
    let grid = SampleGrid::equispaced(60, 10.0).unwrap();
    let ctx = build_context(&grid, 0.8, 12).unwrap();
    let eig = nalgebra::SymmetricEigen::new(ctx.gram().clone()).eigenvalues;
    let top = eig.iter().cloned().fold(0.0, f64::max);
    assert!(eig.iter().all(|&v| v >= -1e-12 * top));
}

#[test]
fn orthonormal_on_half_line() {
    for &a in &[0.5, 1.7] {
        let hi = 200.0 / a;
        for k in 0..=12 {
            for j in 0..=k {
                let v = integrate(|t| laguerre_fn(k, a, t) * laguerre_fn(j, a, t), 0.0, hi, 400, 24);
                let target = if k == j { 1.0 } else { 0.0 };
                assert!((v - target).abs() < 1e-6, "a={a} k={k} j={j}: {v}");
            }
        }
    }
}

#[test]
fn convolution_identity_against_adaptive_quadrature() {
    for &(a, t) in &[(0.5, 2.0), (1.0, 1.0), (0.5, 7.5), (2.0, 3.0)] {
        for k in 0..=10 {
            for j in 0..=(10 - k) {
                let lhs = adaptive_simpson(&|x| laguerre_fn(k, a, x) * laguerre_fn(j, a, t - x), 0.0, t, 1e-12);
                let (quad, closed) = convolve_basis_identity_check(k, j, a, t);
                assert!((lhs - closed).abs() < 1e-8, "a={a} t={t} k={k} j={j}: {lhs} vs {closed}");
                assert!((quad - closed).abs() < 1e-8, "a={a} t={t} k={k} j={j}: {quad} vs {closed}");
            }
        }
    }
}

#[test]
fn identity_check_at_zero_is_empty() {
    assert_eq!(convolve_basis_identity_check(0, 0, 0.5, 0.0), (0.0, 0.0));
}

#[test]
fn half_line_coefficients_of_exponentials() {
    // ∫_0^∞ e^{-ct} φ_k = √(2a) (c-a)^k / (c+a)^{k+1}
    for &(a, c) in &[(0.5, 5.0), (2.0, 2.0), (1.5, 0.4)] {
        let got = half_line_coeffs(&|t| (-c * t).exp(), a, 20, 120.0);
        for (k, v) in got.iter().enumerate() {
            let exact = (2.0 * a).sqrt() * (c - a).powi(k as i32) / (c + a).powi(k as i32 + 1);
            assert!((v - exact).abs() < 1e-10, "a={a} c={c} k={k}: {v} vs {exact}");
        }
    }
}

#[test]
fn design_rows_of_small_grids() {
    let grid = SampleGrid::new(vec![0.0, 1.0], 1.0).unwrap();
    let ctx = build_context(&grid, 0.5, 2).unwrap();
    assert_eq!(ctx.design()[(0, 0)], 1.0);
    assert_eq!(ctx.design()[(0, 1)], 1.0);
    let grid = SampleGrid::new(vec![0.5, 1.5, 4.0], 5.0).unwrap();
    let ctx = build_context(&grid, 0.5, 1).unwrap();
    for (i, &t) in grid.times().iter().enumerate() {
        assert!((ctx.design()[(i, 0)] - (-t / 2.0).exp()).abs() < 1e-15);
    }
}

#[test]
fn high_orders_at_large_arguments_stay_finite() {
    let row = design_matrix(&[350.0], 1.0, 65);
    assert!(row.iter().all(|v| v.is_finite()));
}

proptest! {
    #[test]
    fn bounded_by_root_two_a(k in 0usize..=64, a in 0.05f64..6.0, u in 0.0f64..1.0) {
        let t = u * 700.0 / (2.0 * a);
        let v = laguerre_fn(k, a, t);
        prop_assert!(v.is_finite());
        prop_assert!(v.abs() <= (2.0 * a).sqrt() * (1.0 + 1e-10));
    }

    #[test]
    fn recurrence_agrees_with_exact_sum(k in 0usize..=20, x in 0.0f64..50.0) {
        let exact = to_f64(&laguerre_exact(k, x));
        let got = laguerre_poly(k, x);
        // relative accuracy degrades only inside a tiny neighbourhood of a root
        let scale = exact.abs().max(1e-6 * (x / 2.0).exp().min(1e12));
        prop_assert!((got - exact).abs() <= 1e-10 * scale, "k={} x={}: {} vs {}", k, x, got, exact);
    }

    #[test]
    fn convolution_identity_random(k in 0usize..=5, j in 0usize..=5, a in 0.2f64..3.0, t in 0.01f64..8.0) {
        let (lhs, rhs) = convolve_basis_identity_check(k, j, a, t);
        prop_assert!((lhs - rhs).abs() < 1e-8);
    }
}
