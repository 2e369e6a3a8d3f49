use fracwave::battle_lemarie::{euler_frobenius_roots, BLSystem};
use fracwave::specfun::{beta_fn, chu_vandermonde_residual, gamma, gbinom, lgamma};
use fracwave::splines::{
    bspline_natural, decay_envelope_residual, fit_decay_envelope, partition_of_unity_residual, FractionalSpline,
    SplineVariant,
};
use fracwave::Error;
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn gamma_reference_values() {
    assert!((gamma(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
    assert!((gamma(5.0).unwrap() - 24.0).abs() < 1e-12);
    assert!((gamma(1.0 / 3.0).unwrap() - 2.678_938_534_707_747_6).abs() < 1e-13);
    assert!((gamma(-0.5).unwrap() + 2.0 * PI.sqrt()).abs() < 1e-13);
    assert!(matches!(gamma(-2.0), Err(Error::Pole(_))));
    let (l, s) = lgamma(-2.5);
    assert_eq!(s, -1.0);
    assert!((l - (gamma(-2.5).unwrap().abs()).ln()).abs() < 1e-13);
}

#[test]
fn beta_and_binomials() {
    let b = beta_fn(1.0 / 3.0, 5.0 / 3.0).unwrap();
    let want = gamma(1.0 / 3.0).unwrap() * gamma(5.0 / 3.0).unwrap() / gamma(2.0).unwrap();
    assert!((b - want).abs() < 1e-13);
    // integer binomials through Pascal's triangle
    let mut row = vec![1.0f64];
    for n in 1..=20usize {
        let mut next = vec![1.0; n + 1];
        for k in 1..n {
            next[k] = row[k - 1] + row[k];
        }
        row = next;
        for (k, v) in row.iter().enumerate() {
            assert!((gbinom(n as f64, k as i64) - v).abs() <= 1e-14 * v, "n={n} k={k}");
        }
    }
    // binom(-1/3, k) = (-1)^k Π_{j<k} (1/3 + j)/(j + 1)
    let mut prod = 1.0;
    for k in 0..30i64 {
        let sg = if k % 2 == 0 { 1.0 } else { -1.0 };
        assert!((gbinom(-1.0 / 3.0, k) - sg * prod).abs() < 1e-14, "k={k}");
        prod *= (1.0 / 3.0 + k as f64) / (k as f64 + 1.0);
    }
}

#[test]
fn chu_vandermonde_reference_instances() {
    for (r, s) in [(-1.0 / 3.0, 3.0), (8.0 / 3.0, 8.0 / 3.0), (-2.0 / 3.0, 6.0)] {
        for k in 0..=16 {
            assert!(chu_vandermonde_residual(r, s, k).abs() <= 1e-10, "r={r} s={s} k={k}");
        }
    }
}

#[test]
fn causal_natural_orders_are_bsplines() {
    for n in 1..=3usize {
        let sp = FractionalSpline::causal(n as f64).unwrap();
        for i in 0..=400 {
            let x = -1.0 + (n as f64 + 3.0) * i as f64 / 400.0;
            let v = sp.eval(x).unwrap();
            assert!((v - bspline_natural(n, x)).abs() < 1e-10, "n={n} x={x}");
        }
    }
}

#[test]
fn fractional_partition_of_unity() {
    for alpha in [0.5, 4.0 / 3.0, 5.0 / 3.0] {
        let sp = FractionalSpline::causal(alpha).unwrap();
        for x in [0.1, 0.37, 0.9] {
            let r = partition_of_unity_residual(&sp, x, 4000).unwrap();
            assert!(r < 1e-5, "alpha={alpha} x={x}: {r}");
        }
    }
}

#[test]
fn symmetric_odd_orders_centre_bsplines() {
    for n in [1usize, 3] {
        let sp = FractionalSpline::new(n as f64, SplineVariant::Symmetric).unwrap();
        for x in [-1.2, -0.4, 0.0, 0.7, 1.5] {
            let c = bspline_natural(n, x + (n as f64 + 1.0) / 2.0);
            assert!((sp.eval(x).unwrap() - c).abs() < 1e-12, "n={n} x={x}");
        }
    }
}

#[test]
fn decay_envelope_holds_off_grid() {
    for alpha in [0.5, 1.5] {
        let sp = FractionalSpline::causal(alpha).unwrap();
        let fit_grid: Vec<f64> = (0..=216).map(|i| 3.0 + i as f64 / 8.0).collect();
        let fit = fit_decay_envelope(&sp, &fit_grid).unwrap();
        for i in 0..=270 {
            let x = 3.0 + 0.1 * i as f64 + 0.013;
            assert!(decay_envelope_residual(&sp, &fit, x).unwrap() <= 0.0, "alpha={alpha} x={x}");
        }
    }
}

#[test]
fn euler_frobenius_data() {
    let r = euler_frobenius_roots(1).unwrap();
    assert!((r[0] - (2.0 - 3f64.sqrt())).abs() < 1e-12);
    for n in 1..=5 {
        let bl = BLSystem::new(n, 0, 0).unwrap();
        assert!(bl.factorization_residual(256) <= 1e-9, "n={n}");
        assert!(bl.roots.iter().all(|&x| x > 0.0 && x < 1.0));
    }
}

#[test]
fn bl_scaling_is_orthonormal() {
    for n in 1..=2 {
        let bl = BLSystem::new(n, 0, 0).unwrap();
        for i in 0..32 {
            let w = -PI + 2.0 * PI * (i as f64 + 0.5) / 32.0;
            assert!(bl.orthonormality_residual(w, 400) <= 1e-6, "n={n} w={w}");
        }
    }
}

proptest! {
    #[test]
    fn chu_vandermonde_real_arguments(r in -3.0f64..3.0, s in -3.0f64..3.0, k in 0u32..12) {
        prop_assert!(chu_vandermonde_residual(r, s, k).abs() <= 1e-10 * (1.0 + gbinom(r + s, k as i64).abs()));
    }

    #[test]
    fn gamma_recurrence(x in 0.05f64..20.0) {
        let a = gamma(x + 1.0).unwrap();
        let b = x * gamma(x).unwrap();
        prop_assert!((a - b).abs() <= 1e-13 * a.abs());
    }

    #[test]
    fn causal_spline_vanishes_left_of_zero(alpha in 0.1f64..4.0, x in -10.0f64..0.0) {
        let sp = FractionalSpline::causal(alpha).unwrap();
        prop_assert_eq!(sp.eval(x).unwrap(), 0.0);
    }
}
