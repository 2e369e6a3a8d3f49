use fracwave::besov::WeightSpec;
use fracwave::fracint::IntSign;
use fracwave::hardy::{
    c_eq, constant_c, constant_m, constant_n0, constant_nd, discrete_hardy_best_constant_lb, HardySetup,
};
use fracwave::Error;
use proptest::prelude::*;

fn half() -> WeightSpec {
    WeightSpec::ExpCell { base: 0.5, r_w: 1.0 }
}

#[test]
fn geometric_weight_closed_form() {
    // both suprema equal sqrt(2), attained at tau = 0 and tau = 1
    let r = constant_n0(0.5, 2.0, &WeightSpec::constant(), &half(), IntSign::Plus, 64).unwrap();
    let want = 2.0 * 2f64.sqrt();
    assert!((r.constant - want).abs() < 0.01 * want, "{r:?}");
    assert!((r.constant - want).abs() < 1e-10, "{r:?}");
    assert!(r.accepted());
}

#[test]
fn constant_weights_diverge() {
    let e = constant_n0(0.5, 2.0, &WeightSpec::constant(), &WeightSpec::constant(), IntSign::Plus, 64);
    assert!(matches!(e, Err(Error::Divergent(_))), "{e:?}");
    let e = constant_m(2.0, &WeightSpec::constant(), &WeightSpec::Power { gamma: -0.5 }, 64);
    assert!(matches!(e, Err(Error::Divergent(_))), "{e:?}");
}

#[test]
fn minus_is_mirror_of_plus() {
    for alpha in [0.5, 1.0 / 3.0, 1.7] {
        let u = WeightSpec::Power { gamma: 0.3 };
        let w = WeightSpec::ExpCell { base: 0.6, r_w: 1.0 };
        let plus = constant_n0(alpha, 1.5, &u, &w, IntSign::Plus, 64).unwrap();
        let minus = constant_n0(alpha, 1.5, &u.clone().reflected(), &w.clone().reflected(), IntSign::Minus, 64).unwrap();
        assert!((plus.constant - minus.constant).abs() <= 1e-14 * plus.constant, "{plus:?} {minus:?}");
    }
}

#[test]
fn level_zero_at_origin_matches_n0() {
    let u = WeightSpec::Power { gamma: 0.5 };
    let w = WeightSpec::ExpCell { base: 0.7, r_w: 1.0 };
    let n0 = constant_n0(0.8, 3.0, &u, &w, IntSign::Plus, 64).unwrap();
    let nd = constant_nd(&HardySetup::new(0.8, 3.0, u, w, IntSign::Plus), 0).unwrap();
    assert_eq!(n0.constant, nd.constant);
}

#[test]
fn sup_over_levels_sits_at_zero_for_dyadic_steps() {
    let setup = HardySetup::new(0.5, 2.0, WeightSpec::constant(), half(), IntSign::Plus);
    let c = constant_c(&setup, 4).unwrap();
    let n0 = c.per_d[0].constant;
    assert!(c.constant <= 1.02 * n0, "{:?}", c.per_d.iter().map(|r| r.constant).collect::<Vec<_>>());
}

#[test]
fn translation_covariance() {
    let u = WeightSpec::Power { gamma: 0.2 };
    let w = WeightSpec::ExpCell { base: 0.5, r_w: 1.0 };
    let mut s0 = HardySetup::new(0.6, 2.0, u.clone(), w.clone(), IntSign::Plus);
    s0.a = 0.25;
    let mut s1 = HardySetup::new(
        0.6,
        2.0,
        WeightSpec::Shifted { shift: 1.0, inner: Box::new(u) },
        WeightSpec::Shifted { shift: 1.0, inner: Box::new(w) },
        IntSign::Plus,
    );
    s1.a = 1.25;
    for d in 0..3 {
        let a = constant_nd(&s0, d).unwrap().constant;
        let b = constant_nd(&s1, d).unwrap().constant;
        assert!((a - b).abs() <= 1e-12 * a, "d={d}: {a} {b}");
    }
}

#[test]
fn m_constant_stable_and_homogeneous() {
    let u = WeightSpec::constant();
    let w = WeightSpec::ExpCell { base: 0.5, r_w: 1.0 };
    let a = constant_m(2.0, &u, &w, 64).unwrap().constant;
    let b = constant_m(2.0, &u, &w, 128).unwrap().constant;
    assert!((a - b).abs() < 0.01 * a);
    let c = 7.0;
    let ws = WeightSpec::Scaled { factor: c, inner: Box::new(w) };
    let s = constant_m(2.0, &u, &ws, 64).unwrap().constant;
    assert!((s - c.sqrt() * a).abs() < 1e-13 * s);
}

#[test]
fn coordinate_sequence_closed_form() {
    // the brute force includes e_0, whose ratio is (Σ w_τ (τ+1)^{p(2α-1)})^{1/p} / u_0^{1/p}
    let alpha = 0.75;
    let p = 2.0;
    let w = half();
    let setup = HardySetup::new(alpha, p, WeightSpec::constant(), w.clone(), IntSign::Plus);
    let lb = discrete_hardy_best_constant_lb(&setup, 100, 1).unwrap();
    let mut s = 0.0;
    for t in 0..2000 {
        s += w.mass(t as f64, t as f64 + 1.0) * ((t + 1) as f64).powf(p * (2.0 * alpha - 1.0));
    }
    let e0 = s.sqrt();
    assert!(lb.value >= e0 - 1e-10, "{lb:?} {e0}");
}

#[test]
fn lower_bound_within_equivalence_band() {
    for (alpha, p) in [(0.5, 2.0), (0.75, 1.5), (1.2, 3.0)] {
        let setup = HardySetup::new(alpha, p, WeightSpec::constant(), half(), IntSign::Plus);
        let n = constant_nd(&setup, 0).unwrap();
        let lb = discrete_hardy_best_constant_lb(&setup, 200, 7).unwrap();
        assert!(lb.value <= c_eq(p) * n.constant, "alpha={alpha}: {lb:?} vs {}", n.constant);
        assert!(lb.value >= n.constant / (2.0 * c_eq(p)), "alpha={alpha}: {lb:?} vs {}", n.constant);
    }
}

#[test]
fn lower_bound_is_seed_deterministic() {
    let setup = HardySetup::new(0.5, 2.0, WeightSpec::constant(), half(), IntSign::Plus);
    let a = discrete_hardy_best_constant_lb(&setup, 120, 42).unwrap();
    let b = discrete_hardy_best_constant_lb(&setup, 120, 42).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn w_scaling_is_power_one_over_p(c in 0.1f64..10.0, p in 1.2f64..4.0) {
        let u = WeightSpec::constant();
        let w = half();
        let a = constant_n0(0.6, p, &u, &w, IntSign::Plus, 32).unwrap().constant;
        let ws = WeightSpec::Scaled { factor: c, inner: Box::new(w) };
        let b = constant_n0(0.6, p, &u, &ws, IntSign::Plus, 32).unwrap().constant;
        prop_assert!((b - c.powf(1.0 / p) * a).abs() <= 1e-12 * b);
    }

    #[test]
    fn u_scaling_is_power_minus_one_over_p(c in 0.1f64..10.0) {
        let u = WeightSpec::Power { gamma: 0.4 };
        let w = half();
        let a = constant_n0(1.2, 2.5, &u, &w, IntSign::Plus, 32).unwrap().constant;
        let us = WeightSpec::Scaled { factor: c, inner: Box::new(u) };
        let b = constant_n0(1.2, 2.5, &us, &w, IntSign::Plus, 32).unwrap().constant;
        prop_assert!((b - c.powf(-1.0 / 2.5) * a).abs() <= 1e-12 * b);
    }
}
