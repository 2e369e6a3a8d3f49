use fracwave::battle_lemarie::PsiSign;
use fracwave::besov::{
    ap_estimate, besov_norm_proxy, coefficients, sequence_norm, usl_residual, BesovParams, CoeffRequest, CoeffRow,
    CoefficientGrid, WeightSpec,
};
use fracwave::frac_wavelets::{Side, WaveletSystem};
use fracwave::functions::{FunctionSpec, RealFn, SplineTerm};
use fracwave::quad::adaptive_split;
use proptest::prelude::*;

fn grid_of(rows: Vec<(u32, i64, f64)>, nu_max: u32) -> CoefficientGrid {
    let mut rows: Vec<CoeffRow> = rows.into_iter().map(|(nu, tau, lambda)| CoeffRow { nu, tau, lambda }).collect();
    rows.sort_by_key(|r| (r.nu, r.tau));
    CoefficientGrid { rows, base_offset: 0, nu_max, flagged: vec![] }
}

#[test]
fn weight_mass_examples() {
    assert_eq!(WeightSpec::constant().mass(0.0, 1.0), 1.0);
    assert!((WeightSpec::Power { gamma: 1.0 }.mass(0.0, 2.0) - 2.0).abs() < 1e-15);
    let e = WeightSpec::ExpCell { base: 0.5, r_w: 1.0 };
    for r in 0..6 {
        assert_eq!(e.mass(r as f64, r as f64 + 1.0), 0.5f64.powi(r));
    }
    let t = WeightSpec::Tabulated { xs: vec![0.0, 1.0, 2.0], ys: vec![1.0, 3.0, 1.0], r_w: 1.0 };
    assert!((t.mass(0.0, 2.0) - 4.0).abs() < 1e-15);
    assert!((t.mass(0.5, 1.5) - 2.5).abs() < 1e-15);
}

#[test]
fn usl_examples() {
    assert_eq!(usl_residual(&WeightSpec::constant(), 3, 7).unwrap(), 1.0);
    let r = usl_residual(&WeightSpec::Power { gamma: 1.0 }, 0, 3).unwrap();
    assert!((r - 1.0).abs() < 1e-14);
    let r = usl_residual(&WeightSpec::Power { gamma: 2.0 }, 2, 5).unwrap();
    // closed form: ((r+1/2)^3 - (r-1/2)^3)/(3 r^2) at r = 5
    let exact = (5.5f64.powi(3) - 4.5f64.powi(3)) / (3.0 * 25.0);
    assert!((r - exact).abs() < 1e-13 && (0.9..=1.1).contains(&r));
    assert!(usl_residual(&WeightSpec::Power { gamma: 1.0 }, 0, 0).is_err());
}

#[test]
fn ap_examples() {
    for p in [1.5, 2.0, 4.0] {
        let e = ap_estimate(&WeightSpec::constant(), p, 8).unwrap();
        assert!((e.value - 1.0).abs() < 1e-13 && !e.divergent);
    }
    let e = ap_estimate(&WeightSpec::Power { gamma: 1.0 }, 2.0, 8).unwrap();
    assert!(e.divergent, "boundary power weight must be flagged");
    let e = ap_estimate(&WeightSpec::Power { gamma: 1.0 }, 3.0, 8).unwrap();
    assert!(!e.divergent && e.value.is_finite());
    let spread = e.per_scale.iter().cloned().fold(0.0, f64::max) / e.per_scale.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread < 1.0 + 1e-9, "power weight is scale invariant");
    let e = ap_estimate(&WeightSpec::ExpCell { base: 0.5, r_w: 1.0 }, 2.0, 8).unwrap();
    assert!(e.divergent);
}

#[test]
fn zero_function_gives_zero_grid() {
    let sys = WaveletSystem::natural(2, 0, 0, PsiSign::Plus).unwrap();
    let req = CoeffRequest { nu_max: 3, tau_min: -2, tau_max: 4, window: (0.0, 2.0), base_offset: 0, nodes: 20 };
    let g = coefficients(&FunctionSpec::Zero, &sys, &req).unwrap();
    assert!(g.rows.iter().all(|r| r.lambda == 0.0));
    let n = sequence_norm(&g, &BesovParams::new(2.0, 2.0, 0.0), &WeightSpec::constant()).unwrap();
    assert_eq!(n, 0.0);
}

#[test]
fn gram_row_of_scaling_function() {
    let sys = WaveletSystem::natural(2, 0, 0, PsiSign::Plus).unwrap();
    let phi5 = |x: f64| sys.scaling(x - 5.0).unwrap();
    let req = CoeffRequest { nu_max: 0, tau_min: 0, tau_max: 10, window: (4.0, 8.0), base_offset: 0, nodes: 20 };
    let g = coefficients(&phi5, &sys, &req).unwrap();
    let knots: Vec<f64> = (0..=12).map(|k| k as f64).collect();
    for tau in 0..=10 {
        let direct = adaptive_split(
            |x| sys.scaling(x - 5.0).unwrap() * sys.scaling(x - tau as f64).unwrap(),
            4.0,
            8.0,
            &knots,
            1e-14,
        )
        .unwrap();
        let v = g.get(0, tau).unwrap();
        assert!((v - direct).abs() < 1e-12, "tau={tau}: {v} vs {direct}");
    }
    let peak = g.get(0, 5).unwrap();
    for d in 1..=3 {
        let (a, b) = (g.get(0, 5 - d).unwrap(), g.get(0, 5 + d).unwrap());
        assert!((a - b).abs() < 1e-13 && a < peak);
    }
}

#[test]
fn wavelet_level_matches_direct_quadrature() {
    let sys = WaveletSystem::natural(2, 0, 1, PsiSign::Plus).unwrap();
    let f = FunctionSpec::PowerBump { beta: 1.0, delta: 2.0 };
    let req = CoeffRequest { nu_max: 3, tau_min: -1, tau_max: 1, window: (0.0, 1.0), base_offset: 0, nodes: 16 };
    let g = coefficients(&f, &sys, &req).unwrap();
    for nu in 1..=3u32 {
        let sc = 2f64.powi(nu as i32 - 1);
        let (t0, t1) = req.tau_range(nu);
        for tau in [t0, t0 + 1, 0, t1] {
            let psi = |x: f64| 2f64.powf(nu as f64 / 2.0) * sc.sqrt() * sys.wavelet(sc * x - tau as f64).unwrap();
            let knots: Vec<f64> = (-40..=40).map(|k| k as f64 / (2.0 * sc)).collect();
            let direct = adaptive_split(|x| f.eval(x) * psi(x), 0.0, 1.0, &knots, 1e-14).unwrap();
            let v = g.get(nu, tau).unwrap();
            assert!((v - direct).abs() < 1e-11, "nu={nu} tau={tau}: {v} vs {direct}");
        }
    }
}

#[test]
fn fractional_anticausal_scaling_coefficients_vanish_left() {
    let sys = WaveletSystem::fractional(2.0 / 3.0, Side::Minus, 1, 0, 0, 1.0, 1.0, 32).unwrap();
    let f = FunctionSpec::Indicator { l: 0.0, r: 1.0 };
    let req = CoeffRequest { nu_max: 0, tau_min: -6, tau_max: 6, window: (0.0, 1.0), base_offset: 0, nodes: 20 };
    let g = coefficients(&f, &sys, &req).unwrap();
    for tau in -6..=0 {
        assert_eq!(g.get(0, tau).unwrap(), 0.0, "tau={tau}");
    }
    assert!(g.get(0, 1).unwrap().abs() > 1e-3);
}

#[test]
fn sequence_norm_examples() {
    let p = BesovParams::new(3.0, 1.5, 0.7);
    let g = grid_of(vec![(0, 0, 1.0)], 0);
    assert!((sequence_norm(&g, &p, &WeightSpec::constant()).unwrap() - 1.0).abs() < 1e-15);
    let g = grid_of(vec![(0, 0, 1.0), (0, 1, 1.0)], 0);
    let n = sequence_norm(&g, &BesovParams::new(2.0, 2.0, 0.0), &WeightSpec::constant()).unwrap();
    assert!((n - 2f64.sqrt()).abs() < 1e-15);
    let nmax = 8;
    let g = grid_of((0..=nmax).map(|nu| (nu, 0, 2f64.powi(-(nu as i32)))).collect(), nmax);
    let n = sequence_norm(&g, &BesovParams::new(2.0, 2.0, 0.0), &WeightSpec::constant()).unwrap();
    let exact: f64 = (0..=nmax).map(|nu| 8f64.powi(-(nu as i32))).sum::<f64>().sqrt();
    assert!((n - exact).abs() < 1e-15);
    let ninf = sequence_norm(&g, &BesovParams::new(2.0, f64::INFINITY, 0.0), &WeightSpec::constant()).unwrap();
    assert_eq!(ninf, 1.0);
}

#[test]
fn inner_sum_equals_step_function_integral() {
    let w = WeightSpec::Power { gamma: 0.5 };
    let rows = vec![(2, -3, 0.4), (2, 0, -1.2), (2, 1, 2.0), (2, 6, 0.3)];
    let g = grid_of(rows.clone(), 2);
    let p = 2.5;
    let n = sequence_norm(&g, &BesovParams::new(p, 1.0, 0.0), &w).unwrap();
    let step = |x: f64| {
        rows.iter()
            .filter(|(_, t, _)| x >= *t as f64 / 4.0 && x < (*t + 1) as f64 / 4.0)
            .map(|r| r.2.abs())
            .sum::<f64>()
    };
    let knots: Vec<f64> = (-4..=8).map(|k| k as f64 / 4.0).collect();
    let direct = adaptive_split(|x| step(x).powf(p) * w.density(x), -1.0, 2.0, &knots, 1e-13).unwrap();
    assert!((n - direct.powf(1.0 / p)).abs() < 1e-9);
}

#[test]
fn proxy_converges_in_resolution() {
    let sys = WaveletSystem::natural(4, 0, 0, PsiSign::Plus).unwrap();
    let f = FunctionSpec::SplineCombo { terms: vec![SplineTerm { coef: 1.0, order: 3.0, shift: 0.0 }] };
    let params = BesovParams::new(2.0, 2.0, 0.0);
    let mk = |nu_max| CoeffRequest { nu_max, tau_min: -6, tau_max: 5, window: (0.0, 4.0), base_offset: 0, nodes: 20 };
    let (a, _) = besov_norm_proxy(&f, &params, &WeightSpec::constant(), &sys, &mk(3)).unwrap();
    let (b, _) = besov_norm_proxy(&f, &params, &WeightSpec::constant(), &sys, &mk(6)).unwrap();
    assert!(((a.norm - b.norm) / b.norm).abs() < 0.01, "{} vs {}", a.norm, b.norm);
}

#[test]
fn finer_levels_cover_the_same_span() {
    let req = CoeffRequest { nu_max: 3, tau_min: -2, tau_max: 3, window: (0.0, 1.0), base_offset: 0, nodes: 20 };
    for nu in 0..=3 {
        let (a, b) = req.tau_range(nu);
        assert_eq!((a, b + 1), (-2 << nu, 4 << nu));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn norm_is_homogeneous(
        vals in prop::collection::vec(-5.0f64..5.0, 1..20),
        k in -6i32..6,
        p in 1.0f64..4.0,
        q in 0.5f64..4.0,
        s in -1.0f64..2.0,
    ) {
        let rows: Vec<(u32, i64, f64)> = vals.iter().enumerate().map(|(i, v)| ((i % 3) as u32, i as i64, *v)).collect();
        let g = grid_of(rows, 2);
        let params = BesovParams::new(p, q, s);
        let c = 2f64.powi(k);
        let a = sequence_norm(&g, &params, &WeightSpec::constant()).unwrap();
        let b = sequence_norm(&g.clone().scaled(-c), &params, &WeightSpec::constant()).unwrap();
        prop_assert!((b - c * a).abs() <= 1e-14 * (c * a).max(1e-300));
        let c2 = 1.0 + k.abs() as f64 / 7.0;
        let b2 = sequence_norm(&g.scaled(c2), &params, &WeightSpec::constant()).unwrap();
        prop_assert!((b2 - c2 * a).abs() <= 1e-13 * c2 * a + 1e-300);
    }

    #[test]
    fn norm_monotone_in_s(vals in prop::collection::vec(-5.0f64..5.0, 1..20), s1 in -1.0f64..1.0, ds in 0.0f64..1.0) {
        let rows: Vec<(u32, i64, f64)> = vals.iter().enumerate().map(|(i, v)| (1 + (i % 3) as u32, i as i64, *v)).collect();
        let g = grid_of(rows, 3);
        let a = sequence_norm(&g, &BesovParams::new(2.0, 2.0, s1), &WeightSpec::constant()).unwrap();
        let b = sequence_norm(&g, &BesovParams::new(2.0, 2.0, s1 + ds), &WeightSpec::constant()).unwrap();
        prop_assert!(a <= b * (1.0 + 1e-14));
    }

    #[test]
    fn coefficients_linear(c1 in -2.0f64..2.0, c2 in -2.0f64..2.0) {
        let sys = WaveletSystem::natural(1, 0, 0, PsiSign::Plus).unwrap();
        let f = FunctionSpec::PowerBump { beta: 0.5, delta: 1.0 };
        let g = FunctionSpec::Indicator { l: 0.25, r: 0.75 };
        let h = move |x: f64| c1 * f.eval(x) + c2 * g.eval(x);
        let req = CoeffRequest { nu_max: 2, tau_min: -2, tau_max: 1, window: (0.0, 1.0), base_offset: 0, nodes: 20 };
        let gf = coefficients(&FunctionSpec::PowerBump { beta: 0.5, delta: 1.0 }, &sys, &req).unwrap();
        let gg = coefficients(&FunctionSpec::Indicator { l: 0.25, r: 0.75 }, &sys, &req).unwrap();
        let gh = coefficients(&h, &sys, &req).unwrap();
        for ((a, b), c) in gf.rows.iter().zip(&gg.rows).zip(&gh.rows) {
            prop_assert!((c.lambda - (c1 * a.lambda + c2 * b.lambda)).abs() < 1e-12);
        }
    }
}
