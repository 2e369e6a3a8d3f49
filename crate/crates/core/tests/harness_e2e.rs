use fracwave::besov::{BesovParams, WeightSpec};
use fracwave::fracint::IntSign;
use fracwave::functions::FunctionSpec;
use fracwave::harness::{
    choose_orders, run_identity_suite, verify, verify_forward, verify_inverse, Direction, ExperimentConfig,
};
use fracwave::Error;

fn load(name: &str) -> ExperimentConfig {
    let path = format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"));
    ExperimentConfig::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn forward() -> ExperimentConfig {
    load("forward_power_bump.json")
}

fn inverse() -> ExperimentConfig {
    load("inverse_indicator.json")
}

#[test]
fn orders_for_the_examples() {
    let o = choose_orders(&forward()).unwrap();
    assert_eq!(o.natural, 2);
    assert!((o.fractional - 5.0 / 3.0).abs() < 1e-15);
    assert_eq!((o.molecule.j, o.molecule.m, o.molecule.n), (1.0, 2.0, 0));

    let o = choose_orders(&inverse()).unwrap();
    assert_eq!(o.natural, 1);
    assert!((o.fractional - 4.0 / 3.0).abs() < 1e-15);

    // without the pinned order the order condition asks for n0 = 2 at s = 0
    let mut cfg = inverse();
    cfg.natural_order = None;
    let o = choose_orders(&cfg).unwrap();
    assert_eq!(o.natural, 2);
}

#[test]
fn infeasible_orders_name_the_constraint() {
    let mut cfg = forward();
    cfg.alpha = 0.1;
    cfg.params = BesovParams::new(1.5, 2.0, 5.0);
    cfg.w = WeightSpec::Power { gamma: 3.0 };
    match choose_orders(&cfg) {
        Err(Error::Infeasible(m)) => assert!(m.contains("M-bound"), "{m}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn forward_example_is_stable() {
    let r = verify_forward(&forward()).unwrap();
    assert!(r.ratio.is_finite() && r.ratio > 0.0);
    assert!(r.rel_change < 0.05, "{r:?}");
    assert!(r.pass, "{r:?}");
}

#[test]
fn inverse_example_is_stable() {
    let r = verify_inverse(&inverse()).unwrap();
    assert!(r.ratio.is_finite() && r.ratio > 0.0);
    assert!(r.rel_change < 0.1, "{r:?}");
    assert!(r.pass, "{r:?}");
}

#[test]
fn zero_input_gives_zero_ratio() {
    for mut cfg in [forward(), inverse()] {
        cfg.f = FunctionSpec::Zero;
        let r = verify(&cfg).unwrap();
        assert_eq!(r.ratio, 0.0);
        assert!(r.pass);
    }
}

#[test]
fn scaling_f_leaves_ratio() {
    for cfg in [forward(), inverse()] {
        let base = verify(&cfg).unwrap();
        let mut big = cfg.clone();
        big.f = big.f.scaled(1e3);
        let r = verify(&big).unwrap();
        for (a, b) in base.steps.iter().zip(&r.steps) {
            assert!((a.ratio - b.ratio).abs() <= 1e-10 * a.ratio, "{} {}", a.ratio, b.ratio);
        }
    }
}

#[test]
fn minus_reproduces_plus() {
    let plus = forward();
    let mut minus = plus.clone();
    minus.sign = IntSign::Minus;
    minus.f = plus.f.clone().reflected();
    minus.u = plus.u.clone().reflected();
    minus.w = plus.w.clone().reflected();
    minus.window = (-plus.window.1, -plus.window.0);
    let a = verify(&plus).unwrap();
    let b = verify(&minus).unwrap();
    for (x, y) in a.steps.iter().zip(&b.steps) {
        assert!((x.ratio - y.ratio).abs() <= 1e-10 * x.ratio);
    }
}

#[test]
fn inverse_hypothesis_gate() {
    let mut cfg = inverse();
    cfg.alpha = 0.5;
    cfg.w = WeightSpec::Power { gamma: 1.0 };
    match verify(&cfg) {
        Err(Error::Hypothesis(m)) => assert!(m.contains("r_w"), "{m}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn reports_are_byte_identical() {
    let cfg = forward();
    let a = serde_json::to_string_pretty(&verify(&cfg).unwrap()).unwrap();
    let b = serde_json::to_string_pretty(&verify(&cfg).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn config_rejects_wrong_schema_and_side() {
    let mut cfg = forward();
    cfg.schema_version = 99;
    assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    let mut cfg = forward();
    cfg.f = FunctionSpec::Indicator { l: -1.0, r: 1.0 };
    assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    assert_eq!(forward().direction, Direction::Forward);
}

#[test]
fn identity_suite_is_green_apart_from_the_printed_one_third() {
    let r = run_identity_suite().unwrap();
    assert!(r.all_pass, "{:#?}", r.rows.iter().filter(|x| !x.pass && !x.erratum).collect::<Vec<_>>());
    let lit = r.rows.iter().find(|x| x.erratum).unwrap();
    assert!(!lit.pass);
    assert!((lit.rhs / lit.lhs - 3.0).abs() < 1e-9);
    assert!(r.rows.iter().filter(|x| x.name.starts_with("subst")).all(|x| x.abs_diff <= 1e-9));
}
