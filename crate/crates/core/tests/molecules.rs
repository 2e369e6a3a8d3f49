use fracwave::frac_wavelets::{
    molecule_check, molecule_params_for, MoleculeGrid, Side, SplineSum, WaveletSystem,
};
use fracwave::Error;

fn example_system() -> (WaveletSystem, fracwave::frac_wavelets::MoleculeParams) {
    let params = molecule_params_for(2.0, 2.0, 0.0, 1.0, 5.0 / 3.0).unwrap();
    let sys = WaveletSystem::fractional_calibrated(5.0 / 3.0, Side::Plus, 2, 0, 0, &params, 256).unwrap();
    (sys, params)
}

#[test]
fn example_parameters_pass_on_grid() {
    let (sys, params) = example_system();
    assert_eq!((params.j, params.m, params.n), (1.0, 2.0, 0));
    let grid = MoleculeGrid::default();
    let phi = SplineSum { lo: 0, ..sys.phi.clone() };
    let r0 = molecule_check(&phi, 0, 0, &params, &grid).unwrap();
    assert!(r0.pass, "{:#?}", r0);
    let psi = sys.psi.clone();
    for nu in [1, 2] {
        let r = molecule_check(&psi, nu, 3, &params, &grid).unwrap();
        assert!(r.pass, "nu={nu}: {:#?}", r);
    }
    println!("c0 = {:?}, c = {:?}", sys.c0, sys.c);
}

#[test]
fn unscaled_large_multiple_fails_envelope() {
    let (sys, params) = example_system();
    let big = sys.psi.clone().scaled(50.0 / sys.c.unwrap());
    let r = molecule_check(&big, 1, 0, &params, &MoleculeGrid::coarse()).unwrap();
    assert!(!r.pass);
}

#[test]
fn infeasible_example_is_rejected() {
    // s = 5, r_w = 4, p = 1.5 gives J = 3; order 7 - 0.1 caps M at 6.9 + 1 - 5 = 2.9
    let e = molecule_params_for(1.5, 2.0, 5.0, 4.0, 6.9);
    assert!(matches!(e, Err(Error::Infeasible(_))), "{e:?}");
}
