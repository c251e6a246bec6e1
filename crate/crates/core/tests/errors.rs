use mdmult::error::Error;
use mdmult::sample::rng;
use mdmult::{
    b_norm, fejer, haagerup_family, induce, induce_witness, m2_norm, radial_multipliers,
    subgroup_coupling, tree_witness, Complex, FiniteGroup, FreeBall, GroupFunction,
    IntegerWindow, SolveOptions,
};

#[test]
fn rejects_tables_that_are_not_groups() {
    let table = vec![0, 0, 1, 1];
    assert!(FiniteGroup::from_table("bad", 2, table).is_err());
    assert!(matches!(
        FiniteGroup::from_table("short", 2, vec![0, 1, 1]),
        Err(Error::InvalidTable(_))
    ));
    assert!(FiniteGroup::from_preset("cyclic:0").is_err());
    assert!(FiniteGroup::from_preset("nonsense:3").is_err());
}

#[test]
fn rejects_carrier_mismatch() {
    let z3 = FiniteGroup::cyclic(3).unwrap();
    let s3 = FiniteGroup::symmetric(3).unwrap();
    let phi = GroupFunction::ones(&z3);
    assert!(matches!(
        b_norm(&phi, &s3, &SolveOptions::default()),
        Err(Error::CarrierMismatch(..))
    ));
    let sub = s3.subgroup_from_spec("alt:3").unwrap();
    let cs = subgroup_coupling::<f64>(&s3, &sub).unwrap();
    assert!(matches!(induce(&cs, &GroupFunction::ones(&z3)), Err(Error::CarrierMismatch(..))));
}

#[test]
fn rejects_non_finite_input() {
    let g = FiniteGroup::cyclic(3).unwrap();
    let phi = GroupFunction::from_fn(&g, |x| Complex::new(if x == 1 { f64::NAN } else { 1.0 }, 0.0));
    assert!(matches!(m2_norm(&phi, &g, &SolveOptions::default()), Err(Error::NonFinite(_))));
}

#[test]
fn rejects_invalid_solver_options() {
    let g = FiniteGroup::cyclic(3).unwrap();
    let phi = GroupFunction::ones(&g);
    let bad = SolveOptions::default().with_tolerance(0.0);
    assert!(matches!(b_norm(&phi, &g, &bad), Err(Error::InvalidParameter(_))));
}

#[test]
fn construction_budgets_are_enforced() {
    let w = IntegerWindow::new(2).unwrap();
    assert!(matches!(fejer::<f64>(4, &w), Err(Error::WindowTooSmall { .. })));
    let ball = FreeBall::new(2, 3).unwrap();
    assert!(matches!(tree_witness::<f64>(&ball, 2, 2, 1), Err(Error::BudgetViolated(_))));
    assert!(matches!(radial_multipliers::<f64>(&ball, 4), Err(Error::RadiusExhausted(_))));
    assert!(haagerup_family::<f64>(&ball, 2, -1.0).is_err());
    assert!(FreeBall::new(0, 2).is_err());
}

#[test]
fn induce_witness_refuses_a_broken_witness() {
    let s3 = FiniteGroup::symmetric(3).unwrap();
    let sub = s3.subgroup_from_spec("alt:3").unwrap();
    let cs = subgroup_coupling::<f64>(&s3, &sub).unwrap();
    let mut r = rng(2);
    let phi = mdmult::sample::random_pd_function(cs.lambda(), &mut r);
    let w = mdmult::coefficient_witness(cs.lambda(), &phi, 2, &SolveOptions::default()).unwrap();
    assert!(induce_witness(&cs, &phi, &w, 2).is_ok());
    let broken = w.perturbed(1, 1, (0, 0), Complex::new(0.5, 0.0));
    assert!(matches!(
        induce_witness(&cs, &phi, &broken, 2),
        Err(Error::UncertifiedWitness(_))
    ));
}
