//! Randomised invariants of the induction map and of the Schur-norm engine.

use mdmult::linalg::schur_norm;
use mdmult::norms::pairing;
use mdmult::sample::{permutation_matrix, pd_from_vector, random_matrix, random_permutation, rng};
use mdmult::suite::{criterion_couplings, shipped_couplings};
use mdmult::{
    b_norm, induce, induce_dual, is_pd_function, theta, Complex, ExactCouplingSpace,
    ExactGroupFunction, GroupFunction, Rational, SolveOptions,
};
use proptest::prelude::*;

fn exact(cs: &ExactCouplingSpace, on_lambda: bool, raw: &[(i64, i64)]) -> ExactGroupFunction {
    let g = if on_lambda { cs.lambda() } else { cs.gamma() };
    mdmult::group::GroupFunction::from_fn(g, |x| {
        let (a, b) = raw[x % raw.len()];
        Complex::new(Rational::new(a, 4), Rational::new(b, 3))
    })
}

fn raw_values() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-9i64..=9, -9i64..=9), 6)
}

fn couplings() -> Vec<ExactCouplingSpace> {
    criterion_couplings().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn theta_is_multiplicative(ci in 0usize..5, a in raw_values(), b in raw_values()) {
        let cs = &couplings()[ci];
        let (f, g) = (exact(cs, true, &a), exact(cs, true, &b));
        let lhs = theta(cs, &f.mul(&g).unwrap()).unwrap();
        let (tf, tg) = (theta(cs, &f).unwrap(), theta(cs, &g).unwrap());
        for x in 0..cs.points() {
            prop_assert_eq!(&lhs[x], &(tf[x] * tg[x]));
        }
    }

    #[test]
    fn induce_is_linear(ci in 0usize..5, a in raw_values(), b in raw_values(), c in -5i64..=5) {
        let cs = &couplings()[ci];
        let (f, g) = (exact(cs, true, &a), exact(cs, true, &b));
        let k = Complex::new(Rational::from_integer(c), Rational::new(1, 2));
        let lhs = induce(cs, &f.scale(&k).add(&g).unwrap()).unwrap();
        let rhs = induce(cs, &f).unwrap().scale(&k).add(&induce(cs, &g).unwrap()).unwrap();
        prop_assert_eq!(lhs.values(), rhs.values());
    }

    #[test]
    fn induce_dual_is_adjoint(ci in 0usize..5, a in raw_values(), b in raw_values()) {
        let cs = &couplings()[ci];
        let phi = exact(cs, true, &a);
        let f = exact(cs, false, &b);
        let lhs = pairing(&induce(cs, &phi).unwrap(), &f).unwrap();
        let rhs = pairing(&phi, &induce_dual(cs, &f).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn induce_preserves_positive_definiteness(ci in 0usize..5, seed in any::<u64>()) {
        let cs = &shipped_couplings().unwrap()[ci];
        let mut r = rng(seed);
        let u = random_matrix(cs.lambda().order(), 1, &mut r);
        let phi = pd_from_vector(cs.lambda(), u.as_slice());
        let hat = induce(cs, &phi).unwrap();
        let all: Vec<usize> = cs.gamma().elements().collect();
        prop_assert!(is_pd_function(&hat, cs.gamma(), &all).unwrap());
        prop_assert!((hat.get(cs.gamma().identity()) - phi.get(cs.lambda().identity())).norm() < 1e-10);
    }

    #[test]
    fn induce_does_not_increase_b_norm(ci in 0usize..5, seed in any::<u64>()) {
        let cs = &shipped_couplings().unwrap()[ci];
        let mut r = rng(seed);
        let phi = GroupFunction::new(cs.lambda(), random_matrix(cs.lambda().order(), 1, &mut r).as_slice().to_vec()).unwrap();
        let opts = SolveOptions::default().with_tolerance(1e-9);
        let before = b_norm(&phi, cs.lambda(), &opts).unwrap();
        let after = b_norm(&induce(cs, &phi).unwrap(), cs.gamma(), &opts).unwrap();
        prop_assert!(after <= before * (1.0 + 1e-6), "{after} > {before}");
    }

    #[test]
    fn schur_norm_invariances(n in 2usize..5, seed in any::<u64>(), scale in 0.1f64..10.0) {
        let mut r = rng(seed);
        let m = random_matrix(n, n, &mut r);
        let opts = SolveOptions::default().with_tolerance(1e-8);
        let base = schur_norm(&m, &opts).unwrap().value;
        let close = |v: f64| (v - base).abs() <= 1e-5 * base;

        let scaled = schur_norm(&(m.clone() * Complex::new(scale, 0.0)), &opts).unwrap().value;
        prop_assert!((scaled - scale * base).abs() <= 1e-5 * scale * base);
        prop_assert!(close(schur_norm(&m.transpose(), &opts).unwrap().value));
        prop_assert!(close(schur_norm(&m.adjoint(), &opts).unwrap().value));

        let p = permutation_matrix(&random_permutation(n, &mut r));
        let q = permutation_matrix(&random_permutation(n, &mut r));
        prop_assert!(close(schur_norm(&(&p * &m * &q), &opts).unwrap().value));

        let phases = random_matrix(n, 1, &mut r).map(|z| z / z.norm());
        let d = mdmult::ComplexMatrix::from_diagonal(&phases.column(0).into_owned());
        prop_assert!(close(schur_norm(&(&d * &m), &opts).unwrap().value));

        let max_entry = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let max_row = m.row_iter().map(|row| row.norm()).fold(0.0, f64::max);
        let max_col = m.column_iter().map(|col| col.norm()).fold(0.0, f64::max);
        prop_assert!(max_entry <= base * (1.0 + 1e-7));
        prop_assert!(base <= max_row.min(max_col) * (1.0 + 1e-6));
    }
}
