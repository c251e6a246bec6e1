//! Engines checked against independent oracles: DFT ℓ¹ sums, the reweighted
//! factorization search, explicit partial sums and closed forms.

use mdmult::linalg::schur_norm;
use mdmult::oracle::{cyclic_fourier_l1, schur_factorization_search, tail_partial_sum};
use mdmult::sample::{random_function, random_hermitian, random_matrix, rng};
use mdmult::{
    a_norm, b_norm, fejer, m2_norm, tail_bound, Complex, FiniteGroup, GroupFunction,
    IntegerWindow, Rational, SolveOptions,
};

fn opts() -> SolveOptions {
    SolveOptions::default().with_tolerance(1e-9)
}

#[test]
fn schur_norm_matches_factorization_search() {
    let mut r = rng(11);
    for n in [2, 3, 4, 5] {
        for _ in 0..3 {
            let m = random_hermitian(n, &mut r);
            let cert = schur_norm(&m, &opts()).unwrap();
            let oracle = schur_factorization_search(&m, 6, 3000, 7);
            assert!(cert.lower <= cert.upper * (1.0 + 1e-12));
            assert!(oracle.lower <= cert.upper * (1.0 + 1e-7));
            assert!(cert.lower <= oracle.upper * (1.0 + 1e-7));
            let gap = (cert.value - oracle.upper).abs() / cert.value;
            assert!(gap < 1e-5, "n={n}: engine {} oracle {}", cert.value, oracle.upper);
        }
    }
}

#[test]
fn schur_norm_of_rank_one_is_product_of_sup_norms() {
    let mut r = rng(3);
    let a = random_matrix(4, 1, &mut r);
    let b = random_matrix(1, 4, &mut r);
    let m = &a * &b;
    let cert = schur_norm(&m, &opts()).unwrap();
    let sup = |v: &[Complex<f64>]| v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let expected = sup(a.as_slice()) * sup(b.as_slice());
    assert!((cert.value - expected).abs() < 1e-6 * expected);
}

#[test]
fn b_norm_matches_fourier_l1_on_cyclic_groups() {
    let mut r = rng(5);
    for n in 2..=8 {
        let g = FiniteGroup::cyclic(n).unwrap();
        for _ in 0..3 {
            let phi = random_function(&g, &mut r);
            let b = b_norm(&phi, &g, &opts()).unwrap();
            let oracle = cyclic_fourier_l1(phi.values());
            assert!((b - oracle).abs() < 1e-6 * oracle.max(1.0), "Z_{n}: {b} vs {oracle}");
        }
    }
}

#[test]
fn a_norm_agrees_with_b_norm_and_realizes_phi() {
    let mut r = rng(8);
    let g = FiniteGroup::symmetric(3).unwrap();
    let phi = random_function(&g, &mut r);
    let a = a_norm(&phi, &g, &opts()).unwrap();
    let b = b_norm(&phi, &g, &opts()).unwrap();
    assert!((a.value - b).abs() < 1e-6 * b);
    assert!(a.residual < 1e-8 * phi.sup_norm());
    assert!(a.search_value >= b * (1.0 - 1e-6));
}

#[test]
fn m2_equals_b_on_finite_groups() {
    let mut r = rng(21);
    for g in [FiniteGroup::symmetric(3).unwrap(), FiniteGroup::dihedral(4).unwrap()] {
        let phi = random_function(&g, &mut r);
        let m2 = m2_norm(&phi, &g, &opts()).unwrap();
        let b = b_norm(&phi, &g, &opts()).unwrap();
        let upper = m2.upper_value().unwrap();
        assert!((upper - b).abs() < 1e-5 * b, "{}: m2 {upper} vs b {b}", g.label());
    }
}

#[test]
fn sign_character_and_delta_have_unit_norm() {
    let g = FiniteGroup::symmetric(3).unwrap();
    let delta = GroupFunction::delta(&g, g.identity());
    assert!((b_norm(&delta, &g, &opts()).unwrap() - 1.0).abs() < 1e-7);
    let a3 = g.subgroup_from_spec("alt:3").unwrap();
    let sign = GroupFunction::from_real_fn(&g, |x| {
        if a3.locate[x].is_some() {
            1.0
        } else {
            -1.0
        }
    });
    assert!((b_norm(&sign, &g, &opts()).unwrap() - 1.0).abs() < 1e-7);
}

#[test]
fn tail_bound_matches_partial_sums() {
    for (n, t) in [(1, 0.5), (3, 0.2), (10, 0.1), (20, 1.0 / 20.0)] {
        let closed = tail_bound(n, t);
        let partial = tail_partial_sum(n, t, 20_000);
        assert!((closed - partial).abs() <= 1e-10 * closed.max(1e-300), "n={n} t={t}");
    }
}

#[test]
fn fejer_terms_match_closed_form_exactly() {
    let w = IntegerWindow::new(12).unwrap();
    for n in 1..=6usize {
        let term = fejer::<Rational>(n, &w).unwrap();
        for x in 0..(2 * 12 + 1) {
            let m = w.value(x);
            let expected = Rational::new((n as i64 - m.abs()).max(0), n as i64);
            assert_eq!(term.phi.get(x).re, expected, "n={n} m={m}");
            assert_eq!(term.phi.get(x).im, Rational::from_integer(0));
        }
        assert_eq!(term.certificate.norm_sq(), Rational::from_integer(1));
    }
}
