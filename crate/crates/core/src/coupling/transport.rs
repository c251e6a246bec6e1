use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::induce::{induce, theta};
use super::space::CouplingSpace;
use crate::error::{Error, Result};
use crate::group::GroupFunction;
use crate::linalg::{c, operator_norm, CMatrix};
use crate::norms::{coefficient, verify_factorization, FactorizationWitness, TupleSource};
use crate::{cabs, to_f64, Real};

/// Carries an M_d witness for `φ` on Λ to a witness for `induce(φ)` on Γ.
///
/// The intermediate spaces are `ℓ²(p, w) ⊗ ℋ_j` with orthonormal basis
/// `e_x = δ_x / √w(x)`. For `x ∈ p` let `s(γ, x)` be the unique `s` with
/// `(γ, s)·x ∈ p`. Then
///
/// - `ξ̂_d(γ) = Σ_{x ∈ p} √w(x) e_{(γ,s)·x} ⊗ ξ_d(s)`,
/// - `ξ̂_j(γ)(e_x ⊗ h) = e_{(γ,s)·x} ⊗ ξ_j(s) h` for `1 < j < d`,
/// - `ξ̂_1(γ)(e_x ⊗ h) = √w(x) ξ_1(s) h`,
///
/// always with `s = s(γ, x)`. Since the algebra is commutative, the left and
/// right `p`-sides agree and the odd and even cases share one formula.
pub fn induce_witness<T: Real>(
    cs: &CouplingSpace<T>,
    phi: &GroupFunction<T>,
    w: &FactorizationWitness<T>,
    d: usize,
) -> Result<FactorizationWitness<T>> {
    if w.d() != d {
        return Err(Error::MalformedWitness(format!(
            "witness has d = {}, requested {d}",
            w.d()
        )));
    }
    let lambda = cs.lambda();
    if w.acting_set().len() != lambda.order() {
        return Err(Error::MalformedWitness(
            "witness must act on every element of Λ".into(),
        ));
    }
    let tuples = TupleSource::auto(lambda.order(), d, 1_000_000, 0);
    let check = verify_factorization(phi, w, lambda, &tuples, 1e-10)?;
    if !check.certified {
        return Err(Error::UncertifiedWitness(to_f64(check.residual)));
    }
    let p = cs.p();
    let np = p.len();
    let mut slot = vec![usize::MAX; cs.points()];
    for (i, &x) in p.iter().enumerate() {
        slot[x] = i;
    }
    let dims = w.dims();
    let mut new_dims = vec![1];
    new_dims.extend(dims[1..d].iter().map(|&k| np * k));
    new_dims.push(1);
    let gamma = cs.gamma();
    // For each γ and each x ∈ p: (s, slot of (γ, s)·x).
    let moves: Vec<Vec<(usize, usize)>> = gamma
        .elements()
        .map(|g| {
            p.iter()
                .map(|&x| {
                    let gx = cs.gamma_act(g, x);
                    let s = cs.lambda_label(gx);
                    (s, slot[cs.lambda_act(s, gx)])
                })
                .collect()
        })
        .collect();
    let root_w: Vec<T> = p.iter().map(|&x| cs.weight(x).sqrt()).collect();
    let op = |i: usize, s: usize| w.xi(i, s).expect("witness acts on all of Λ");
    let mut xi = Vec::with_capacity(d);
    for i in 1..=d {
        let (rows, cols) = (new_dims[i - 1], new_dims[i]);
        let family = gamma
            .elements()
            .map(|g| {
                let mut m = CMatrix::<T>::zeros(rows, cols);
                for (ix, &(s, iy)) in moves[g].iter().enumerate() {
                    let a = op(i, s);
                    let (r, k) = a.shape();
                    if i == 1 {
                        m.view_mut((0, ix * k), (1, k))
                            .copy_from(&(a * c(root_w[ix])));
                    } else if i == d {
                        m.view_mut((iy * r, 0), (r, 1))
                            .copy_from(&(a * c(root_w[ix])));
                    } else {
                        m.view_mut((iy * r, ix * k), (r, k)).copy_from(a);
                    }
                }
                m
            })
            .collect();
        xi.push(family);
    }
    FactorizationWitness::new(gamma, new_dims, gamma.elements().collect(), xi)
}

/// Defects of the map `F_q(δ_γ ⊗ x) = σ_γ(q) x` from `ℓ²(Γ) ⊗ L²(M^Γ, τ)` to
/// `L²(points, w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KoopmanReport {
    pub orbits: usize,
    /// `max(‖F*F − I‖, ‖FF* − I‖)`.
    pub unitarity_defect: f64,
    /// `max_γ ‖σ⁰(γ) F − F (λ(γ) ⊗ id)‖`.
    pub intertwining_defect: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn koopman_check<T: Real>(cs: &CouplingSpace<T>) -> Result<KoopmanReport> {
    let fixed = cs.fixed_algebra();
    let gamma = cs.gamma();
    let (n, m) = (cs.points(), fixed.orbits.len());
    let cols = gamma.order() * m;
    let col = |g: usize, o: usize| g * m + o;
    // Coordinates in the orthonormal bases δ_y/√w(y) and δ_γ ⊗ 1_O/√τ(O).
    let mut f = CMatrix::<T>::zeros(n, cols);
    for g in gamma.elements() {
        for &x in cs.q() {
            let y = cs.gamma_act(g, x);
            let o = fixed.orbit_of[y];
            f[(y, col(g, o))] = c((*cs.weight(y) / fixed.tau[o]).sqrt());
        }
    }
    let id = |k: usize| CMatrix::<T>::identity(k, k);
    let fa = f.adjoint();
    let unitarity_defect = if n == cols {
        to_f64(operator_norm(&(&fa * &f - id(cols)))?).max(to_f64(operator_norm(&(&f * &fa - id(n)))?))
    } else {
        f64::INFINITY
    };
    let mut intertwining_defect: f64 = 0.0;
    for a in gamma.elements() {
        let mut sigma = CMatrix::<T>::zeros(n, n);
        for y in 0..n {
            sigma[(cs.gamma_act(a, y), y)] = c(T::one());
        }
        let mut lam = CMatrix::<T>::zeros(cols, cols);
        for g in gamma.elements() {
            for o in 0..m {
                lam[(col(gamma.mul(a, g), o), col(g, o))] = c(T::one());
            }
        }
        let defect = operator_norm(&(&sigma * &f - &f * &lam))?;
        intertwining_defect = intertwining_defect.max(to_f64(defect));
    }
    let tolerance = 1e-10;
    Ok(KoopmanReport {
        orbits: m,
        unitarity_defect,
        intertwining_defect,
        tolerance,
        passed: unitarity_defect <= tolerance && intertwining_defect <= tolerance,
    })
}

/// Transport of a coefficient realization `φ(s) = ⟨λ(s)ξ, η⟩` on Λ to
/// `ξ̂ = θ_p(ξ)`, `η̂ = θ_p(η)` on the points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportReport {
    /// `max_γ |φ̂(γ) − ⟨σ⁰(γ)ξ̂, η̂⟩|`.
    pub residual: f64,
    pub xi_norm: f64,
    pub eta_norm: f64,
    pub xi_hat_norm: f64,
    pub eta_hat_norm: f64,
    /// `|‖ξ̂‖‖η̂‖ − ‖ξ‖‖η‖|`.
    pub norm_defect: f64,
}

pub fn koopman_transport<T: Real>(
    cs: &CouplingSpace<T>,
    xi: &[Complex<T>],
    eta: &[Complex<T>],
) -> Result<TransportReport> {
    let lambda = cs.lambda();
    if xi.len() != lambda.order() || eta.len() != lambda.order() {
        return Err(Error::InvalidParameter("vectors must have length |Λ|".into()));
    }
    let phi = GroupFunction::from_fn(lambda, |s| coefficient(lambda, s, xi, eta));
    let hat = induce(cs, &phi)?;
    let xh = theta(cs, &GroupFunction::new(lambda, xi.to_vec())?)?;
    let eh = theta(cs, &GroupFunction::new(lambda, eta.to_vec())?)?;
    let inner = |f: &dyn Fn(usize) -> Complex<T>, g: &[Complex<T>]| {
        (0..cs.points()).fold(Complex::new(T::zero(), T::zero()), |s, x| {
            s + f(x) * g[x].conj() * c(*cs.weight(x))
        })
    };
    let gamma = cs.gamma();
    let mut residual: f64 = 0.0;
    for g in gamma.elements() {
        let gi = gamma.inv(g);
        let shifted = |x: usize| xh[cs.gamma_act(gi, x)];
        let value = inner(&shifted, &eh);
        residual = residual.max(to_f64(cabs(*hat.get(g) - value)));
    }
    let l2 = |v: &[Complex<T>]| to_f64(v.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt());
    let l2w = |v: &[Complex<T>]| to_f64(inner(&|x| v[x], v).re.sqrt());
    let (xi_norm, eta_norm) = (l2(xi), l2(eta));
    let (xi_hat_norm, eta_hat_norm) = (l2w(&xh), l2w(&eh));
    Ok(TransportReport {
        residual,
        xi_norm,
        eta_norm,
        xi_hat_norm,
        eta_hat_norm,
        norm_defect: (xi_hat_norm * eta_hat_norm - xi_norm * eta_norm).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::coefficient_witness;
    use crate::coupling::{me_example, subgroup_coupling};
    use crate::group::FiniteGroup;
    use crate::linalg::SolveOptions;
    use crate::sample;

    #[test]
    fn koopman_defects_vanish() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        for spec in ["sym:3", "alt:3", "trivial"] {
            let sub = s3.subgroup_from_spec(spec).unwrap();
            let r = koopman_check(&subgroup_coupling::<f64>(&s3, &sub).unwrap()).unwrap();
            assert!(r.passed, "{spec}: {r:?}");
        }
        let r = koopman_check(&me_example::<f64>().unwrap()).unwrap();
        assert!(r.unitarity_defect <= 1e-12 && r.intertwining_defect <= 1e-12);
    }

    #[test]
    fn coefficient_transport_is_exact() {
        let cs = me_example::<f64>().unwrap();
        let mut rng = sample::rng(3);
        let xi: Vec<_> = (0..3).map(|_| sample::gaussian(&mut rng)).collect();
        let eta: Vec<_> = (0..3).map(|_| sample::gaussian(&mut rng)).collect();
        let r = koopman_transport(&cs, &xi, &eta).unwrap();
        assert!(r.residual <= 1e-12 && r.norm_defect <= 1e-12, "{r:?}");
    }

    #[test]
    fn witness_transport_on_s3() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let a3 = s3.subgroup_from_spec("alt:3").unwrap();
        let cs = subgroup_coupling::<f64>(&s3, &a3).unwrap();
        let phi = sample::random_pd_function(&s3, &mut sample::rng(5));
        let opts = SolveOptions::default();
        for d in 2..=4 {
            let w = coefficient_witness(&s3, &phi, d, &opts).unwrap();
            let hat_w = induce_witness(&cs, &phi, &w, d).unwrap();
            let hat = induce(&cs, &phi).unwrap();
            let v = verify_factorization(&hat, &hat_w, cs.gamma(), &TupleSource::Exhaustive, 1e-9)
                .unwrap();
            assert!(v.certified, "d = {d}: residual {}", v.residual);
            assert!(v.bound <= w.bound().unwrap() + 1e-9);
        }
    }

    #[test]
    fn uncertified_input_is_rejected() {
        let z4 = FiniteGroup::cyclic(4).unwrap();
        let sub = z4.subgroup_from_spec("cyclic:2").unwrap();
        let cs = subgroup_coupling::<f64>(&z4, &sub).unwrap();
        let phi = GroupFunction::ones(&z4);
        let w = coefficient_witness(&z4, &phi, 2, &SolveOptions::default()).unwrap();
        let bad = w.perturbed(1, 0, (0, 0), c(0.1));
        assert!(matches!(
            induce_witness(&cs, &phi, &bad, 2),
            Err(Error::UncertifiedWitness(_))
        ));
    }
}
