//! Multiplier norms: M₂ through the Schur SDP, B and A norms through trace
//! minimisation, M_d sandwiches, factorization witnesses, the L¹ pairing and
//! positive-definiteness tests.

mod witness;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Carrier, FiniteGroup, GroupFunction};
use crate::linalg::{self, c, CMatrix, SchurEngine, SolveOptions};
use crate::{cabs, real, sample, to_f64, Real, Scalar};

pub use witness::{
    search_factorization, verify_factorization, FactorizationWitness, SearchResult, TupleSource,
    Verification,
};

/// Where a reported bound comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// The zero function; no solver was run.
    ZeroFunction,
    /// Dual certificate of the Schur SDP (`‖D_a M D_b‖₁`).
    SchurDual,
    /// Block-PSD certificate of the Schur SDP.
    SchurPrimal,
    /// Dual certificate of the trace-norm program.
    TraceDual,
    /// Feasible matrix of the trace-norm program.
    TracePrimal,
    /// A factorization witness that passed verification.
    Witness(String),
    /// Output of an engine that is not certified (fault injection only).
    Uncertified(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bound<T> {
    pub value: T,
    pub provenance: Provenance,
}

/// A certified interval for a multiplier norm. An absent upper end means no
/// certificate was available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport<T> {
    pub lower: Bound<T>,
    pub upper: Option<Bound<T>>,
    pub notes: String,
}

impl<T: Real> NormReport<T> {
    fn zero(notes: &str) -> Self {
        Self {
            lower: Bound {
                value: T::zero(),
                provenance: Provenance::ZeroFunction,
            },
            upper: Some(Bound {
                value: T::zero(),
                provenance: Provenance::ZeroFunction,
            }),
            notes: notes.to_string(),
        }
    }

    pub fn upper_value(&self) -> Option<T> {
        self.upper.as_ref().map(|b| b.value)
    }

    /// `lower ≤ upper + 2·tol`.
    pub fn is_consistent(&self, tol: f64) -> bool {
        match &self.upper {
            None => true,
            Some(u) => to_f64(self.lower.value) <= to_f64(u.value) + 2.0 * tol * to_f64(u.value).max(1.0),
        }
    }
}

/// `[φ(x·y)]_{x,y ∈ S}` over the carrier's Schur index set.
pub fn schur_matrix<T: Real>(phi: &GroupFunction<T>, carrier: &impl Carrier) -> Result<CMatrix<T>> {
    check_carrier(phi, carrier)?;
    let idx = carrier.schur_index_set();
    let mut m = CMatrix::zeros(idx.len(), idx.len());
    for (i, &x) in idx.iter().enumerate() {
        for (j, &y) in idx.iter().enumerate() {
            let xy = carrier.product(x, y).ok_or_else(|| {
                Error::UndefinedProduct(format!(
                    "{} · {}",
                    carrier.element_name(x),
                    carrier.element_name(y)
                ))
            })?;
            m[(i, j)] = *phi.get(xy);
        }
    }
    Ok(m)
}

fn check_carrier<T: Scalar>(phi: &GroupFunction<T>, carrier: &impl Carrier) -> Result<()> {
    if *phi.carrier() != carrier.tag() {
        return Err(Error::CarrierMismatch(
            phi.carrier().to_string(),
            carrier.tag().to_string(),
        ));
    }
    Ok(())
}

/// `‖φ‖_{M₂}` (Herz–Schur norm). Exact bracket on finite groups; on truncated
/// carriers only the lower end, from the Schur norm on the half-radius ball.
pub fn m2_norm<T: Real>(
    phi: &GroupFunction<T>,
    carrier: &impl Carrier,
    opts: &SolveOptions,
) -> Result<NormReport<T>> {
    m2_norm_with(phi, carrier, opts, SchurEngine::Admm)
}

pub fn m2_norm_with<T: Real>(
    phi: &GroupFunction<T>,
    carrier: &impl Carrier,
    opts: &SolveOptions,
    engine: SchurEngine,
) -> Result<NormReport<T>> {
    check_carrier(phi, carrier)?;
    phi.ensure_finite()?;
    if phi.is_zero() {
        return Ok(NormReport::zero("zero function"));
    }
    let m = schur_matrix(phi, carrier)?;
    let cert = engine.solve(&m, opts)?;
    let (lower_prov, upper_prov) = match engine {
        SchurEngine::Admm => (Provenance::SchurDual, Provenance::SchurPrimal),
        SchurEngine::MaxEntryStub => (
            Provenance::Uncertified("max-entry stub".into()),
            Provenance::Uncertified("max-entry stub".into()),
        ),
    };
    let lower = Bound {
        value: cert.lower,
        provenance: lower_prov,
    };
    if carrier.is_total() {
        Ok(NormReport {
            lower,
            upper: Some(Bound {
                value: cert.upper,
                provenance: upper_prov,
            }),
            notes: format!("schur norm on all {} elements, {} iterations", m.nrows(), cert.iterations),
        })
    } else {
        Ok(NormReport {
            lower,
            upper: None,
            notes: format!(
                "restriction to a {}-element index ball, {} iterations",
                m.nrows(),
                cert.iterations
            ),
        })
    }
}

/// `‖φ‖_{B(G)}`.
pub fn b_norm<T: Real>(phi: &GroupFunction<T>, g: &FiniteGroup, opts: &SolveOptions) -> Result<T> {
    Ok(b_norm_certificate(phi, g, opts)?.value)
}

pub fn b_norm_certificate<T: Real>(
    phi: &GroupFunction<T>,
    g: &FiniteGroup,
    opts: &SolveOptions,
) -> Result<linalg::TraceMinCertificate<T>> {
    check_carrier(phi, g)?;
    linalg::trace_min(g, phi, opts)
}

/// A-norm value together with a realization `φ(x) = ⟨λ(x)u, v⟩`.
#[derive(Debug, Clone)]
pub struct ARealization<T: Real> {
    /// `‖φ‖_A`, equal to the certified B-norm.
    pub value: T,
    pub u: Vec<Complex<T>>,
    pub v: Vec<Complex<T>>,
    /// `max_x |φ(x) − ⟨λ(x)u, v⟩|`.
    pub residual: T,
    /// Best `‖u‖‖v‖` found by the nonconvex search (seeded and random starts).
    pub search_value: T,
}

/// `⟨λ(x)u, v⟩ = Σ_j u_j · conj(v_{xj})`.
pub fn coefficient<T: Real>(g: &FiniteGroup, x: usize, u: &[Complex<T>], v: &[Complex<T>]) -> Complex<T> {
    g.elements()
        .fold(Complex::new(T::zero(), T::zero()), |s, j| s + u[j] * v[g.mul(x, j)].conj())
}

fn vnorm<T: Real>(u: &[Complex<T>]) -> T {
    u.iter().fold(T::zero(), |s, z| s + z.re * z.re + z.im * z.im).sqrt()
}

/// `‖φ‖_{A(G)}`: equals the B-norm on a finite group, and is cross-checked by a
/// direct search over realizations `φ = ⟨λ(·)u, v⟩` minimising `‖u‖‖v‖`.
///
/// The seeded realization comes from the trace-norm certificate `T`: after
/// averaging `T` into the group algebra, `T = W|T|` with `R = |T|^{1/2}` gives
type VectorPair<T> = (Vec<Complex<T>>, Vec<Complex<T>>);

/// `u = √|G| W R δ_e`, `v = √|G| R δ_e` and `‖u‖‖v‖ = ‖T‖₁`.
pub fn a_norm<T: Real>(
    phi: &GroupFunction<T>,
    g: &FiniteGroup,
    opts: &SolveOptions,
) -> Result<ARealization<T>> {
    let cert = b_norm_certificate(phi, g, opts)?;
    let n = g.order();
    if cert.value <= T::zero() {
        let zero = vec![Complex::new(T::zero(), T::zero()); n];
        return Ok(ARealization {
            value: T::zero(),
            u: zero.clone(),
            v: zero,
            residual: T::zero(),
            search_value: T::zero(),
        });
    }
    let (u, v) = standard_realization(g, phi)?;
    let residual = realization_residual(g, phi, &u, &v);
    let seeded = vnorm(&u) * vnorm(&v);
    let (u, v) = balance_pair(u, v);
    let (su, sv) = minimise_realization(g, phi, u.clone(), v.clone(), 200);
    let mut search = vnorm(&su) * vnorm(&sv);
    let mut rng = sample::rng(opts.seed);
    for _ in 0..3 {
        let ru: Vec<Complex<T>> = (0..n)
            .map(|_| {
                let z = sample::gaussian(&mut rng);
                Complex::new(real(z.re), real(z.im))
            })
            .collect();
        if let Some(rv) = min_norm_partner(g, phi, &ru) {
            let (ru, rv) = minimise_realization(g, phi, ru, rv, 200);
            if realization_residual(g, phi, &ru, &rv) <= real::<T>(1e-8) * phi.sup_norm() {
                search = search.min(vnorm(&ru) * vnorm(&rv));
            }
        }
    }
    let value = cert.value;
    let rel = |a: T| to_f64(a) / to_f64(value);
    if rel(seeded) > 1.0 + 1e-4 || rel(search) < 1.0 - 1e-4 {
        return Err(Error::Inconsistent {
            what: "a-norm realization search and trace-norm certificate".into(),
            a: to_f64(search.min(seeded)),
            b: to_f64(value),
        });
    }
    if to_f64(residual) > 1e-8 * to_f64(phi.sup_norm()).max(1.0) {
        return Err(Error::Inconsistent {
            what: "standard realization residual".into(),
            a: to_f64(residual),
            b: 0.0,
        });
    }
    Ok(ARealization {
        value,
        u,
        v,
        residual,
        search_value: search,
    })
}

pub fn realization_residual<T: Real>(
    g: &FiniteGroup,
    phi: &GroupFunction<T>,
    u: &[Complex<T>],
    v: &[Complex<T>],
) -> T {
    g.elements()
        .fold(T::zero(), |m, x| m.max(cabs(*phi.get(x) - coefficient(g, x, u, v))))
}

/// `u = √|G| W R δ_e`, `v = √|G| R δ_e` from the group-algebra element
/// `Σ_x φ(x) λ(x)* / |G|`, which is the averaged trace-norm certificate.
pub fn standard_realization<T: Real>(
    g: &FiniteGroup,
    phi: &GroupFunction<T>,
) -> Result<VectorPair<T>> {
    let n = g.order();
    let mut t = CMatrix::<T>::zeros(n, n);
    let scale = c(T::one() / real::<T>(n as f64));
    // Tr(λ(x) λ(y)*) = n·[x = y], so T = Σ_y φ(y) λ(y)* / n meets the constraints;
    // λ(y)* has ones at (j, y·j).
    for y in g.elements() {
        let f = *phi.get(y) * scale;
        for j in 0..n {
            t[(j, g.mul(y, j))] += f;
        }
    }
    let svd = t.svd(true, true);
    let (su, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let vm = vt.adjoint();
    // |T| = V Σ V*, R = V Σ^{1/2} V*, W = U V*.
    let mut vs = vm.clone();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        let w = c(s.sqrt());
        vs.column_mut(k).iter_mut().for_each(|z| *z *= w);
    }
    let r = &vs * vm.adjoint();
    let w = su * vm.adjoint();
    let root = c(real::<T>((n as f64).sqrt()));
    let e = g.identity();
    let rd = r.column(e).into_owned() * root;
    let ud = &w * &rd;
    Ok((ud.iter().copied().collect(), rd.iter().copied().collect()))
}

fn balance_pair<T: Real>(u: Vec<Complex<T>>, v: Vec<Complex<T>>) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
    let (nu, nv) = (vnorm(&u), vnorm(&v));
    if nu <= T::zero() || nv <= T::zero() {
        return (u, v);
    }
    let f = (nv / nu).sqrt();
    (
        u.into_iter().map(|z| z * c(f)).collect(),
        v.into_iter().map(|z| z / c(f)).collect(),
    )
}

/// Minimum-norm `v` with `⟨λ(x)u, v⟩ = φ(x)` for all `x`, if one exists.
fn min_norm_partner<T: Real>(
    g: &FiniteGroup,
    phi: &GroupFunction<T>,
    u: &[Complex<T>],
) -> Option<Vec<Complex<T>>> {
    // φ(x) = Σ_k u_{x⁻¹k} conj(v_k): linear in w = conj(v).
    let n = g.order();
    let a = CMatrix::from_fn(n, n, |x, k| u[g.mul(g.inv(x), k)]);
    let b = CMatrix::from_fn(n, 1, |x, _| *phi.get(x));
    let svd = a.svd(true, true);
    let eps = svd.singular_values.max() * real::<T>(1e-10);
    let w = svd.solve(&b, eps).ok()?;
    Some(w.iter().map(|z| z.conj()).collect())
}

/// Min-norm partner for `u` given `v`, by symmetry `⟨λ(x)u, v⟩ = conj⟨λ(x⁻¹)v, u⟩`.
fn min_norm_left<T: Real>(
    g: &FiniteGroup,
    phi: &GroupFunction<T>,
    v: &[Complex<T>],
) -> Option<Vec<Complex<T>>> {
    let flipped = GroupFunction::from_fn(g, |x| phi.get(g.inv(x)).conj());
    min_norm_partner(g, &flipped, v)
}

/// Alternating minimum-norm least squares on `(u, v)` with rebalancing; never
/// increases `‖u‖‖v‖` on feasible iterates.
fn minimise_realization<T: Real>(
    g: &FiniteGroup,
    phi: &GroupFunction<T>,
    mut u: Vec<Complex<T>>,
    mut v: Vec<Complex<T>>,
    sweeps: usize,
) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
    let mut last = vnorm(&u) * vnorm(&v);
    for _ in 0..sweeps {
        if let Some(nv) = min_norm_partner(g, phi, &u) {
            v = nv;
        }
        (u, v) = balance_pair(u, v);
        if let Some(nu) = min_norm_left(g, phi, &v) {
            u = nu;
        }
        (u, v) = balance_pair(u, v);
        let now = vnorm(&u) * vnorm(&v);
        if last - now <= real::<T>(1e-14) * last.max(T::one()) {
            break;
        }
        last = now;
    }
    (u, v)
}

/// Interval for `‖φ‖_{M_d}`: the M₂ lower bound against the best verified
/// witness bound (the coefficient witness on finite groups, plus any supplied).
pub fn md_sandwich<T: Real>(
    phi: &GroupFunction<T>,
    d: usize,
    carrier: &impl Carrier,
    witnesses: &[&FactorizationWitness<T>],
    opts: &SolveOptions,
) -> Result<NormReport<T>> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("d must be at least 2, got {d}")));
    }
    check_carrier(phi, carrier)?;
    if phi.is_zero() {
        return Ok(NormReport::zero("zero function"));
    }
    let m2 = m2_norm(phi, carrier, opts)?;
    let mut upper: Option<Bound<T>> = None;
    let mut consider = |value: T, provenance: Provenance| {
        if upper.as_ref().is_none_or(|u| value < u.value) {
            upper = Some(Bound { value, provenance });
        }
    };
    if let Some(g) = carrier.as_finite() {
        let w = crate::constructions::coefficient_witness(g, phi, d, opts)?;
        let tuples = TupleSource::auto(g.order(), d, 200_000, opts.seed);
        let check = verify_factorization(phi, &w, carrier, &tuples, 1e-9)?;
        if check.certified {
            consider(check.bound, Provenance::Witness("coefficient".into()));
        }
    }
    for (k, w) in witnesses.iter().enumerate() {
        if w.d() != d {
            continue;
        }
        let tuples = TupleSource::auto(w.acting_set().len(), d, 200_000, opts.seed);
        let check = verify_factorization(phi, w, carrier, &tuples, 1e-9)?;
        if check.certified {
            consider(check.bound, Provenance::Witness(format!("supplied #{k}")));
        }
    }
    let notes = if carrier.is_total() {
        format!("d = {d}; lower from the Schur norm on the whole group")
    } else {
        format!("d = {d}; lower from the Schur norm restricted to the index ball")
    };
    let report = NormReport {
        lower: m2.lower,
        upper,
        notes,
    };
    if !report.is_consistent(opts.tolerance) {
        return Err(Error::Inconsistent {
            what: "M_d sandwich ends".into(),
            a: to_f64(report.lower.value),
            b: to_f64(report.upper_value().unwrap_or(T::zero())),
        });
    }
    Ok(report)
}

/// `⟨φ, ψ⟩ = Σ_x ψ(x) φ(x)`.
pub fn pairing<T: Scalar>(phi: &GroupFunction<T>, psi: &GroupFunction<T>) -> Result<Complex<T>> {
    phi.ensure_same_carrier(psi)?;
    Ok(phi
        .values()
        .iter()
        .zip(psi.values())
        .fold(Complex::new(T::zero(), T::zero()), |s, (a, b)| {
            s + a.clone() * b.clone()
        }))
}

/// Whether `[φ(y⁻¹x)]_{x,y ∈ S}` is positive semidefinite (tolerance `1e-10`
/// relative to its norm).
pub fn is_pd_function<T: Real>(
    phi: &GroupFunction<T>,
    carrier: &impl Carrier,
    subset: &[usize],
) -> Result<bool> {
    is_pd_function_tol(phi, carrier, subset, 1e-10)
}

pub fn is_pd_function_tol<T: Real>(
    phi: &GroupFunction<T>,
    carrier: &impl Carrier,
    subset: &[usize],
    tol: f64,
) -> Result<bool> {
    check_carrier(phi, carrier)?;
    let k = subset.len();
    let mut m = CMatrix::zeros(k, k);
    for (i, &x) in subset.iter().enumerate() {
        for (j, &y) in subset.iter().enumerate() {
            let z = carrier.product(carrier.inverse(y), x).ok_or_else(|| {
                Error::UndefinedProduct(format!(
                    "{}⁻¹ · {}",
                    carrier.element_name(y),
                    carrier.element_name(x)
                ))
            })?;
            m[(i, j)] = *phi.get(z);
        }
    }
    linalg::is_psd(&m, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FreeBall;

    #[test]
    fn m2_trivial_values() {
        let opts = SolveOptions::default();
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let ones = GroupFunction::<f64>::ones(&s3);
        let r = m2_norm(&ones, &s3, &opts).unwrap();
        assert!((r.lower.value - 1.0).abs() < 1e-6);
        assert!((r.upper_value().unwrap() - 1.0).abs() < 1e-6);
        let z4 = FiniteGroup::cyclic(4).unwrap();
        let delta = GroupFunction::<f64>::delta(&z4, 0);
        assert!((m2_norm(&delta, &z4, &opts).unwrap().lower.value - 1.0).abs() < 1e-6);
        let zero = GroupFunction::<f64>::zeros(&z4);
        let r = m2_norm(&zero, &z4, &opts).unwrap();
        assert_eq!(r.lower.provenance, Provenance::ZeroFunction);
        assert_eq!(r.upper_value(), Some(0.0));
    }

    #[test]
    fn m2_on_partial_carrier_has_no_upper() {
        let ball = FreeBall::new(2, 2).unwrap();
        let chi1 = GroupFunction::<f64>::indicator(&ball, &ball.sphere(1));
        let r = m2_norm(&chi1, &ball, &SolveOptions::default()).unwrap();
        assert!(r.upper.is_none());
        assert!(r.lower.value >= 1.0 - 1e-9);
    }

    #[test]
    fn pairing_examples() {
        let g = FiniteGroup::cyclic(5).unwrap();
        let ones = GroupFunction::<f64>::ones(&g);
        let d0 = GroupFunction::<f64>::delta(&g, 0);
        let d1 = GroupFunction::<f64>::delta(&g, 1);
        assert_eq!(pairing(&ones, &d0).unwrap(), Complex::new(1.0, 0.0));
        assert_eq!(pairing(&d0, &d1).unwrap(), Complex::new(0.0, 0.0));
        let h = FiniteGroup::cyclic(4).unwrap();
        assert!(pairing(&ones, &GroupFunction::<f64>::ones(&h)).is_err());
    }

    #[test]
    fn a_norm_examples() {
        let opts = SolveOptions::default();
        let z4 = FiniteGroup::cyclic(4).unwrap();
        let r = a_norm(&GroupFunction::<f64>::delta(&z4, 0), &z4, &opts).unwrap();
        assert!((r.value - 1.0).abs() < 1e-7);
        assert!((r.u[0].norm() - 1.0).abs() < 1e-9 && (r.v[0].norm() - 1.0).abs() < 1e-9);
        let z3 = FiniteGroup::cyclic(3).unwrap();
        let r = a_norm(&GroupFunction::<f64>::ones(&z3), &z3, &opts).unwrap();
        assert!((r.value - 1.0).abs() < 1e-7);
        for z in r.u.iter().chain(&r.v) {
            assert!((z.norm() - 1.0 / 3f64.sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn pd_examples() {
        let ball = FreeBall::new(2, 3).unwrap();
        let ones = GroupFunction::<f64>::ones(&ball);
        assert!(is_pd_function(&ones, &ball, &ball.ball(1)).unwrap());
        let delta = GroupFunction::<f64>::delta(&ball, 0);
        assert!(is_pd_function(&delta, &ball, &ball.ball(1)).unwrap());
        let chi1 = GroupFunction::<f64>::indicator(&ball, &ball.sphere(1));
        assert!(!is_pd_function(&chi1, &ball, &ball.ball(1)).unwrap());
    }
}
