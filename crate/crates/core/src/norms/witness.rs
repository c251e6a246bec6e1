use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Carrier, CarrierTag, GroupFunction};
use crate::linalg::{c, operator_norm, CMatrix, SolveOptions};
use crate::sample;
use crate::{cabs, real, Real};

/// Operators `ξ_i(g) : ℋ_i → ℋ_{i-1}` with `φ(g₁⋯g_d) = ξ₁(g₁)⋯ξ_d(g_d)`.
///
/// `dims[0] = dims[d] = 1`, so `ξ₁(g)` is a row and `ξ_d(g)` a column.
#[derive(Debug, Clone)]
pub struct FactorizationWitness<T: Real> {
    d: usize,
    dims: Vec<usize>,
    carrier: CarrierTag,
    acting_set: Vec<usize>,
    position: Vec<Option<usize>>,
    /// `xi[i - 1][k]` is `ξ_i(acting_set[k])`.
    xi: Vec<Vec<CMatrix<T>>>,
}

impl<T: Real> FactorizationWitness<T> {
    pub fn new(
        carrier: &impl Carrier,
        dims: Vec<usize>,
        acting_set: Vec<usize>,
        xi: Vec<Vec<CMatrix<T>>>,
    ) -> Result<Self> {
        let d = dims.len().saturating_sub(1);
        if d < 2 {
            return Err(Error::MalformedWitness(format!("d must be at least 2, got {d}")));
        }
        if dims[0] != 1 || dims[d] != 1 {
            return Err(Error::MalformedWitness("end spaces must be one-dimensional".into()));
        }
        if xi.len() != d {
            return Err(Error::MalformedWitness(format!("expected {d} operator families")));
        }
        let mut position = vec![None; carrier.size()];
        for (k, &g) in acting_set.iter().enumerate() {
            if g >= carrier.size() {
                return Err(Error::MalformedWitness(format!("element {g} outside the carrier")));
            }
            position[g] = Some(k);
        }
        for (i, family) in xi.iter().enumerate() {
            if family.len() != acting_set.len() {
                return Err(Error::MalformedWitness(format!(
                    "ξ_{} has {} operators for {} elements",
                    i + 1,
                    family.len(),
                    acting_set.len()
                )));
            }
            for m in family {
                if m.shape() != (dims[i], dims[i + 1]) {
                    return Err(Error::MalformedWitness(format!(
                        "ξ_{} has shape {:?}, expected {:?}",
                        i + 1,
                        m.shape(),
                        (dims[i], dims[i + 1])
                    )));
                }
                if !m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite(format!("ξ_{}", i + 1)));
                }
            }
        }
        Ok(Self {
            d,
            dims,
            carrier: carrier.tag(),
            acting_set,
            position,
            xi,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn carrier(&self) -> &CarrierTag {
        &self.carrier
    }

    pub fn acting_set(&self) -> &[usize] {
        &self.acting_set
    }

    /// `ξ_i(g)` for `1 ≤ i ≤ d`.
    pub fn xi(&self, i: usize, g: usize) -> Option<&CMatrix<T>> {
        let k = (*self.position.get(g)?)?;
        self.xi.get(i.checked_sub(1)?)?.get(k)
    }

    pub fn xi_mut(&mut self, i: usize, g: usize) -> Option<&mut CMatrix<T>> {
        let k = (*self.position.get(g)?)?;
        self.xi.get_mut(i.checked_sub(1)?)?.get_mut(k)
    }

    /// `sup_g ‖ξ_i(g)‖` for each `i`.
    pub fn sup_norms(&self) -> Result<Vec<T>> {
        self.xi
            .iter()
            .map(|family| {
                family
                    .iter()
                    .try_fold(T::zero(), |m, x| Ok(m.max(operator_norm(x)?)))
            })
            .collect()
    }

    /// `Π_i sup_g ‖ξ_i(g)‖`.
    pub fn bound(&self) -> Result<T> {
        Ok(self.sup_norms()?.into_iter().fold(T::one(), |p, s| p * s))
    }

    /// `ξ₁(g₁)⋯ξ_d(g_d)` as a scalar.
    pub fn evaluate(&self, tuple: &[usize]) -> Result<Complex<T>> {
        if tuple.len() != self.d {
            return Err(Error::InvalidParameter(format!("tuple length must be {}", self.d)));
        }
        let mut row = CMatrix::<T>::from_element(1, 1, c(T::one()));
        for (i, &g) in tuple.iter().enumerate() {
            let x = self.xi(i + 1, g).ok_or_else(|| {
                Error::InvalidParameter(format!("element {g} is not in the acting set"))
            })?;
            row *= x;
        }
        Ok(row[(0, 0)])
    }

    /// Multiplies every `ξ_i` by `factors[i - 1]`.
    pub fn rescale(&mut self, factors: &[T]) {
        for (family, &f) in self.xi.iter_mut().zip(factors) {
            for m in family.iter_mut() {
                *m *= c(f);
            }
        }
    }

    /// A copy with one entry of one operator moved by `delta`.
    pub fn perturbed(&self, i: usize, g: usize, entry: (usize, usize), delta: Complex<T>) -> Self {
        let mut w = self.clone();
        if let Some(m) = w.xi_mut(i, g) {
            m[entry] += delta;
        }
        w
    }
}

/// Which tuples `(g₁, …, g_d)` `verify_factorization` evaluates.
#[derive(Debug, Clone)]
pub enum TupleSource {
    /// Every tuple over the acting set.
    Exhaustive,
    /// Uniformly random tuples over the acting set.
    Sampled { count: usize, seed: u64 },
    Explicit(Vec<Vec<usize>>),
}

impl TupleSource {
    /// Exhaustive up to `limit` tuples, sampled beyond.
    pub fn auto(acting: usize, d: usize, limit: usize, seed: u64) -> Self {
        let total = (acting as f64).powi(d as i32);
        if total <= limit as f64 {
            TupleSource::Exhaustive
        } else {
            TupleSource::Sampled { count: limit, seed }
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Verification<T> {
    /// `max |φ(g₁⋯g_d) − ξ₁(g₁)⋯ξ_d(g_d)|` over the tuples checked.
    pub residual: T,
    /// `Π_i sup_g ‖ξ_i(g)‖`.
    pub bound: T,
    pub tuples: usize,
    /// Whether `residual ≤ tol`, making `bound` a certified upper bound.
    pub certified: bool,
}

/// Evaluates the factorization identity on the chosen tuples.
pub fn verify_factorization<T: Real>(
    phi: &GroupFunction<T>,
    w: &FactorizationWitness<T>,
    carrier: &impl Carrier,
    tuples: &TupleSource,
    tol: f64,
) -> Result<Verification<T>> {
    if *phi.carrier() != carrier.tag() {
        return Err(Error::CarrierMismatch(phi.carrier().to_string(), carrier.tag().to_string()));
    }
    if w.carrier() != phi.carrier() {
        return Err(Error::CarrierMismatch(w.carrier().to_string(), phi.carrier().to_string()));
    }
    let mut residual = T::zero();
    let mut count = 0;
    match tuples {
        TupleSource::Exhaustive => {
            let start = CMatrix::from_element(1, 1, c(T::one()));
            exhaustive(phi, w, carrier, 1, carrier.identity(), &start, &mut residual, &mut count)?;
        }
        TupleSource::Sampled { count: n, seed } => {
            let mut rng = sample::rng(*seed);
            let acting = w.acting_set();
            let mut tuple = vec![0; w.d()];
            for _ in 0..*n {
                for t in tuple.iter_mut() {
                    *t = acting[rng.random_range(0..acting.len())];
                }
                residual = residual.max(tuple_residual(phi, w, carrier, &tuple)?);
                count += 1;
            }
        }
        TupleSource::Explicit(list) => {
            for tuple in list {
                residual = residual.max(tuple_residual(phi, w, carrier, tuple)?);
                count += 1;
            }
        }
    }
    Ok(Verification {
        residual,
        bound: w.bound()?,
        tuples: count,
        certified: crate::to_f64(residual) <= tol,
    })
}

fn tuple_residual<T: Real>(
    phi: &GroupFunction<T>,
    w: &FactorizationWitness<T>,
    carrier: &impl Carrier,
    tuple: &[usize],
) -> Result<T> {
    let g = carrier
        .product_of(tuple)
        .ok_or_else(|| Error::UndefinedProduct(format!("{tuple:?}")))?;
    Ok(cabs(*phi.get(g) - w.evaluate(tuple)?))
}

#[allow(clippy::too_many_arguments)]
fn exhaustive<T: Real>(
    phi: &GroupFunction<T>,
    w: &FactorizationWitness<T>,
    carrier: &impl Carrier,
    level: usize,
    prefix: usize,
    row: &CMatrix<T>,
    residual: &mut T,
    count: &mut usize,
) -> Result<()> {
    for &g in w.acting_set() {
        let next = carrier.product(prefix, g).ok_or_else(|| {
            Error::UndefinedProduct(format!(
                "{} · {}",
                carrier.element_name(prefix),
                carrier.element_name(g)
            ))
        })?;
        let r = row * w.xi(level, g).expect("acting element");
        if level == w.d() {
            *residual = (*residual).max(cabs(*phi.get(next) - r[(0, 0)]));
            *count += 1;
        } else {
            exhaustive(phi, w, carrier, level + 1, next, &r, residual, count)?;
        }
    }
    Ok(())
}

/// Outcome of the heuristic factorization search.
#[derive(Debug, Clone)]
pub struct SearchResult<T: Real> {
    pub witness: FactorizationWitness<T>,
    /// Residual over all tuples of the acting set (not yet a certificate).
    pub residual: T,
    pub bound: T,
    pub restarts: usize,
}

/// Alternating least squares over the `ξ_i` with sup-norm balancing.
///
/// Each sweep refits one family at a time (the unknowns split by group element,
/// so each is a small least-squares problem), then rescales the families so
/// their sup-norms agree. Only [`verify_factorization`] can certify the result.
pub fn search_factorization<T: Real>(
    phi: &GroupFunction<T>,
    carrier: &impl Carrier,
    d: usize,
    dims: &[usize],
    restarts: usize,
    opts: &SolveOptions,
) -> Result<SearchResult<T>> {
    if dims.len() != d + 1 || dims[0] != 1 || dims[d] != 1 {
        return Err(Error::MalformedWitness(format!(
            "dims must have length {} with unit ends",
            d + 1
        )));
    }
    let acting = carrier.tuple_index_set(d);
    let tuples = all_tuples(&acting, d);
    let targets: Vec<Complex<T>> = tuples
        .iter()
        .map(|t| {
            carrier
                .product_of(t)
                .map(|g| *phi.get(g))
                .ok_or_else(|| Error::UndefinedProduct(format!("{t:?}")))
        })
        .collect::<Result<_>>()?;
    let mut rng = sample::rng(opts.seed);
    let sweeps = opts.max_iterations.min(400);
    let mut best: Option<SearchResult<T>> = None;
    for _ in 0..restarts.max(1) {
        let xi: Vec<Vec<CMatrix<T>>> = (0..d)
            .map(|i| {
                let s = real::<T>(1.0 / ((dims[i] * dims[i + 1]) as f64).sqrt());
                acting
                    .iter()
                    .map(|_| {
                        CMatrix::from_fn(dims[i], dims[i + 1], |_, _| {
                            let z = sample::gaussian(&mut rng);
                            Complex::new(real::<T>(z.re) * s, real::<T>(z.im) * s)
                        })
                    })
                    .collect()
            })
            .collect();
        let mut w = FactorizationWitness::new(carrier, dims.to_vec(), acting.clone(), xi)?;
        let mut res = max_residual(&w, &tuples, &targets)?;
        for _ in 0..sweeps {
            for i in 1..=d {
                refit(&mut w, i, &tuples, &targets)?;
            }
            balance(&mut w)?;
            res = max_residual(&w, &tuples, &targets)?;
            if crate::to_f64(res) <= 1e-13 {
                break;
            }
        }
        let bound = w.bound()?;
        let better = match &best {
            None => true,
            Some(b) => res < b.residual,
        };
        if better {
            best = Some(SearchResult {
                witness: w,
                residual: res,
                bound,
                restarts: restarts.max(1),
            });
        }
    }
    Ok(best.expect("at least one restart"))
}

fn all_tuples(acting: &[usize], d: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|t| {
                acting.iter().map(move |&g| {
                    let mut v = t.clone();
                    v.push(g);
                    v
                })
            })
            .collect();
    }
    out
}

fn max_residual<T: Real>(
    w: &FactorizationWitness<T>,
    tuples: &[Vec<usize>],
    targets: &[Complex<T>],
) -> Result<T> {
    tuples.iter().zip(targets).try_fold(T::zero(), |m, (t, &f)| {
        Ok(m.max(cabs(f - w.evaluate(t)?)))
    })
}

/// Least-squares refit of `ξ_i(g)` for every `g`, others fixed.
fn refit<T: Real>(
    w: &mut FactorizationWitness<T>,
    i: usize,
    tuples: &[Vec<usize>],
    targets: &[Complex<T>],
) -> Result<()> {
    let (p, q) = (w.dims()[i - 1], w.dims()[i]);
    let acting = w.acting_set().to_vec();
    for &g in &acting {
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (t, &f) in tuples.iter().zip(targets) {
            if t[i - 1] != g {
                continue;
            }
            let mut left = CMatrix::<T>::from_element(1, 1, c(T::one()));
            for (k, &h) in t[..i - 1].iter().enumerate() {
                left *= w.xi(k + 1, h).unwrap();
            }
            let mut right = CMatrix::<T>::from_element(1, 1, c(T::one()));
            for (k, &h) in t[i..].iter().enumerate().rev() {
                right = w.xi(i + 1 + k, h).unwrap() * right;
            }
            // L X R = Σ_{a,b} L_a R_b X_ab.
            let row: Vec<Complex<T>> = (0..p)
                .flat_map(|a| (0..q).map(move |b| (a, b)))
                .map(|(a, b)| left[(0, a)] * right[(b, 0)])
                .collect();
            rows.push(row);
            rhs.push(f);
        }
        if rows.is_empty() {
            continue;
        }
        let a = CMatrix::from_fn(rows.len(), p * q, |r, k| rows[r][k]);
        let b = CMatrix::from_fn(rhs.len(), 1, |r, _| rhs[r]);
        let svd = a.svd(true, true);
        let eps = real::<T>(1e-12) * svd.singular_values.max().max(T::one());
        let x = svd
            .solve(&b, eps)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let target = w.xi_mut(i, g).unwrap();
        for a_ in 0..p {
            for b_ in 0..q {
                target[(a_, b_)] = x[(a_ * q + b_, 0)];
            }
        }
    }
    Ok(())
}

/// Rescales families so all sup-norms equal their geometric mean.
fn balance<T: Real>(w: &mut FactorizationWitness<T>) -> Result<()> {
    let norms = w.sup_norms()?;
    if norms.iter().any(|&s| s <= T::zero()) {
        return Ok(());
    }
    let d = real::<T>(norms.len() as f64);
    let mean = norms.iter().fold(T::zero(), |s, &x| s + x.ln()) / d;
    let mean = mean.exp();
    let factors: Vec<T> = norms.iter().map(|&s| mean / s).collect();
    w.rescale(&factors);
    Ok(())
}
