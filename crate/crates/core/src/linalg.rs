//! Dense complex linear algebra and the two conic engines.
//!
//! `schur_norm` solves the Schur-multiplier SDP
//! `min t : [[X, M], [M*, Y]] ⪰ 0, diag(X), diag(Y) ≤ t` and `trace_min`
//! computes the B-norm of a function on a finite group as a trace-norm
//! minimisation over the regular representation. Both run an ADMM splitting
//! and stop only when a primal certificate (upper end) and a dual certificate
//! (lower end) bracket the optimum within the requested relative tolerance.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Carrier, FiniteGroup, GroupFunction};
use crate::{cabs, real, to_f64, Real};

pub type CMatrix<T> = DMatrix<Complex<T>>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Relative width of the certified bracket at termination.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Only used by randomised cross-checks and searches.
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-7,
            max_iterations: 50_000,
            seed: 0,
        }
    }
}

impl SolveOptions {
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must lie in (0, 1), got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn c<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

pub fn ensure_finite<T: Real>(a: &CMatrix<T>, what: &str) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

pub fn max_abs_entry<T: Real>(a: &CMatrix<T>) -> T {
    a.iter().fold(T::zero(), |m, &z| m.max(cabs(z)))
}

pub fn frobenius<T: Real>(a: &CMatrix<T>) -> T {
    a.iter()
        .fold(T::zero(), |s, z| s + z.re * z.re + z.im * z.im)
        .sqrt()
}

pub fn singular_values<T: Real>(a: &CMatrix<T>) -> DVector<T> {
    if a.is_empty() {
        return DVector::zeros(0);
    }
    a.clone().singular_values()
}

/// Largest singular value.
pub fn operator_norm<T: Real>(a: &CMatrix<T>) -> Result<T> {
    ensure_finite(a, "matrix")?;
    Ok(singular_values(a).iter().fold(T::zero(), |m, &s| m.max(s)))
}

/// Sum of singular values.
pub fn trace_norm<T: Real>(a: &CMatrix<T>) -> Result<T> {
    ensure_finite(a, "matrix")?;
    Ok(singular_values(a).sum())
}

fn hermitian_part<T: Real>(a: &CMatrix<T>, tol: f64) -> Result<CMatrix<T>> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    ensure_finite(a, "matrix")?;
    let adj = a.adjoint();
    let asym = max_abs_entry(&(a - &adj));
    let scale = max_abs_entry(a).max(T::one());
    if to_f64(asym) > tol * to_f64(scale) {
        return Err(Error::NotHermitian {
            asymmetry: to_f64(asym),
        });
    }
    Ok((a + adj) * c(real::<T>(0.5)))
}

/// Eigen-decomposition of a hermitian matrix (symmetrised first).
pub fn eigh<T: Real>(a: &CMatrix<T>) -> Result<(DVector<T>, CMatrix<T>)> {
    let h = hermitian_part(a, 1e-9)?;
    let e = h.symmetric_eigen();
    Ok((e.eigenvalues, e.eigenvectors))
}

/// Whether the smallest eigenvalue is at least `-tol · ‖A‖`.
pub fn is_psd<T: Real>(a: &CMatrix<T>, tol: f64) -> Result<bool> {
    let h = hermitian_part(a, tol.max(1e-9))?;
    if h.is_empty() {
        return Ok(true);
    }
    let ev = h.symmetric_eigenvalues();
    let norm = ev.iter().fold(T::zero(), |m, &l| m.max(l.abs()));
    let min = ev.iter().fold(T::max_value().unwrap(), |m, &l| m.min(l));
    Ok(to_f64(min) >= -tol * to_f64(norm))
}

/// Nearest PSD matrix in Frobenius norm (eigenvalue clipping).
pub fn project_psd<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    let h = (a + a.adjoint()) * c(real::<T>(0.5));
    let e = h.symmetric_eigen();
    let v = &e.eigenvectors;
    let mut scaled = v.clone();
    for (j, &l) in e.eigenvalues.iter().enumerate() {
        let w = c(l.max(T::zero()));
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= w);
    }
    scaled * v.adjoint()
}

/// Euclidean projection onto the probability simplex.
fn project_simplex<T: Real>(v: &[T]) -> Vec<T> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cum = T::zero();
    let mut theta = T::zero();
    for (k, &uk) in u.iter().enumerate() {
        cum += uk;
        let t = (cum - T::one()) / real::<T>((k + 1) as f64);
        if uk - t > T::zero() {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(T::zero())).collect()
}

/// A certified bracket for the Schur-multiplier norm of `M`.
#[derive(Debug, Clone)]
pub struct SchurCertificate<T: Real> {
    pub value: T,
    pub lower: T,
    pub upper: T,
    /// Upper-end certificate: `[[x, M], [M*, y]] ⪰ 0` with diagonals at most `upper`.
    pub x: CMatrix<T>,
    pub y: CMatrix<T>,
    /// Lower-end certificate: unit vectors with `‖D_a M D_b‖₁ = lower`.
    pub a: DVector<T>,
    pub b: DVector<T>,
    pub iterations: usize,
}

impl<T: Real> SchurCertificate<T> {
    /// Re-checks the primal certificate against `m` from scratch.
    pub fn check_upper(&self, m: &CMatrix<T>, tol: f64) -> Result<bool> {
        let (r, s) = m.shape();
        let mut block = CMatrix::<T>::zeros(r + s, r + s);
        block.view_mut((0, 0), (r, r)).copy_from(&self.x);
        block.view_mut((r, r), (s, s)).copy_from(&self.y);
        block.view_mut((0, r), (r, s)).copy_from(m);
        block.view_mut((r, 0), (s, r)).copy_from(&m.adjoint());
        let diag_ok = self
            .x
            .diagonal()
            .iter()
            .chain(self.y.diagonal().iter())
            .all(|z| to_f64(z.re) <= to_f64(self.upper) * (1.0 + tol) + tol);
        Ok(diag_ok && is_psd(&block, tol)?)
    }

    /// Re-evaluates the dual certificate against `m`.
    pub fn check_lower(&self, m: &CMatrix<T>) -> Result<T> {
        schur_dual_value(m, &self.a, &self.b)
    }
}

/// `‖D_a M D_b‖₁` after normalising `a` and `b`; a lower bound on the Schur norm.
pub fn schur_dual_value<T: Real>(m: &CMatrix<T>, a: &DVector<T>, b: &DVector<T>) -> Result<T> {
    let na = a.norm();
    let nb = b.norm();
    if na <= T::zero() || nb <= T::zero() {
        return Ok(T::zero());
    }
    let mut k = m.clone();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            k[(i, j)] *= c(a[i] * b[j] / (na * nb));
        }
    }
    trace_norm(&k)
}

/// Upper bound `min(Σ_j max_i |M_ij|, Σ_i max_j |M_ij|)` from splitting `M` into
/// rank-one columns (or rows).
pub fn splitting_upper_bound<T: Real>(m: &CMatrix<T>) -> T {
    let cols = (0..m.ncols()).fold(T::zero(), |s, j| {
        s + m.column(j).iter().fold(T::zero(), |mx, &z| mx.max(cabs(z)))
    });
    let rows = (0..m.nrows()).fold(T::zero(), |s, i| {
        s + m.row(i).iter().fold(T::zero(), |mx, &z| mx.max(cabs(z)))
    });
    cols.min(rows)
}

fn unit_vector<T: Real>(n: usize, i: usize) -> DVector<T> {
    let mut v = DVector::zeros(n);
    v[i] = T::one();
    v
}

/// Schur-multiplier norm of `m` with primal and dual certificates.
pub fn schur_norm<T: Real>(m: &CMatrix<T>, opts: &SolveOptions) -> Result<SchurCertificate<T>> {
    opts.validate()?;
    ensure_finite(m, "matrix")?;
    let (r, s) = m.shape();
    let scale = max_abs_entry(m);
    if r == 0 || s == 0 || scale <= T::zero() {
        return Ok(SchurCertificate {
            value: T::zero(),
            lower: T::zero(),
            upper: T::zero(),
            x: CMatrix::zeros(r, r),
            y: CMatrix::zeros(s, s),
            a: DVector::zeros(r),
            b: DVector::zeros(s),
            iterations: 0,
        });
    }
    let ms = m * c(T::one() / scale);

    // Lower start: the largest entry.
    let (mut bi, mut bj) = (0, 0);
    for i in 0..r {
        for j in 0..s {
            if cabs(ms[(i, j)]) > cabs(ms[(bi, bj)]) {
                (bi, bj) = (i, j);
            }
        }
    }
    let mut lo = T::one();
    let mut best_a = unit_vector::<T>(r, bi);
    let mut best_b = unit_vector::<T>(s, bj);

    // Upper start: M = M·I (rows) or I·M (columns).
    let row_norm = (0..r)
        .map(|i| ms.row(i).norm())
        .fold(T::zero(), |a, b| a.max(b));
    let col_norm = (0..s)
        .map(|j| ms.column(j).norm())
        .fold(T::zero(), |a, b| a.max(b));
    let (mut hi, mut best_x, mut best_y) = if row_norm <= col_norm {
        let x = &ms * ms.adjoint() * c(T::one() / row_norm);
        (row_norm, x, CMatrix::identity(s, s) * c(row_norm))
    } else {
        let y = ms.adjoint() * &ms * c(T::one() / col_norm);
        (col_norm, CMatrix::identity(r, r) * c(col_norm), y)
    };

    let tol = real::<T>(opts.tolerance);
    let done = |lo: T, hi: T| hi - lo <= tol * hi.max(T::one());
    let finish = |lo: T, hi: T, x: CMatrix<T>, y: CMatrix<T>, a, b, it| SchurCertificate {
        value: hi * scale,
        lower: lo * scale,
        upper: hi * scale,
        x: x * c(scale),
        y: y * c(scale),
        a,
        b,
        iterations: it,
    };
    if done(lo, hi) {
        return Ok(finish(lo, hi, best_x, best_y, best_a, best_b, 0));
    }

    let n = r + s;
    let t0 = operator_norm(&ms)?;
    let mut big = CMatrix::<T>::identity(n, n) * c(t0);
    big.view_mut((0, r), (r, s)).copy_from(&ms);
    big.view_mut((r, 0), (s, r)).copy_from(&ms.adjoint());
    let mut sm = big;
    let mut u = CMatrix::<T>::zeros(n, n);
    let mut rho = T::one();
    let ms_adj = ms.adjoint();

    for it in 1..=opts.max_iterations {
        // Ω-step: off-diagonal blocks pinned to M, diagonal via the prox of max.
        let mut omega = &sm - &u;
        omega.view_mut((0, r), (r, s)).copy_from(&ms);
        omega.view_mut((r, 0), (s, r)).copy_from(&ms_adj);
        let v: Vec<T> = (0..n).map(|i| omega[(i, i)].re).collect();
        let scaled: Vec<T> = v.iter().map(|&x| x * rho).collect();
        let p = project_simplex(&scaled);
        for i in 0..n {
            omega[(i, i)] = c(v[i] - p[i] / rho);
        }

        let prev = sm;
        sm = project_psd(&(&omega + &u));
        u += &omega - &sm;

        if it % 10 == 0 {
            // Primal certificate from the PSD iterate.
            let s12 = sm.view((0, r), (r, s)).into_owned();
            let e = operator_norm(&(&ms - s12))?;
            let dmax = (0..n).fold(T::zero(), |mx, i| mx.max(sm[(i, i)].re));
            let cand = dmax + e;
            if cand < hi {
                hi = cand;
                let mut x = sm.view((0, 0), (r, r)).into_owned();
                let mut y = sm.view((r, r), (s, s)).into_owned();
                for i in 0..r {
                    x[(i, i)] += c(e);
                }
                for j in 0..s {
                    y[(j, j)] += c(e);
                }
                best_x = x;
                best_y = y;
            }
            // Dual certificate from the scaled multiplier W = -ρU.
            let a = DVector::from_iterator(r, (0..r).map(|i| (-u[(i, i)].re).max(T::zero()).sqrt()));
            let b = DVector::from_iterator(
                s,
                (0..s).map(|j| (-u[(r + j, r + j)].re).max(T::zero()).sqrt()),
            );
            let cand = schur_dual_value(&ms, &a, &b)?;
            if cand > lo {
                lo = cand;
                best_a = a;
                best_b = b;
            }
            if done(lo, hi) {
                return Ok(finish(lo, hi, best_x, best_y, best_a, best_b, it));
            }
        }

        if it % 20 == 0 {
            let primal = frobenius(&(&omega - &sm));
            let dual = rho * frobenius(&(&sm - &prev));
            let ten = real::<T>(10.0);
            let two = real::<T>(2.0);
            if primal > ten * dual {
                rho *= two;
                u /= c(two);
            } else if dual > ten * primal {
                rho /= two;
                u *= c(two);
            }
        }
    }
    Err(Error::NoCertificate {
        lower: to_f64(lo * scale),
        upper: to_f64(hi * scale),
        iterations: opts.max_iterations,
    })
}

/// Which Schur-norm engine to run. The stub exists only for fault-injection
/// runs of the acceptance suite: it reports `max |M_ij|` as the norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchurEngine {
    #[default]
    Admm,
    MaxEntryStub,
}

impl SchurEngine {
    pub fn solve<T: Real>(&self, m: &CMatrix<T>, opts: &SolveOptions) -> Result<SchurCertificate<T>> {
        match self {
            SchurEngine::Admm => schur_norm(m, opts),
            SchurEngine::MaxEntryStub => {
                ensure_finite(m, "matrix")?;
                let v = max_abs_entry(m);
                let (r, s) = m.shape();
                Ok(SchurCertificate {
                    value: v,
                    lower: v,
                    upper: v,
                    x: CMatrix::identity(r, r) * c(v),
                    y: CMatrix::identity(s, s) * c(v),
                    a: DVector::zeros(r),
                    b: DVector::zeros(s),
                    iterations: 0,
                })
            }
        }
    }
}

/// Matrix of the left regular representation: `λ(g) δ_j = δ_{gj}`.
pub fn regular_representation<T: Real>(g: &FiniteGroup, x: usize) -> CMatrix<T> {
    let n = g.order();
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        m[(g.mul(x, j), j)] = Complex::new(T::one(), T::zero());
    }
    m
}

/// Result of the trace-norm program for `‖φ‖_B`.
#[derive(Debug, Clone)]
pub struct TraceMinCertificate<T: Real> {
    pub value: T,
    pub lower: T,
    pub upper: T,
    /// Feasible matrix: `Tr(λ(g) T) = φ(g)` for every `g`, with `‖T‖₁ = upper`.
    pub t: CMatrix<T>,
    /// `max_g |Tr(λ(g) T) − φ(g)|`.
    pub residual: T,
    pub iterations: usize,
}

/// `(Tr(λ(g) T))_g = (Σ_j T[j, g·j])_g`.
fn constraint_values<T: Real>(g: &FiniteGroup, t: &CMatrix<T>) -> Vec<Complex<T>> {
    let n = g.order();
    (0..n)
        .map(|x| (0..n).fold(Complex::new(T::zero(), T::zero()), |s, j| s + t[(j, g.mul(x, j))]))
        .collect()
}

/// Adds `Σ_g w_g B_g` where `B_g` has ones at `(j, g·j)`.
fn add_adjoint<T: Real>(g: &FiniteGroup, t: &mut CMatrix<T>, w: &[Complex<T>]) {
    let n = g.order();
    for x in 0..n {
        for j in 0..n {
            t[(j, g.mul(x, j))] += w[x];
        }
    }
}

fn project_affine<T: Real>(g: &FiniteGroup, t: &CMatrix<T>, phi: &[Complex<T>]) -> CMatrix<T> {
    let n = real::<T>(g.order() as f64);
    let vals = constraint_values(g, t);
    let w: Vec<_> = vals
        .iter()
        .zip(phi)
        .map(|(&a, &f)| (f - a) / c(n))
        .collect();
    let mut out = t.clone();
    add_adjoint(g, &mut out, &w);
    out
}

/// Singular-value soft thresholding.
fn shrink<T: Real>(a: &CMatrix<T>, tau: T) -> CMatrix<T> {
    let svd = a.clone().svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut us = u;
    for (k, &s) in svd.singular_values.iter().enumerate() {
        let w = c((s - tau).max(T::zero()));
        us.column_mut(k).iter_mut().for_each(|z| *z *= w);
    }
    us * vt
}

/// Polar factor `U V*` of `a`.
fn polar<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    let svd = a.clone().svd(true, true);
    let eps = svd.singular_values.max() * real::<T>(1e-12);
    let mut u = svd.u.unwrap();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= eps {
            u.column_mut(k).fill(Complex::new(T::zero(), T::zero()));
        }
    }
    u * svd.v_t.unwrap()
}

/// Certified lower bound `|Σ c̄_g φ(g)| / ‖Σ c_g B_g‖` from the projection of `w`
/// onto the span of the constraint matrices.
fn trace_dual_value<T: Real>(g: &FiniteGroup, w: &CMatrix<T>, phi: &[Complex<T>]) -> Result<T> {
    let n = real::<T>(g.order() as f64);
    let coef: Vec<_> = constraint_values(g, w).into_iter().map(|z| z / c(n)).collect();
    let mut b = CMatrix::zeros(g.order(), g.order());
    add_adjoint(g, &mut b, &coef);
    let op = operator_norm(&b)?;
    if op <= T::zero() {
        return Ok(T::zero());
    }
    let pair = coef
        .iter()
        .zip(phi)
        .fold(Complex::new(T::zero(), T::zero()), |s, (&cg, &f)| s + cg.conj() * f);
    Ok(cabs(pair) / op)
}

/// `‖φ‖_{B(G)} = min ‖T‖₁ subject to Tr(λ(g) T) = φ(g)`.
pub fn trace_min<T: Real>(
    g: &FiniteGroup,
    phi: &GroupFunction<T>,
    opts: &SolveOptions,
) -> Result<TraceMinCertificate<T>> {
    trace_min_from(g, phi, &CMatrix::zeros(g.order(), g.order()), opts)
}

/// As [`trace_min`], starting the splitting from `start`.
pub fn trace_min_from<T: Real>(
    g: &FiniteGroup,
    phi: &GroupFunction<T>,
    start: &CMatrix<T>,
    opts: &SolveOptions,
) -> Result<TraceMinCertificate<T>> {
    opts.validate()?;
    if phi.len() != g.order() {
        return Err(Error::CarrierMismatch(phi.carrier().to_string(), g.tag().to_string()));
    }
    phi.ensure_finite()?;
    let n = g.order();
    if start.shape() != (n, n) {
        return Err(Error::InvalidParameter(format!(
            "start matrix must be {n}x{n}"
        )));
    }
    let scale = phi.sup_norm();
    if scale <= T::zero() {
        return Ok(TraceMinCertificate {
            value: T::zero(),
            lower: T::zero(),
            upper: T::zero(),
            t: CMatrix::zeros(n, n),
            residual: T::zero(),
            iterations: 0,
        });
    }
    let f: Vec<Complex<T>> = phi.values().iter().map(|&z| z / c(scale)).collect();
    let tol = real::<T>(opts.tolerance);
    // |φ(e)| ≤ ‖φ‖_∞ ≤ ‖φ‖_B, so the sup-norm is a valid starting lower bound.
    let mut lo = T::one();
    let mut z = project_affine(g, &(start * c(T::one() / scale)), &f);
    let mut hi = trace_norm(&z)?;
    let mut best = z.clone();
    let mut u = CMatrix::<T>::zeros(n, n);
    let mut rho = T::one() / hi.max(T::one());
    let finish = |lo: T, hi: T, best: &CMatrix<T>, it| -> TraceMinCertificate<T> {
        let t = best * c(scale);
        let residual = constraint_values(g, &t)
            .iter()
            .zip(phi.values())
            .fold(T::zero(), |m, (&a, &b)| m.max(cabs(a - b)));
        TraceMinCertificate {
            value: hi * scale,
            lower: lo * scale,
            upper: hi * scale,
            t,
            residual,
            iterations: it,
        }
    };

    for it in 0..=opts.max_iterations {
        if it % 10 == 0 {
            let up = trace_norm(&z)?;
            if up < hi {
                hi = up;
                best = z.clone();
            }
            let mut cand = trace_dual_value(g, &polar(&z), &f)?;
            if it > 0 {
                cand = cand.max(trace_dual_value(g, &(&u * c(-rho)), &f)?);
            }
            lo = lo.max(cand);
            if hi - lo <= tol * hi.max(T::one()) {
                return Ok(finish(lo, hi, &best, it));
            }
        }
        let t = shrink(&(&z - &u), T::one() / rho);
        let prev = z;
        z = project_affine(g, &(&t + &u), &f);
        u += &t - &z;
        if it % 20 == 19 {
            let primal = frobenius(&(&t - &z));
            let dual = rho * frobenius(&(&z - &prev));
            let ten = real::<T>(10.0);
            let two = real::<T>(2.0);
            if primal > ten * dual {
                rho *= two;
                u /= c(two);
            } else if dual > ten * primal {
                rho /= two;
                u *= c(two);
            }
        }
    }
    Err(Error::NoCertificate {
        lower: to_f64(lo * scale),
        upper: to_f64(hi * scale),
        iterations: opts.max_iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cm(rows: usize, cols: usize, v: &[f64]) -> CMatrix<f64> {
        CMatrix::from_row_iterator(rows, cols, v.iter().map(|&x| Complex::new(x, 0.0)))
    }

    #[test]
    fn operator_norm_examples() {
        assert!((operator_norm(&CMatrix::<f64>::identity(5, 5)).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(operator_norm(&CMatrix::<f64>::zeros(3, 3)).unwrap(), 0.0);
        let a = cm(2, 2, &[0.0, 2.0, 0.0, 0.0]);
        assert!((operator_norm(&a).unwrap() - 2.0).abs() < 1e-12);
        let mut bad = a.clone();
        bad[(0, 0)] = Complex::new(f64::NAN, 0.0);
        assert!(matches!(operator_norm(&bad), Err(Error::NonFinite(_))));
    }

    #[test]
    fn psd_examples() {
        assert!(is_psd(&CMatrix::<f64>::identity(3, 3), 1e-10).unwrap());
        assert!(!is_psd(&cm(2, 2, &[1.0, 0.0, 0.0, -1.0]), 1e-10).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = CMatrix::<f64>::from_fn(4, 6, |_, _| Complex::new(rng.random(), rng.random()));
        assert!(is_psd(&(&v * v.adjoint()), 1e-10).unwrap());
        assert!(matches!(
            is_psd(&cm(2, 2, &[1.0, 1.0, 0.0, 1.0]), 1e-10),
            Err(Error::NotHermitian { .. })
        ));
        assert!(matches!(
            is_psd(&cm(1, 2, &[1.0, 1.0]), 1e-10),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.2_f64, 0.2, 0.2]);
        assert!(p.iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-12));
        let p = project_simplex(&[5.0_f64, 0.0, -1.0]);
        assert_eq!(p, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn schur_of_all_ones_is_one() {
        let m = cm(3, 3, &[1.0; 9]);
        let cert = schur_norm(&m, &SolveOptions::default()).unwrap();
        assert!((cert.value - 1.0).abs() < 1e-6);
        assert!(cert.check_upper(&m, 1e-8).unwrap());
    }

    #[test]
    fn schur_certificates_recheck() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = CMatrix::<f64>::from_fn(4, 5, |_, _| Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let cert = schur_norm(&m, &SolveOptions::default()).unwrap();
        assert!(cert.lower <= cert.upper);
        assert!(cert.upper - cert.lower <= 1e-7 * cert.upper.max(1.0) + 1e-15);
        assert!(cert.check_upper(&m, 1e-8).unwrap());
        assert!((cert.check_lower(&m).unwrap() - cert.lower).abs() < 1e-9);
        assert!(cert.value <= splitting_upper_bound(&m) + 1e-9);
    }

    #[test]
    fn schur_reports_bracket_when_starved() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = CMatrix::<f64>::from_fn(6, 6, |_, _| Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let opts = SolveOptions {
            tolerance: 1e-12,
            max_iterations: 5,
            seed: 0,
        };
        match schur_norm(&m, &opts) {
            Err(Error::NoCertificate { lower, upper, .. }) => assert!(lower <= upper),
            other => panic!("expected no certificate, got {other:?}"),
        }
    }

    #[test]
    fn schur_works_in_single_precision() {
        let m = CMatrix::<f32>::from_element(3, 3, Complex::new(2.0, 0.0));
        let cert = schur_norm(&m, &SolveOptions::default().with_tolerance(1e-4)).unwrap();
        assert!((cert.value - 2.0).abs() < 1e-4);
    }

    #[test]
    fn trace_min_recovers_delta_and_constant() {
        let g = FiniteGroup::cyclic(4).unwrap();
        let opts = SolveOptions::default();
        let delta = GroupFunction::<f64>::delta(&g, g.identity());
        let r = trace_min(&g, &delta, &opts).unwrap();
        assert!((r.value - 1.0).abs() < 1e-7);
        assert!(r.residual < 1e-12);
        let ones = GroupFunction::<f64>::ones(&g);
        assert!((trace_min(&g, &ones, &opts).unwrap().value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn trace_min_converges_from_random_start() {
        let g = FiniteGroup::symmetric(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let phi = GroupFunction::<f64>::from_fn(&g, |_| Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let start = CMatrix::<f64>::from_fn(6, 6, |_, _| Complex::new(rng.random::<f64>(), rng.random::<f64>()));
        let opts = SolveOptions::default();
        let direct = trace_min(&g, &phi, &opts).unwrap();
        let walked = trace_min_from(&g, &phi, &start, &opts).unwrap();
        assert!((direct.value - walked.value).abs() < 1e-6 * direct.value.max(1.0));
        assert!(walked.iterations > 0);
        assert!(walked.residual < 1e-9);
    }
}
