use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Carrier, FreeBall, GroupFunction};
use crate::linalg::{c, eigh, frobenius, operator_norm, CMatrix};
use crate::norms::{
    is_pd_function, verify_factorization, FactorizationWitness, TupleSource, Verification,
};
use crate::{real, to_f64, Real, Scalar};

/// `(χ_n, φ_n)` with `χ_n` the indicator of the sphere of radius `n` and
/// `φ_n = Σ_{i ≤ n/2} χ_{n−2i}`.
pub fn radial_multipliers<T: Scalar>(
    ball: &FreeBall,
    n: usize,
) -> Result<(GroupFunction<T>, GroupFunction<T>)> {
    if n > ball.radius() {
        return Err(Error::RadiusExhausted(format!(
            "sphere {n} exceeds radius {}",
            ball.radius()
        )));
    }
    let chi = GroupFunction::indicator(ball, &ball.sphere(n));
    let support: Vec<usize> = (0..=n / 2).flat_map(|i| ball.sphere(n - 2 * i)).collect();
    let phi = GroupFunction::indicator(ball, &support);
    Ok((chi, phi))
}

/// Measured operator norms of a tree witness.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TreeNorms<T> {
    /// `max_x ‖ξ_d(x)‖`.
    pub outer_max: T,
    /// `max_x ‖ξ₁(x)‖`.
    pub inner_max: T,
    /// Range of `‖ξ_i(x)‖` over `2 ≤ i ≤ d − 1`; absent when `d = 2`.
    pub middle_min: Option<T>,
    pub middle_max: Option<T>,
}

/// The tree construction for `φ_n` on a free-group ball, with its witness.
#[derive(Debug, Clone)]
pub struct TreeFamily<T: Real> {
    pub gens: usize,
    pub radius: usize,
    pub n: usize,
    pub d: usize,
    pub acting_radius: usize,
    pub chi: GroupFunction<T>,
    pub phi: GroupFunction<T>,
    pub witness: FactorizationWitness<T>,
    /// Dimensions of `ℋ_1, …, ℋ_{d−1}` (spans of ray vectors, truncated).
    pub norms: TreeNorms<T>,
    /// Largest residual of the linear systems defining the `ξ_i` on spanning vectors.
    pub consistency_residual: T,
    pub verification: Verification<T>,
}

/// Ray vector `P(y) = ⊕_{k=0}^n δ_{γ_y(k)}`, stored as its vertices.
fn ray(ball: &FreeBall, y: usize, n: usize) -> Result<Vec<usize>> {
    (0..=n).map(|k| ball.ray_point(y, k)).collect()
}

/// `⟨P(y), P(y')⟩ = #{k : γ_y(k) = γ_{y'}(k)}`.
fn overlap(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x == y).count()
}

/// Orthonormal coordinates for the span of `{P(y) : y ∈ ys}`: column `j` of the
/// returned matrix holds the coordinates of `P(ys[j])`.
fn span_coordinates<T: Real>(rays: &[Vec<usize>]) -> Result<CMatrix<T>> {
    let k = rays.len();
    let gram = CMatrix::<T>::from_fn(k, k, |i, j| c(real::<T>(overlap(&rays[i], &rays[j]) as f64)));
    let (vals, vecs) = eigh(&gram)?;
    let top = vals.iter().fold(T::zero(), |m, &l| m.max(l));
    let keep: Vec<usize> = (0..k).filter(|&m| vals[m] > top * real::<T>(1e-10)).collect();
    Ok(CMatrix::from_fn(keep.len(), k, |row, y| {
        let m = keep[row];
        vecs[(y, m)].conj() * c(vals[m].sqrt())
    }))
}

/// Solves `X · coords = target` in the least-squares sense and returns `X`
/// together with the residual `‖X · coords − target‖_F`.
fn solve_on_span<T: Real>(coords: &CMatrix<T>, target: &CMatrix<T>) -> Result<(CMatrix<T>, T)> {
    // coords has full row rank, so X = target · coords⁺ with coords⁺ = coords*(coords coords*)⁻¹.
    let gram = coords * coords.adjoint();
    let inv = gram
        .try_inverse()
        .ok_or(Error::WellDefinedness(f64::INFINITY))?;
    let x = target * coords.adjoint() * inv;
    let res = frobenius(&(&x * coords - target));
    Ok((x, res))
}

/// Builds the operator witness for `φ_n` on `FreeBall(k, R)` acting on the ball
/// of radius `r`.
///
/// `ℋ_i` is the span of `{P(y) : |y| ≤ (d − i)·r}`; `ξ_d(x)(1) = P(x)`, the middle
/// maps send `P(y) ↦ P(xy)`, and `ξ₁(x)` sends `P(y)` to `⟨P(xy), Q⟩` with
/// `Q = ⊕_k δ_{a^{n−k}}`. Every `ξ_i` is obtained by solving a linear system on
/// the spanning vectors, whose consistency is checked.
pub fn tree_witness<T: Real>(
    ball: &FreeBall,
    n: usize,
    d: usize,
    acting_radius: usize,
) -> Result<TreeFamily<T>> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("d must be at least 2, got {d}")));
    }
    let r = acting_radius;
    if r * d + n > ball.radius() {
        return Err(Error::BudgetViolated(format!(
            "acting radius {r} · d {d} + n {n} = {} exceeds radius {}",
            r * d + n,
            ball.radius()
        )));
    }
    let (chi, phi) = radial_multipliers::<T>(ball, n)?;
    let acting = ball.ball(r);

    // levels[j] = elements of length ≤ j·r for j = 1..d−1 (ℋ_{d−j}).
    let mut coords: Vec<CMatrix<T>> = Vec::with_capacity(d);
    let mut levels: Vec<Vec<usize>> = Vec::with_capacity(d);
    let mut position: Vec<Vec<Option<usize>>> = Vec::with_capacity(d);
    for j in 0..d {
        let elems = ball.ball(j * r);
        let mut pos = vec![None; ball.size()];
        for (k, &y) in elems.iter().enumerate() {
            pos[y] = Some(k);
        }
        if j >= 1 {
            let rays: Vec<Vec<usize>> = elems.iter().map(|&y| ray(ball, y, n)).collect::<Result<_>>()?;
            coords.push(span_coordinates(&rays)?);
        } else {
            coords.push(CMatrix::zeros(0, 0));
        }
        levels.push(elems);
        position.push(pos);
    }

    let q: Vec<usize> = (0..=n)
        .map(|k| ball.ray_point(ball.identity(), n - k))
        .collect::<Result<_>>()?;
    let mut consistency = T::zero();
    let mut xi: Vec<Vec<CMatrix<T>>> = vec![Vec::new(); d];
    for &x in &acting {
        // ξ_d(x)(1) = P(x): coordinates in level 1.
        let col = position[1][x].expect("acting set inside level 1");
        xi[d - 1].push(coords[1].columns(col, 1).into_owned());

        // Middle maps ξ_i, i = 2..d−1: ℋ_i = level d−i → ℋ_{i−1} = level d−i+1.
        for i in 2..d {
            let j = d - i;
            let src = &coords[j];
            let dst = &coords[j + 1];
            let mut target = CMatrix::zeros(dst.nrows(), levels[j].len());
            for (col, &y) in levels[j].iter().enumerate() {
                let xy = ball.product(x, y).ok_or_else(|| {
                    Error::RadiusExhausted(format!("product of lengths {} and {}", ball.length(x), ball.length(y)))
                })?;
                let k = position[j + 1][xy].expect("product stays in the next level");
                target.set_column(col, &dst.column(k));
            }
            let (m, res) = solve_on_span(src, &target)?;
            consistency = consistency.max(res);
            xi[i - 1].push(m);
        }

        // ξ₁(x): ℋ_1 = level d−1 → ℂ, P(y) ↦ ⟨P(xy), Q⟩.
        let j = d - 1;
        let mut target = CMatrix::zeros(1, levels[j].len());
        for (col, &y) in levels[j].iter().enumerate() {
            let xy = ball.product(x, y).ok_or_else(|| {
                Error::RadiusExhausted(format!("product of lengths {} and {}", ball.length(x), ball.length(y)))
            })?;
            let p = ray(ball, xy, n)?;
            target[(0, col)] = c(real::<T>(overlap(&p, &q) as f64));
        }
        let (m, res) = solve_on_span(&coords[j], &target)?;
        consistency = consistency.max(res);
        xi[0].push(m);
    }
    if to_f64(consistency) > 1e-10 {
        return Err(Error::WellDefinedness(to_f64(consistency)));
    }

    let mut dims = vec![1];
    for i in 1..d {
        dims.push(coords[d - i].nrows());
    }
    dims.push(1);
    let witness = FactorizationWitness::new(ball, dims, acting.clone(), xi)?;

    let mut middle: Option<(T, T)> = None;
    for i in 2..d {
        for &x in &acting {
            let v = operator_norm(witness.xi(i, x).unwrap())?;
            middle = Some(match middle {
                None => (v, v),
                Some((lo, hi)) => (lo.min(v), hi.max(v)),
            });
        }
    }
    let sup = witness.sup_norms()?;
    let norms = TreeNorms {
        outer_max: sup[d - 1],
        inner_max: sup[0],
        middle_min: middle.map(|m| m.0),
        middle_max: middle.map(|m| m.1),
    };
    let tuples = TupleSource::auto(acting.len(), d, 1_000_000, 0);
    let verification = verify_factorization(&phi, &witness, ball, &tuples, 1e-12)?;
    Ok(TreeFamily {
        gens: ball.gens(),
        radius: ball.radius(),
        n,
        d,
        acting_radius: r,
        chi,
        phi,
        witness,
        norms,
        consistency_residual: consistency,
        verification,
    })
}

impl<T: Real> TreeFamily<T> {
    /// Dimensions of the intermediate spaces `ℋ_1, …, ℋ_{d−1}`.
    pub fn space_dims(&self) -> &[usize] {
        let dims = self.witness.dims();
        &dims[1..dims.len() - 1]
    }

    pub fn bound(&self) -> T {
        self.verification.bound
    }
}

/// Certified bound on `‖χ_n‖_{M_d}` from `χ_n = φ_n − φ_{n−2}` and the two tree
/// witnesses (for `n < 2`, `χ_n = φ_n`).
pub fn sphere_bound<T: Real>(ball: &FreeBall, n: usize, d: usize, r: usize) -> Result<T> {
    let top = tree_witness::<T>(ball, n, d, r)?;
    if !top.verification.certified {
        return Err(Error::UncertifiedWitness(to_f64(top.verification.residual)));
    }
    if n < 2 {
        return Ok(top.bound());
    }
    let low = tree_witness::<T>(ball, n - 2, d, r)?;
    if !low.verification.certified {
        return Err(Error::UncertifiedWitness(to_f64(low.verification.residual)));
    }
    Ok(top.bound() + low.bound())
}

/// `ρ_t`, its truncation `φ_{n,t}` and the tail bound on their difference.
#[derive(Debug, Clone)]
pub struct HaagerupFamily<T> {
    pub t: f64,
    pub n: usize,
    pub rho: GroupFunction<T>,
    pub phi: GroupFunction<T>,
    /// `Σ_{k>n} 2k e^{−tk}`.
    pub tail: f64,
    /// `ρ_t` is positive definite on the ball of half the radius.
    pub rho_pd: bool,
}

/// `ρ_t(x) = e^{−t|x|}` and `φ_{n,t} = Σ_{k ≤ n} χ_k e^{−tk}` on the ball.
pub fn haagerup_family<T: Real>(ball: &FreeBall, n: usize, t: f64) -> Result<HaagerupFamily<T>> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    if n > ball.radius() {
        return Err(Error::RadiusExhausted(format!(
            "truncation {n} exceeds radius {}",
            ball.radius()
        )));
    }
    let rho = GroupFunction::from_fn(ball, |x| {
        Complex::new(real::<T>((-t * ball.length(x) as f64).exp()), T::zero())
    });
    let phi = GroupFunction::from_fn(ball, |x| {
        if ball.length(x) <= n {
            *rho.get(x)
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    let rho_pd = is_pd_function(&rho, ball, &ball.ball(ball.radius() / 2))?;
    Ok(HaagerupFamily {
        t,
        n,
        rho,
        phi,
        tail: tail_bound(n, t),
        rho_pd,
    })
}

/// Closed form of `Σ_{k=n+1}^∞ 2k e^{−tk} = 2q^{n+1}((n+1) − nq)/(1−q)²`, `q = e^{−t}`.
pub fn tail_bound(n: usize, t: f64) -> f64 {
    let q = (-t).exp();
    let nf = n as f64;
    2.0 * q.powf(nf + 1.0) * ((nf + 1.0) - nf * q) / (1.0 - q).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_examples() {
        let b = FreeBall::new(2, 3).unwrap();
        let (chi0, phi0) = radial_multipliers::<f64>(&b, 0).unwrap();
        assert_eq!(chi0.support(), vec![0]);
        assert_eq!(phi0.support(), vec![0]);
        let (_, phi3) = radial_multipliers::<f64>(&b, 3).unwrap();
        assert_eq!(phi3.support().len(), 4 + 36);
        assert!(radial_multipliers::<f64>(&b, 4).is_err());
    }

    #[test]
    fn zero_witness_is_trivial() {
        let b = FreeBall::new(2, 3).unwrap();
        let fam = tree_witness::<f64>(&b, 0, 3, 1).unwrap();
        assert!(fam.verification.residual <= 1e-12);
        assert!((fam.bound() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn d2_witness_meets_the_bound() {
        let b = FreeBall::new(2, 4).unwrap();
        let fam = tree_witness::<f64>(&b, 2, 2, 1).unwrap();
        assert!(fam.verification.residual <= 1e-12);
        assert!(fam.bound() <= 3.0 + 1e-9);
        assert!((fam.norms.outer_max - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let b = FreeBall::new(2, 2).unwrap();
        assert!(matches!(
            tree_witness::<f64>(&b, 2, 2, 1),
            Err(Error::BudgetViolated(_))
        ));
    }

    #[test]
    fn tail_matches_partial_sums() {
        for (n, t) in [(10, 0.5), (0, 1.0), (3, 2.0), (20, 0.1)] {
            let direct = crate::oracle::tail_partial_sum(n, t, 10_000);
            assert!((tail_bound(n, t) - direct).abs() <= 1e-10 * direct.max(1.0));
        }
        let closed = 2.0 * (-5.5f64).exp() * (11.0 - 10.0 * (-0.5f64).exp())
            / (1.0 - (-0.5f64).exp()).powi(2);
        assert!((tail_bound(10, 0.5) - closed).abs() < 1e-15);
    }
}
