use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupFunction};
use crate::linalg::{c, regular_representation, trace_min, CMatrix, SolveOptions};
use crate::norms::FactorizationWitness;
use crate::{real, Real};

/// M_d witness for a function on a finite group from its trace-norm certificate.
///
/// With `T = Σ_k s_k a_k b_k*` (singular value decomposition) the constraint
/// `Tr(λ(x)T) = φ(x)` reads `φ(x) = ⟨π(x)U, V⟩` for `π = λ ⊗ I_r`,
/// `U = ⊕ √s_k a_k` and `V = ⊕ √s_k b_k`; then `ξ_d(g)(1) = π(g)U`,
/// `ξ_i(g) = π(g)` and `ξ₁(g)(w) = ⟨π(g)w, V⟩`, with bound `‖U‖‖V‖ = ‖T‖₁`.
pub fn coefficient_witness<T: Real>(
    g: &FiniteGroup,
    phi: &GroupFunction<T>,
    d: usize,
    opts: &SolveOptions,
) -> Result<FactorizationWitness<T>> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("d must be at least 2, got {d}")));
    }
    let cert = trace_min(g, phi, opts)?;
    let n = g.order();
    let svd = cert.t.clone().svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let top = svd.singular_values.max();
    let ranks: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > top * real::<T>(1e-14))
        .collect();
    let rank = ranks.len().max(1);
    let dim = n * rank;
    let mut big_u = CMatrix::<T>::zeros(dim, 1);
    let mut big_v = CMatrix::<T>::zeros(dim, 1);
    for (slot, &k) in ranks.iter().enumerate() {
        let w = c(svd.singular_values[k].sqrt());
        for i in 0..n {
            big_u[(slot * n + i, 0)] = u[(i, k)] * w;
            big_v[(slot * n + i, 0)] = vt[(k, i)].conj() * w;
        }
    }
    let pi: Vec<CMatrix<T>> = g
        .elements()
        .map(|x| {
            let lam = regular_representation::<T>(g, x);
            let mut m = CMatrix::zeros(dim, dim);
            for slot in 0..rank {
                m.view_mut((slot * n, slot * n), (n, n)).copy_from(&lam);
            }
            m
        })
        .collect();
    let v_adj = big_v.adjoint();
    let mut xi = Vec::with_capacity(d);
    xi.push(pi.iter().map(|p| &v_adj * p).collect());
    for _ in 2..d {
        xi.push(pi.clone());
    }
    xi.push(pi.iter().map(|p| p * &big_u).collect());
    let mut dims = vec![1];
    dims.extend(std::iter::repeat_n(dim, d - 1));
    dims.push(1);
    FactorizationWitness::new(g, dims, g.elements().collect(), xi)
}
