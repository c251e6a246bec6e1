use num_complex::Complex;

use super::space::{CouplingSpace, CouplingSpec};
use crate::error::{Error, Result};
use crate::group::{Carrier, FiniteGroup, GroupFunction, Subgroup};
use crate::Scalar;

fn expect_carrier<T: Scalar>(f: &GroupFunction<T>, g: &FiniteGroup) -> Result<()> {
    if *f.carrier() != g.tag() {
        return Err(Error::CarrierMismatch(f.carrier().to_string(), g.tag().to_string()));
    }
    Ok(())
}

/// `θ_p(f) = Σ_s f(s) σ_{s⁻¹}(p)` as a function on the points.
pub fn theta<T: Scalar>(cs: &CouplingSpace<T>, f: &GroupFunction<T>) -> Result<Vec<Complex<T>>> {
    expect_carrier(f, cs.lambda())?;
    Ok((0..cs.points())
        .map(|x| f.get(cs.lambda_label(x)).clone())
        .collect())
}

/// `φ̂(γ) = Tr(σ_γ(p) θ_p(φ))`, a function on Γ.
pub fn induce<T: Scalar>(cs: &CouplingSpace<T>, phi: &GroupFunction<T>) -> Result<GroupFunction<T>> {
    let th = theta(cs, phi)?;
    Ok(GroupFunction::from_fn(cs.gamma(), |g| {
        cs.p().iter().fold(Complex::new(T::zero(), T::zero()), |s, &y| {
            let x = cs.gamma_act(g, y);
            s + th[x].clone() * cs.weight(x).clone()
        })
    }))
}

/// `g(s) = Σ_γ f(γ) Tr(σ_γ(p) σ_{s⁻¹}(p))`.
///
/// The result lives on Λ, so that `⟨induce(φ), f⟩ = ⟨φ, induce_dual(f)⟩`.
pub fn induce_dual<T: Scalar>(cs: &CouplingSpace<T>, f: &GroupFunction<T>) -> Result<GroupFunction<T>> {
    expect_carrier(f, cs.gamma())?;
    let mut out = vec![Complex::new(T::zero(), T::zero()); cs.lambda().order()];
    for g in cs.gamma().elements() {
        for &y in cs.p() {
            let x = cs.gamma_act(g, y);
            let s = cs.lambda_label(x);
            out[s] = out[s].clone() + f.get(g).clone() * cs.weight(x).clone();
        }
    }
    GroupFunction::new(cs.lambda(), out)
}

/// Checks that every `g` factors uniquely as `ω γ` with `ω ∈ Ω`, `γ ∈ Γ`, and
/// returns the factor `γ(g)` as a subgroup index.
fn transversal_factor(g: &FiniteGroup, sub: &Subgroup, omega: &[usize]) -> Result<Vec<usize>> {
    let mut factor = vec![None; g.order()];
    for &w in omega {
        if w >= g.order() {
            return Err(Error::NotTransversal(format!("element {w} out of range")));
        }
        for (a, &h) in sub.embedding.iter().enumerate() {
            let x = g.mul(w, h);
            if factor[x].replace(a).is_some() {
                return Err(Error::NotTransversal(format!(
                    "element {x} has two factorizations"
                )));
            }
        }
    }
    factor
        .into_iter()
        .enumerate()
        .map(|(x, f)| f.ok_or_else(|| Error::NotTransversal(format!("element {x} is not covered"))))
        .collect()
}

/// `φ̃(g) = (1/|Ω|) Σ_{w ∈ Ω} φ(γ(gw))` for `φ` on the subgroup.
pub fn lattice_induce<T: Scalar>(
    g: &FiniteGroup,
    sub: &Subgroup,
    omega: &[usize],
    phi: &GroupFunction<T>,
) -> Result<GroupFunction<T>> {
    expect_carrier(phi, &sub.group)?;
    let factor = transversal_factor(g, sub, omega)?;
    let k = T::from_usize(omega.len())
        .ok_or_else(|| Error::InvalidParameter("transversal too large".into()))?;
    Ok(GroupFunction::from_fn(g, |x| {
        let sum = omega.iter().fold(Complex::new(T::zero(), T::zero()), |s, &w| {
            s + phi.get(factor[g.mul(x, w)]).clone()
        });
        sum / k.clone()
    }))
}

/// The coupling behind [`lattice_induce`]: points `G` with weight `1/|Ω|`, the
/// target group `G` acting by left multiplication, the subgroup acting by
/// `x ↦ x α⁻¹`, `p = Ω` and `q = {e}`.
pub fn lattice_coupling<T: Scalar>(
    g: &FiniteGroup,
    sub: &Subgroup,
    omega: &[usize],
) -> Result<CouplingSpace<T>> {
    transversal_factor(g, sub, omega)?;
    let n = g.order();
    let k = T::from_usize(omega.len())
        .ok_or_else(|| Error::InvalidParameter("transversal too large".into()))?;
    CouplingSpace::new(CouplingSpec {
        label: format!("lattice {}<{}", sub.label, g.label()),
        weights: vec![T::one() / k; n],
        gamma: g.clone(),
        gamma_action: g.elements().map(|a| (0..n).map(|x| g.mul(a, x)).collect()).collect(),
        lambda: sub.group.clone(),
        lambda_action: sub
            .embedding
            .iter()
            .map(|&h| {
                let inv = g.inv(h);
                (0..n).map(|x| g.mul(x, inv)).collect()
            })
            .collect(),
        p: omega.to_vec(),
        q: vec![g.identity()],
    })
}
