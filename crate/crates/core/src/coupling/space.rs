use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupTableFile, Subgroup};
use crate::Scalar;

/// Finite points with positive weights (the trace of each point indicator).
#[derive(Debug, Clone, PartialEq)]
pub struct TracedSpace<T> {
    weights: Vec<T>,
}

impl<T: Scalar> TracedSpace<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("traced space has no points".into()));
        }
        if let Some(x) = weights.iter().position(|w| w.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater)) {
            return Err(Error::InvalidParameter(format!(
                "weight of point {x} is not positive: {:?}",
                weights[x]
            )));
        }
        Ok(Self { weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, x: usize) -> &T {
        &self.weights[x]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `Σ_{x ∈ set} w(x)`.
    pub fn trace(&self, set: &[usize]) -> T {
        set.iter()
            .fold(T::zero(), |s, &x| s + self.weights[x].clone())
    }
}

/// Raw coupling data before validation.
///
/// `gamma_action[g][x]` is `g·x`; likewise for `lambda_action`.
#[derive(Debug, Clone)]
pub struct CouplingSpec<T> {
    pub label: String,
    pub weights: Vec<T>,
    pub gamma: FiniteGroup,
    pub gamma_action: Vec<Vec<usize>>,
    pub lambda: FiniteGroup,
    pub lambda_action: Vec<Vec<usize>>,
    pub p: Vec<usize>,
    pub q: Vec<usize>,
}

/// A validated coupling. Immutable once built.
#[derive(Debug, Clone)]
pub struct CouplingSpace<T> {
    label: String,
    space: TracedSpace<T>,
    gamma: FiniteGroup,
    gamma_action: Vec<Vec<usize>>,
    lambda: FiniteGroup,
    lambda_action: Vec<Vec<usize>>,
    p: Vec<usize>,
    q: Vec<usize>,
    /// `lambda_label[x]` is the `s ∈ Λ` with `s·x ∈ p`.
    lambda_label: Vec<usize>,
    /// `gamma_label[x]` is the `γ ∈ Γ` with `γ·x ∈ q`.
    gamma_label: Vec<usize>,
}

fn check_action(name: &str, g: &FiniteGroup, action: &[Vec<usize>], n: usize) -> Result<()> {
    if action.len() != g.order() {
        return Err(Error::NotAnAction(format!(
            "{name} action lists {} permutations for a group of order {}",
            action.len(),
            g.order()
        )));
    }
    for (a, perm) in action.iter().enumerate() {
        if perm.len() != n {
            return Err(Error::NotAnAction(format!(
                "{name} permutation {a} has length {}, expected {n}",
                perm.len()
            )));
        }
        let mut seen = vec![false; n];
        for &y in perm {
            if y >= n || std::mem::replace(&mut seen[y], true) {
                return Err(Error::NotAnAction(format!("{name} element {a} is not a permutation")));
            }
        }
    }
    if action[g.identity()].iter().enumerate().any(|(x, &y)| x != y) {
        return Err(Error::NotAnAction(format!("{name} identity moves a point")));
    }
    for a in g.elements() {
        for b in g.elements() {
            let ab = &action[g.mul(a, b)];
            if (0..n).any(|x| ab[x] != action[a][action[b][x]]) {
                return Err(Error::NotAnAction(format!(
                    "{name}: ({a}·{b})·x differs from {a}·({b}·x)"
                )));
            }
        }
    }
    Ok(())
}

/// Checks that the translates of `domain` partition the points; returns, for
/// every point, the group element moving it into `domain`.
fn domain_labels(name: &str, g: &FiniteGroup, action: &[Vec<usize>], domain: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut in_domain = vec![false; n];
    for &x in domain {
        if x >= n {
            return Err(Error::NotFundamentalDomain(format!("{name}: point {x} out of range")));
        }
        if std::mem::replace(&mut in_domain[x], true) {
            return Err(Error::NotFundamentalDomain(format!("{name}: point {x} listed twice")));
        }
    }
    let mut label = vec![None; n];
    for a in g.elements() {
        for &x in domain {
            // x = a⁻¹·y with y in the domain means a·(a⁻¹·y) = y.
            let y = action[g.inv(a)][x];
            if label[y].replace(a).is_some() {
                return Err(Error::NotFundamentalDomain(format!(
                    "{name}: translates of {domain:?} overlap at point {y}"
                )));
            }
        }
    }
    label
        .into_iter()
        .enumerate()
        .map(|(x, l)| {
            l.ok_or_else(|| {
                Error::NotFundamentalDomain(format!(
                    "{name}: translates of {domain:?} miss point {x}"
                ))
            })
        })
        .collect()
}

impl<T: Scalar> CouplingSpace<T> {
    /// Validates every axiom; the weights must already satisfy `Tr(p) = 1`.
    pub fn new(spec: CouplingSpec<T>) -> Result<Self> {
        let CouplingSpec {
            label,
            weights,
            gamma,
            gamma_action,
            lambda,
            lambda_action,
            p,
            q,
        } = spec;
        let space = TracedSpace::new(weights)?;
        let n = space.len();
        check_action("Γ", &gamma, &gamma_action, n)?;
        check_action("Λ", &lambda, &lambda_action, n)?;
        for a in gamma.elements() {
            for s in lambda.elements() {
                if let Some(x) = (0..n).find(|&x| {
                    gamma_action[a][lambda_action[s][x]] != lambda_action[s][gamma_action[a][x]]
                }) {
                    return Err(Error::ActionsDoNotCommute(format!(
                        "Γ element {a} and Λ element {s} disagree at point {x}"
                    )));
                }
            }
        }
        for (name, g, action) in [("Γ", &gamma, &gamma_action), ("Λ", &lambda, &lambda_action)] {
            for a in g.elements() {
                if let Some(x) = (0..n).find(|&x| space.weight(action[a][x]) != space.weight(x)) {
                    return Err(Error::WeightNotPreserved(format!(
                        "{name} element {a} moves point {x} to a point of different weight"
                    )));
                }
            }
        }
        let lambda_label = domain_labels("p under Λ", &lambda, &lambda_action, &p, n)?;
        let gamma_label = domain_labels("q under Γ", &gamma, &gamma_action, &q, n)?;
        if space.trace(&p) != T::one() {
            return Err(Error::InvalidParameter(format!(
                "Tr(p) = {:?}, expected 1",
                space.trace(&p)
            )));
        }
        Ok(Self {
            label,
            space,
            gamma,
            gamma_action,
            lambda,
            lambda_action,
            p,
            q,
            lambda_label,
            gamma_label,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn space(&self) -> &TracedSpace<T> {
        &self.space
    }

    pub fn points(&self) -> usize {
        self.space.len()
    }

    pub fn weight(&self, x: usize) -> &T {
        self.space.weight(x)
    }

    /// The target group Γ.
    pub fn gamma(&self) -> &FiniteGroup {
        &self.gamma
    }

    /// The source group Λ.
    pub fn lambda(&self) -> &FiniteGroup {
        &self.lambda
    }

    pub fn p(&self) -> &[usize] {
        &self.p
    }

    pub fn q(&self) -> &[usize] {
        &self.q
    }

    /// `γ·x`.
    pub fn gamma_act(&self, g: usize, x: usize) -> usize {
        self.gamma_action[g][x]
    }

    /// `s·x`.
    pub fn lambda_act(&self, s: usize, x: usize) -> usize {
        self.lambda_action[s][x]
    }

    /// The `s ∈ Λ` with `x ∈ σ_{s⁻¹}(p)`, i.e. `s·x ∈ p`.
    pub fn lambda_label(&self, x: usize) -> usize {
        self.lambda_label[x]
    }

    /// The `γ ∈ Γ` with `γ·x ∈ q`.
    pub fn gamma_label(&self, x: usize) -> usize {
        self.gamma_label[x]
    }

    /// Γ-orbits with `τ(O) = Tr(q · 1_O)`.
    pub fn fixed_algebra(&self) -> FixedAlgebra<T> {
        let n = self.points();
        let mut orbit_of = vec![usize::MAX; n];
        let mut orbits = Vec::new();
        for x in 0..n {
            if orbit_of[x] != usize::MAX {
                continue;
            }
            let k = orbits.len();
            let mut orbit: Vec<usize> = self.gamma.elements().map(|g| self.gamma_act(g, x)).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &y in &orbit {
                orbit_of[y] = k;
            }
            orbits.push(orbit);
        }
        let mut tau = vec![T::zero(); orbits.len()];
        for &x in &self.q {
            tau[orbit_of[x]] = tau[orbit_of[x]].clone() + self.weight(x).clone();
        }
        FixedAlgebra {
            orbits,
            orbit_of,
            tau,
        }
    }

    /// Same coupling with every weight converted by `f`.
    pub fn map_weights<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Result<CouplingSpace<U>> {
        CouplingSpace::new(CouplingSpec {
            label: self.label.clone(),
            weights: self.space.weights().iter().map(f).collect(),
            gamma: self.gamma.clone(),
            gamma_action: self.gamma_action.clone(),
            lambda: self.lambda.clone(),
            lambda_action: self.lambda_action.clone(),
            p: self.p.clone(),
            q: self.q.clone(),
        })
    }
}

/// The Γ-invariant functions on the points, with the trace `τ(x) = Tr(q x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedAlgebra<T> {
    pub orbits: Vec<Vec<usize>>,
    pub orbit_of: Vec<usize>,
    pub tau: Vec<T>,
}

/// Validates a coupling, first rescaling all weights by `1 / Tr(p)`.
pub fn me_coupling<T: Scalar>(mut spec: CouplingSpec<T>) -> Result<CouplingSpace<T>> {
    let n = spec.weights.len();
    if let Some(&x) = spec.p.iter().find(|&&x| x >= n) {
        return Err(Error::NotFundamentalDomain(format!("p: point {x} out of range")));
    }
    let tr = spec
        .p
        .iter()
        .fold(T::zero(), |s, &x| s + spec.weights[x].clone());
    if tr.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::NotFundamentalDomain("p has no positive weight".into()));
    }
    for w in spec.weights.iter_mut() {
        *w = w.clone() / tr.clone();
    }
    CouplingSpace::new(spec)
}

/// ℤ₂ acting by `+3` and ℤ₃ acting by `+2` on ℤ/6, with `p = {0, 1}` and
/// `q = {0, 1, 2}`; unit input weights become `1/2`.
pub fn me_example<T: Scalar>() -> Result<CouplingSpace<T>> {
    let gamma = FiniteGroup::cyclic(2)?;
    let lambda = FiniteGroup::cyclic(3)?;
    me_coupling(CouplingSpec {
        label: "z2-z3-on-6".into(),
        weights: vec![T::one(); 6],
        gamma_action: (0..2).map(|a| (0..6).map(|x| (x + 3 * a) % 6).collect()).collect(),
        lambda_action: (0..3).map(|s| (0..6).map(|x| (x + 2 * s) % 6).collect()).collect(),
        gamma,
        lambda,
        p: vec![0, 1],
        q: vec![0, 1, 2],
    })
}

/// `Γ ≤ Λ` acting on Λ by `(γ, s)·x = s x γ⁻¹`, with `p = {e}` and `q` the
/// least element of each coset `xΓ`.
pub fn subgroup_coupling<T: Scalar>(lambda: &FiniteGroup, sub: &Subgroup) -> Result<CouplingSpace<T>> {
    let n = lambda.order();
    if sub.locate.len() != n {
        return Err(Error::NotSubgroup(format!(
            "subgroup {} does not live in {}",
            sub.label,
            lambda.label()
        )));
    }
    let gamma_action = sub
        .group
        .elements()
        .map(|a| {
            let inv = lambda.inv(sub.embedding[a]);
            (0..n).map(|x| lambda.mul(x, inv)).collect()
        })
        .collect();
    let lambda_action = lambda
        .elements()
        .map(|s| (0..n).map(|x| lambda.mul(s, x)).collect())
        .collect();
    let mut q = Vec::new();
    let mut covered = vec![false; n];
    for x in 0..n {
        if !covered[x] {
            q.push(x);
            for &h in &sub.embedding {
                covered[lambda.mul(x, h)] = true;
            }
        }
    }
    CouplingSpace::new(CouplingSpec {
        label: format!("{}<{}", sub.label, lambda.label()),
        weights: vec![T::one(); n],
        gamma: sub.group.clone(),
        gamma_action,
        lambda: lambda.clone(),
        lambda_action,
        p: vec![lambda.identity()],
        q,
    })
}

/// A group given by preset name or by explicit table.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Preset(String),
    Table(GroupTableFile),
}

impl GroupRef {
    pub fn resolve(&self) -> Result<FiniteGroup> {
        match self {
            GroupRef::Preset(s) => FiniteGroup::from_preset(s),
            GroupRef::Table(t) => FiniteGroup::from_file(t),
        }
    }
}

/// On-disk coupling description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CouplingFile {
    #[serde(default)]
    pub label: Option<String>,
    pub weights: Vec<f64>,
    pub gamma: GroupRef,
    pub gamma_action: Vec<Vec<usize>>,
    pub lambda: GroupRef,
    pub lambda_action: Vec<Vec<usize>>,
    pub p: Vec<usize>,
    pub q: Vec<usize>,
}

impl CouplingFile {
    /// Validates through [`me_coupling`], so weights are normalized to `Tr(p) = 1`.
    pub fn build(&self) -> Result<CouplingSpace<f64>> {
        if let Some(x) = self.weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::NonFinite(format!("weight of point {x}")));
        }
        me_coupling(CouplingSpec {
            label: self.label.clone().unwrap_or_else(|| "coupling".into()),
            weights: self.weights.clone(),
            gamma: self.gamma.resolve()?,
            gamma_action: self.gamma_action.clone(),
            lambda: self.lambda.resolve()?,
            lambda_action: self.lambda_action.clone(),
            p: self.p.clone(),
            q: self.q.clone(),
        })
    }
}

impl CouplingSpace<f64> {
    pub fn to_file(&self) -> CouplingFile {
        let table = |g: &FiniteGroup| GroupRef::Table(g.to_file());
        CouplingFile {
            label: Some(self.label.clone()),
            weights: self.space.weights().to_vec(),
            gamma: table(&self.gamma),
            gamma_action: self.gamma_action.clone(),
            lambda: table(&self.lambda),
            lambda_action: self.lambda_action.clone(),
            p: self.p.clone(),
            q: self.q.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn subgroup_examples() {
        let z4 = FiniteGroup::cyclic(4).unwrap();
        let sub = z4.subgroup_from_spec("cyclic:2").unwrap();
        let cs = subgroup_coupling::<f64>(&z4, &sub).unwrap();
        assert_eq!(cs.p(), &[0]);
        assert_eq!(cs.q(), &[0, 1]);
        assert_eq!(cs.space().trace(cs.p()), 1.0);

        let s3 = FiniteGroup::symmetric(3).unwrap();
        let a3 = s3.subgroup_from_spec("alt:3").unwrap();
        assert_eq!(subgroup_coupling::<f64>(&s3, &a3).unwrap().q().len(), 2);

        let whole = s3.subgroup_from_spec("sym:3").unwrap();
        let cs = subgroup_coupling::<f64>(&s3, &whole).unwrap();
        assert_eq!(cs.q(), &[s3.identity()]);
    }

    #[test]
    fn me_example_rescales_weights() {
        let cs = me_example::<Rational>().unwrap();
        assert!(cs.space().weights().iter().all(|w| *w == Rational::new(1, 2)));
        assert_eq!(cs.space().trace(cs.q()), Rational::new(3, 2));
    }

    fn spec6() -> CouplingSpec<f64> {
        CouplingSpec {
            label: "t".into(),
            weights: vec![1.0; 6],
            gamma: FiniteGroup::cyclic(2).unwrap(),
            gamma_action: (0..2).map(|a| (0..6).map(|x| (x + 3 * a) % 6).collect()).collect(),
            lambda: FiniteGroup::cyclic(3).unwrap(),
            lambda_action: (0..3).map(|s| (0..6).map(|x| (x + 2 * s) % 6).collect()).collect(),
            p: vec![0, 1],
            q: vec![0, 1, 2],
        }
    }

    #[test]
    fn violations_have_distinct_errors() {
        let mut s = spec6();
        s.p = vec![0];
        assert!(matches!(me_coupling(s), Err(Error::NotFundamentalDomain(_))));

        // Two involutions on three points that do not commute.
        let mut s = spec6();
        s.weights = vec![1.0; 3];
        s.lambda = FiniteGroup::cyclic(2).unwrap();
        s.gamma_action = vec![vec![0, 1, 2], vec![1, 0, 2]];
        s.lambda_action = vec![vec![0, 1, 2], vec![0, 2, 1]];
        s.p = vec![0];
        s.q = vec![0];
        assert!(matches!(me_coupling(s), Err(Error::ActionsDoNotCommute(_))));

        let mut s = spec6();
        s.weights[3] = 2.0;
        assert!(matches!(me_coupling(s), Err(Error::WeightNotPreserved(_))));

        let mut s = spec6();
        s.gamma_action[1] = vec![1, 2, 3, 4, 5, 0];
        assert!(matches!(me_coupling(s), Err(Error::NotAnAction(_))));
    }

    #[test]
    fn file_round_trip() {
        let cs = me_example::<f64>().unwrap();
        let json = serde_json::to_string(&cs.to_file()).unwrap();
        let back: CouplingFile = serde_json::from_str(&json).unwrap();
        let cs2 = back.build().unwrap();
        assert_eq!(cs2.q(), cs.q());
        assert_eq!(cs2.space().weights(), cs.space().weights());
    }
}
