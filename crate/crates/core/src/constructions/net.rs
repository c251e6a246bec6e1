use num_complex::Complex;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::fejer::fejer;
use super::tree::{tail_bound, tree_witness};
use crate::error::{Error, Result};
use crate::group::{Carrier, FreeBall, IntegerWindow};
use crate::{real, to_f64, Rational, Real};

/// An approximation net to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NetSpec {
    /// Fejér terms `φ_n` on ℤ, checked on `[−window, window]`.
    Fejer { ns: Vec<usize>, window: usize },
    /// Truncated Haagerup functions `φ_{n,t}` on the free group, checked on the
    /// ball of radius `window`; each term carries its own `(n, t)`.
    TreeHaagerup {
        gens: usize,
        window: usize,
        terms: Vec<(usize, f64)>,
    },
    /// Ball indicators `Σ_{k ≤ n} χ_k = φ_n + φ_{n−1}`, bounded by the sum of the
    /// two tree-witness bounds.
    TreeBallIndicator {
        gens: usize,
        window: usize,
        ns: Vec<usize>,
    },
    /// The single constant function 1.
    Constant,
}

impl NetSpec {
    /// The Fejér net `n = 1..=n_max` on `[−window, window]`.
    pub fn fejer(n_max: usize, window: usize) -> Self {
        NetSpec::Fejer {
            ns: (1..=n_max).collect(),
            window,
        }
    }

    /// `φ_{n,1/n}` for `n = 1..=n_max`.
    pub fn tree_reciprocal(gens: usize, window: usize, n_max: usize) -> Self {
        NetSpec::TreeHaagerup {
            gens,
            window,
            terms: (1..=n_max).map(|n| (n, 1.0 / n as f64)).collect(),
        }
    }

    /// For each `t`, the least `n` whose tail bound is at most `budget`.
    pub fn tree_budgeted(gens: usize, window: usize, ts: &[f64], budget: f64) -> Self {
        let terms = ts
            .iter()
            .map(|&t| {
                let mut n = 0;
                while tail_bound(n, t) > budget {
                    n += 1;
                }
                (n, t)
            })
            .collect();
        NetSpec::TreeHaagerup {
            gens,
            window,
            terms,
        }
    }

    pub fn label(&self) -> String {
        match self {
            NetSpec::Fejer { .. } => "fejer".into(),
            NetSpec::TreeHaagerup { .. } => "tree-haagerup".into(),
            NetSpec::TreeBallIndicator { .. } => "tree-ball-indicator".into(),
            NetSpec::Constant => "constant".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetTerm<T> {
    pub parameter: String,
    /// Certified upper bound on the term's M_d-norm.
    pub bound: T,
    /// Values on the window, in window order.
    pub values: Vec<Complex<T>>,
    /// `max_{x ∈ window} |φ(x) − 1|`.
    pub deviation: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetReport<T> {
    pub label: String,
    pub d: usize,
    pub window: Vec<String>,
    pub threshold: f64,
    pub terms: Vec<NetTerm<T>>,
    /// Largest per-term bound: desk-scale evidence for the net's constant.
    pub constant_evidence: T,
    /// Whether the last term is within `threshold` of 1 on the window.
    pub converged: bool,
    pub notes: String,
}

/// Per-term certified bounds and pointwise convergence on a window.
pub fn net_report<T: Real>(spec: &NetSpec, d: usize, threshold: f64) -> Result<NetReport<T>> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("d must be at least 2, got {d}")));
    }
    let one = Complex::new(T::one(), T::zero());
    let deviation = |vals: &[Complex<T>]| vals.iter().fold(T::zero(), |m, &v| m.max(crate::cabs(v - one)));
    let (window, terms, notes) = match spec {
        NetSpec::Constant => (
            vec!["e".to_string()],
            vec![NetTerm {
                parameter: "1".into(),
                bound: T::one(),
                values: vec![one],
                deviation: T::zero(),
            }],
            "constant function, bound from the trivial witness".to_string(),
        ),
        NetSpec::Fejer { ns, window } => {
            let top = ns.iter().copied().max().unwrap_or(1).max(*window);
            let carrier = IntegerWindow::new(top)?;
            let pts = carrier.centered(*window);
            let mut terms = Vec::with_capacity(ns.len());
            for &n in ns {
                let f = fejer::<Rational>(n, &carrier)?;
                // Deviation is computed exactly and rounded once.
                let dev = pts
                    .iter()
                    .map(|&x| (Rational::from_integer(1) - f.phi.get(x).re).abs())
                    .max()
                    .unwrap_or_default();
                let to_t = |q: Rational| real::<T>(q.to_f64().unwrap_or(f64::NAN));
                terms.push(NetTerm {
                    parameter: format!("n={n}"),
                    bound: to_t(f.certificate.norm_sq()),
                    values: pts
                        .iter()
                        .map(|&x| Complex::new(to_t(f.phi.get(x).re), T::zero()))
                        .collect(),
                    deviation: to_t(dev),
                });
            }
            (
                pts.iter().map(|&x| carrier.element_name(x)).collect(),
                terms,
                "bounds from the A-norm certificate ‖u‖₂² of each term".to_string(),
            )
        }
        NetSpec::TreeHaagerup {
            gens,
            window,
            terms: params,
        } => {
            let ball = FreeBall::new(*gens, *window)?;
            let pts: Vec<usize> = (0..ball.size()).collect();
            let mut terms = Vec::with_capacity(params.len());
            for &(n, t) in params {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
                }
                let values: Vec<Complex<T>> = pts
                    .iter()
                    .map(|&x| {
                        let len = ball.length(x);
                        let v = if len <= n { (-t * len as f64).exp() } else { 0.0 };
                        Complex::new(real::<T>(v), T::zero())
                    })
                    .collect();
                // ‖φ_{n,t}‖ ≤ ‖ρ_t‖_B + ‖ρ_t − φ_{n,t}‖ ≤ 1 + tail(n, t).
                terms.push(NetTerm {
                    parameter: format!("n={n},t={t}"),
                    bound: real::<T>(1.0 + tail_bound(n, t)),
                    deviation: deviation(&values),
                    values,
                });
            }
            (
                pts.iter().map(|&x| ball.element_name(x)).collect(),
                terms,
                "bounds 1 + Σ_{k>n} 2k e^{-tk}: ρ_t is positive definite and normalized, \
                 and the tail uses the per-sphere bound ‖χ_k‖ ≤ 2k"
                    .to_string(),
            )
        }
        NetSpec::TreeBallIndicator { gens, window, ns } => {
            let mut terms = Vec::with_capacity(ns.len());
            let mut names = Vec::new();
            for &n in ns {
                let ball = FreeBall::new(*gens, (n + d).max(*window))?;
                let pts = ball.ball(*window);
                if names.is_empty() {
                    names = pts.iter().map(|&x| ball.element_name(x)).collect();
                }
                let mut bound = T::zero();
                for m in [Some(n), n.checked_sub(1)].into_iter().flatten() {
                    let fam = tree_witness::<T>(&ball, m, d, 1)?;
                    if !fam.verification.certified {
                        return Err(Error::UncertifiedWitness(to_f64(fam.verification.residual)));
                    }
                    bound += fam.bound();
                }
                let values: Vec<Complex<T>> = pts
                    .iter()
                    .map(|&x| {
                        let v = if ball.length(x) <= n { T::one() } else { T::zero() };
                        Complex::new(v, T::zero())
                    })
                    .collect();
                terms.push(NetTerm {
                    parameter: format!("n={n}"),
                    bound,
                    deviation: deviation(&values),
                    values,
                });
            }
            (
                names,
                terms,
                "bounds from tree witnesses of φ_n and φ_{n-1} (triangle inequality)".to_string(),
            )
        }
    };
    let constant_evidence = terms.iter().fold(T::zero(), |m, t| m.max(t.bound));
    let converged = terms
        .last()
        .is_some_and(|t| to_f64(t.deviation) <= threshold);
    Ok(NetReport {
        label: spec.label(),
        d,
        window,
        threshold,
        terms,
        constant_evidence,
        converged,
        notes,
    })
}
