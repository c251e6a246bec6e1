//! Finite couplings: a weighted point set with commuting actions of two groups
//! Γ and Λ, a Λ-fundamental domain `p` and a Γ-fundamental domain `q`.
//!
//! Functions on Λ are carried to Γ by `φ̂(γ) = Σ_{x ∈ γ·p} w(x) θ(φ)(x)`, where
//! `θ(φ)(x) = φ(s)` for the unique `s` with `s·x ∈ p`.

mod induce;
mod space;
mod transport;

pub use induce::{induce, induce_dual, lattice_coupling, lattice_induce, theta};
pub use space::{
    me_coupling, me_example, subgroup_coupling, CouplingFile, CouplingSpace, CouplingSpec,
    FixedAlgebra, GroupRef, TracedSpace,
};
pub use transport::{
    induce_witness, koopman_check, koopman_transport, KoopmanReport, TransportReport,
};
