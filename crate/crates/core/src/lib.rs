//! Certified bounds on M_d-multiplier norms of finite and truncated groups.
//!
//! The crate is organised bottom-up:
//!
//! - [`group`]: carriers (finite groups, free-group balls, integer windows) and
//!   complex-valued functions on them.
//! - [`linalg`]: dense hermitian linear algebra plus the two conic engines, the
//!   Schur-multiplier norm SDP and trace-norm minimisation.
//! - [`norms`]: M_2 / B / A norms, factorization witnesses, duality pairing and
//!   positive-definiteness tests.
//! - [`constructions`]: Fejér nets on ℤ, radial tree multipliers with explicit
//!   operator witnesses, Haagerup functions, coefficient witnesses and net reports.
//! - [`coupling`]: finite couplings with commuting actions, the induction map,
//!   its ℓ¹ dual, witness transport, the Koopman unitary and lattice induction.
//! - [`suite`]: the acceptance criteria, runnable from tests and from the CLI.
//!
//! All numerical code is generic over the real scalar (`f32` or `f64`, see
//! [`Real`]). Purely algebraic maps (Fejér terms, pairing, induction) are generic
//! over [`Scalar`], which also admits exact rationals such as [`Rational`].

pub mod constructions;
pub mod coupling;
pub mod error;
pub mod group;
pub mod linalg;
pub mod norms;
pub mod oracle;
pub mod sample;
pub mod suite;

use std::fmt::Debug;

pub use error::{Error, Result};
pub use num_complex::Complex;

/// Scalars for the exact-capable algebraic layer.
pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + num_traits::Num
    + num_traits::Signed
    + num_traits::FromPrimitive
    + Send
    + Sync
    + 'static
{
}

impl<T> Scalar for T where
    T: Clone
        + Debug
        + PartialOrd
        + num_traits::Num
        + num_traits::Signed
        + num_traits::FromPrimitive
        + Send
        + Sync
        + 'static
{
}

/// Floating-point scalars used by the numerical engines: `f32` or `f64`.
pub trait Real:
    Scalar
    + nalgebra::RealField
    + Copy
    + num_traits::ToPrimitive
    + serde::Serialize
    + serde::de::DeserializeOwned
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working precision.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("every f64 is representable in a Real scalar")
}

/// Converts a working-precision value to `f64` for reporting.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Modulus of a complex number in working precision.
#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

/// Exact rational scalar.
pub type Rational = num_rational::Ratio<i64>;

pub type ComplexMatrix = linalg::CMatrix<f64>;
pub type GroupFunction = group::GroupFunction<f64>;
pub type ExactGroupFunction = group::GroupFunction<Rational>;
pub type FactorizationWitness = norms::FactorizationWitness<f64>;
pub type NormReport = norms::NormReport<f64>;
pub type CouplingSpace = coupling::CouplingSpace<f64>;
pub type ExactCouplingSpace = coupling::CouplingSpace<Rational>;
pub type TreeFamily = constructions::TreeFamily<f64>;
pub type NetReport = constructions::NetReport<f64>;

pub use constructions::{
    coefficient_witness, fejer, haagerup_family, net_report, radial_multipliers, tail_bound,
    tree_witness, NetSpec,
};
pub use coupling::{
    induce, induce_dual, induce_witness, koopman_check, lattice_induce, me_coupling,
    subgroup_coupling, theta,
};
pub use group::{Carrier, CarrierTag, FiniteGroup, FreeBall, IntegerWindow, Subgroup};
pub use linalg::{is_psd, operator_norm, schur_norm, trace_min, SolveOptions};
pub use norms::{
    a_norm, b_norm, is_pd_function, m2_norm, md_sandwich, pairing, search_factorization,
    verify_factorization, TupleSource,
};
