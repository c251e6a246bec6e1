//! Carrier models: finite groups, free-group balls and integer windows.

mod finite;
mod free;
mod function;
mod window;

use serde::{Deserialize, Serialize};

pub use finite::{FiniteGroup, GroupTableFile, Subgroup};
pub use free::{FreeBall, Letter};
pub use function::{FunctionFile, GroupFunction};
pub use window::IntegerWindow;

/// Identifies the carrier a function lives on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CarrierTag {
    Finite { label: String, order: usize },
    FreeBall { gens: usize, radius: usize },
    Window { halfwidth: usize },
}

impl std::fmt::Display for CarrierTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CarrierTag::Finite { label, .. } => write!(f, "{label}"),
            CarrierTag::FreeBall { gens, radius } => write!(f, "freeball:{gens},{radius}"),
            CarrierTag::Window { halfwidth } => write!(f, "window:{halfwidth}"),
        }
    }
}

/// A group, or a finite piece of one, with a possibly partial product.
pub trait Carrier {
    fn size(&self) -> usize;
    fn identity(&self) -> usize;
    fn inverse(&self, x: usize) -> usize;
    /// `None` when the product leaves a truncated carrier.
    fn product(&self, x: usize, y: usize) -> Option<usize>;
    /// Whether `product` is defined everywhere (a genuine finite group).
    fn is_total(&self) -> bool;
    fn tag(&self) -> CarrierTag;
    fn element_name(&self, x: usize) -> String;
    fn parse_element(&self, s: &str) -> Option<usize>;
    /// Index set for Schur matrices `[φ(x·y)]`: everything for finite groups,
    /// the half-radius ball for truncated carriers.
    fn schur_index_set(&self) -> Vec<usize>;
    /// Elements usable in `d`-fold tuples so that all products stay defined.
    fn tuple_index_set(&self, d: usize) -> Vec<usize>;
    /// Word length, where meaningful.
    fn length(&self, _x: usize) -> Option<usize> {
        None
    }

    /// The underlying finite group, when the carrier is one.
    fn as_finite(&self) -> Option<&FiniteGroup> {
        None
    }

    fn product_of(&self, xs: &[usize]) -> Option<usize> {
        xs.iter()
            .try_fold(self.identity(), |acc, &x| self.product(acc, x))
    }
}
