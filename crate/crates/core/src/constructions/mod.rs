//! Explicit multipliers with certified norm bounds.

mod coefficient;
mod fejer;
mod net;
mod tree;

pub use coefficient::coefficient_witness;
pub use fejer::{fejer, FejerCertificate, FejerTerm};
pub use net::{net_report, NetReport, NetSpec, NetTerm};
pub use tree::{
    haagerup_family, radial_multipliers, sphere_bound, tail_bound, tree_witness, HaagerupFamily,
    TreeFamily, TreeNorms,
};
