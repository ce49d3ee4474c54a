//! Torus braids for genus-1 mapping tori.
//!
//! A braid is given by piecewise-linear lifts `γ_k: [0, 1] -> R^2` of `N` points of the
//! Jacobian torus, closed up by the monodromy: `γ_{σ(k)}(0) ≡ f*·γ_k(1) mod Z^2`.
//! Strands fixed by `σ` correspond to multi-monopoles; each carries a class in `coker(1 - f*)`.

mod braid;
mod census;
mod construct;
mod perm;
mod rational;

pub use braid::{braid_permutation, braid_validate, Breakpoint, Lift, Strand, TorusBraid, ValidBraid};
pub use census::{braid_census, strand_class, BraidCensus, FixedStrand};
pub use construct::braid_construct;
pub use perm::Permutation;
pub use rational::{parse_rational, rational_from_json, rational_to_json};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BraidError {
    #[error("strand {strand}: end point does not close up under f* and the closing permutation")]
    EndpointMismatch { strand: usize },
    #[error("strands {} and {} collide at t = {time}", strands.0, strands.1)]
    DiagonalCollision { time: String, strands: (usize, usize) },
    #[error("invalid strand: {0}")]
    InvalidStrand(String),
    #[error("targets ask for {requested} fixed strands but N = {rank}")]
    TargetsExceedRank { requested: usize, rank: usize },
    #[error("class {0} is not an element of coker(1 - f*)")]
    UnrealizableClass(String),
    #[error("det(1 - f*) = 0, fixed set is not isolated")]
    NonIsolatedFixedSet,
    #[error("constructed braid failed validation: {0}")]
    ConstructionFailed(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error(transparent)]
    Topology(#[from] topology::TopologyError),
    #[error(transparent)]
    Lattice(#[from] zlattice::LatticeError),
}
