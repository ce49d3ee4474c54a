//! Topology of surface mapping tori.
//!
//! A mapping class is recorded by its action `f*` on `H^1(Σ, Z)`. Spin^c structures
//! of a given fiber degree form a torsor over `coker(1 - f*)`, and the large-degree
//! monopole count is a signed multiple of the number of such classes.

mod count;
mod genus1;
mod mapping;
mod spinc;

pub use count::{count_large_d, dimension_one_curve_genus, dimension_zero_point_count, moduli_dimension, CountRow, CountTable};
pub use genus1::{genus1_moduli_structure, HolonomyComponent, ModuliReport};
pub use mapping::{validate_mapping_class, MappingClass};
pub use spinc::{jacobian_fixed_points, spinc_classes, FixedPoint, SpinCClass};

use zlattice::LatticeError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TopologyError {
    #[error("matrix does not preserve the symplectic form")]
    NotSymplectic,
    #[error("expected a {expected}x{expected} matrix for genus {genus}, got {rows}x{cols}")]
    WrongSize { genus: usize, expected: usize, rows: usize, cols: usize },
    #[error("genus must be at least 1")]
    GenusTooSmall,
    #[error("coker(1 - f*) = {group} is infinite (free rank {free_rank})")]
    InfiniteFamily { group: String, free_rank: usize },
    #[error("det(1 - f*) = 0, fixed set is not isolated")]
    NonIsolatedFixedSet,
    #[error("degree {d} is not above 2g - 2 = {bound}")]
    DegreeTooSmall { d: i64, bound: i64 },
    #[error("rank must be at least 1")]
    RankTooSmall,
    #[error("serialization: {0}")]
    Serialize(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}
