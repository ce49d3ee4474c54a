//! Exact integer linear algebra over `Z`.
//!
//! Everything here works with arbitrary-precision integers and exact
//! rationals, so results never depend on word size or rounding.

mod group;
mod matrix;
mod snf;
mod torus;

pub use group::{cokernel, FinAbGroup, GroupElement};
pub use matrix::IntMatrix;
pub use snf::{smith_normal_form, SmithDecomposition};
pub use torus::{torsion_fixed_points, TorusPoint};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
    #[error("fixed set is not isolated (det = 0)")]
    NonIsolatedFixedSet,
    #[error("cannot parse matrix: {0}")]
    Parse(String),
}
