//! Rescaled multi-monopole equations on a mapping torus over the flat torus.
//!
//! Fields are stored slice by slice on a uniform `t`-grid of `m` points in `[0, 1)`, with
//! the gluing [`Closing`] supplying the value at `t = 1`. Imaginary-valued objects are
//! stored by their real part over `i`: the connection `A = iα` as the frame-encoded
//! `ᾰ = α₁ + iα₂`, `V = iV_r`, `b = ib_r`. Sections and (0,1)-form coefficients of the
//! `N` summands are stored summand-major in one vector per slice.

mod assemble;
mod closing;
mod fields;
mod identities;
mod newton;
mod norms;
mod ops;

pub use assemble::{adiabatic_residual, assemble_adiabatic, AssembleOptions};
pub use closing::{fstar_order, Closing};
pub use fields::{Config3D, Mesh, Tangent3D};
pub use identities::{band_limited_tangent, identity_check, perturb_phi, IdentityReport};
pub use newton::{newton_refine, NewtonLogEntry, NewtonOptions, NewtonResult};
pub use norms::{weighted_norm, NormLevel, WeightedNormReport};
pub use ops::{linearize_apply, quadratic_term, sw_linear, sw_map, Blocks};

use num_complex::Complex64 as C64;
use vortexfield::{FlatCurve, VortexError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MonopoleError {
    #[error("periodicity mismatch: {0}")]
    PeriodicityMismatch(String),
    #[error("linear solve failed after {iterations} iterations (relative residual {residual:e})")]
    LinearSolveFailure { iterations: usize, residual: f64 },
    #[error("Newton iteration diverged at step {iteration} (residual {residual:e})")]
    Divergence { iteration: usize, residual: f64, log: Vec<crate::NewtonLogEntry> },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Transport(#[from] transport::TransportError),
    #[error(transparent)]
    Vortex(#[from] VortexError),
}

pub type Result<T> = std::result::Result<T, MonopoleError>;

/// Flat connection form `2π(a_X dx + a_Y dy)` in the frame encoding.
pub(crate) fn flat(curve: &FlatCurve, a: [f64; 2]) -> C64 {
    let tau = std::f64::consts::TAU;
    curve.lattice_to_frame([tau * a[0], tau * a[1]])
}
