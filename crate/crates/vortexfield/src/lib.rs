//! Pseudo-spectral fields on a flat elliptic curve.
//!
//! Sections of flat line bundles are periodic grid fields paired with a constant
//! connection form; derivatives are exact Fourier multipliers on the truncated mode set
//! and products are taken pointwise on the grid. The framed vortex solver reduces the
//! equations to the scalar equation `Δu - e^{2u} + τ = 0` by a complex gauge transformation.

mod curve;
mod dolbeault;
mod family;
mod snapshot;
mod solve;

pub use curve::{complexify, im, mode_index, re, sup_norm, sup_norm_c, FlatCurve};
pub use dolbeault::{dbar_adj, dbar_op, DolbeaultContext, TwistedField};
pub use family::{FlatBundleFamily, HolonomyPath, TauProfile};
pub use snapshot::{read_component, write_snapshot};
pub use solve::{
    kazdan_warner, moment_field, moment_residual, phi_density, vortex_solve, vortex_solve_opts,
    vortex_solve_with_holonomy, NewtonReport, SolveOptions, VortexConfig, DENSE_MAX_N,
};

pub use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VortexError {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("field twisted by {field:?} used with a context twisted by {context:?}")]
    HolonomyMismatch { field: [f64; 2], context: [f64; 2] },
    #[error("no summand has holonomy -ζ = {:?}", [-zeta[0], -zeta[1]])]
    NoHolomorphicSection { zeta: [f64; 2] },
    #[error("summands {a} and {b} have the same holonomy")]
    CoincidentHolonomies { a: usize, b: usize },
    #[error("mean of τ is {mean}, the degree-0 framed equations need it positive")]
    NonPositiveTau { mean: f64 },
    #[error("Newton iteration did not converge after {iterations} steps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("invalid bundle family: {0}")]
    InvalidFamily(String),
    #[error("closedness τ̇ + ⋆dσ = 0 fails at t = {time} by {residual:e}")]
    ClosednessViolated { time: f64, residual: f64 },
    #[error("io: {0}")]
    Io(String),
}
