//! Parallel transport of framed vortices along a loop of flat bundles.
//!
//! In the gauge with no `dt` component the lift of the loop solves
//! `α̇ = σ - Re⟨Ψ,Φ⟩`, `Φ̇ = -i∂̄*Ψ`, where `Ψ` solves an elliptic equation at
//! every instant. The holonomy of `A` at `t = 1` picks out the strand a vortex
//! lands on, which gives the monodromy permutation.

mod flow;
mod monodromy;
mod psi;

pub use flow::{time_nodes, transport, transport_opts, TransportOptions, TransportState, TransportTrace};
pub use monodromy::{family_from_braid, numeric_monodromy, numeric_monodromy_report, MonodromyReport};
pub use psi::{pairing, psi_residual, solve_psi, solve_psi_from, PsiOperator};

use num_complex::Complex64 as C64;
use vortexfield::{FlatCurve, VortexError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransportError {
    #[error("Ψ solve stalled after {iterations} iterations at relative residual {residual:.3e}")]
    SingularOperator { iterations: usize, residual: f64 },
    #[error("moment residual {residual:.3e} above tolerance at t = {time}")]
    TrackingLoss { time: f64, residual: f64 },
    #[error("strand {strand} ends near several strands {candidates:?}")]
    AmbiguousMatch { strand: usize, candidates: Vec<usize> },
    #[error("strand {strand} ends {distance:.3e} away from every strand")]
    Unmatched { strand: usize, distance: f64 },
    #[error("{0}")]
    InvalidInput(String),
    #[error(transparent)]
    Vortex(#[from] VortexError),
}

/// Flat form `2π(a_X dx + a_Y dy)` in the frame encoding.
pub(crate) fn flat_form(curve: &FlatCurve, a: [f64; 2]) -> C64 {
    curve.lattice_to_frame([2.0 * std::f64::consts::PI * a[0], 2.0 * std::f64::consts::PI * a[1]])
}

/// Euclidean distance on `R²/Z²`.
pub fn toroidal_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    let w = |d: f64| d - d.round();
    w(a[0] - b[0]).hypot(w(a[1] - b[1]))
}
