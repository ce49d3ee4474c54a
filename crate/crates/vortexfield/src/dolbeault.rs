use num_complex::Complex64 as C64;

use crate::{FlatCurve, VortexError};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// `∂̄_A s = (D̄s + iᾰ s)/√2`, the coefficient of the unit (0,1)-form `dz̄/√2`.
///
/// `alpha` is the full connection 1-form `ᾰ` of `d + iα` in the frame encoding.
pub fn dbar_op(curve: &FlatCurve, alpha: &[C64], s: &[C64]) -> Vec<C64> {
    let mut out = curve.dbar(s);
    for ((o, a), x) in out.iter_mut().zip(alpha).zip(s) {
        *o = (*o + C64::i() * a * x) / SQRT2;
    }
    out
}

/// `∂̄_A^* w = -(Dw + i·conj(ᾰ)·w)/√2`, the `L²` adjoint of [`dbar_op`].
pub fn dbar_adj(curve: &FlatCurve, alpha: &[C64], w: &[C64]) -> Vec<C64> {
    let mut out = curve.d(w);
    for ((o, a), x) in out.iter_mut().zip(alpha).zip(w) {
        *o = -(*o + C64::i() * a.conj() * x) / SQRT2;
    }
    out
}

/// A periodic grid field standing for a section of the flat bundle of holonomy `twist`.
///
/// The bundle is represented in the gauge where its connection is the constant form
/// `2π(θ_X dx + θ_Y dy)`, so the Fourier mode `m` behaves like the twisted mode `m + θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistedField {
    pub twist: [f64; 2],
    pub data: Vec<C64>,
}

/// Dolbeault operator of one summand: flat part from `twist`, plus an optional periodic
/// perturbation `ᾰ_p` of the line-bundle connection.
pub struct DolbeaultContext<'a> {
    curve: &'a FlatCurve,
    twist: [f64; 2],
    alpha: Vec<C64>,
}

impl<'a> DolbeaultContext<'a> {
    pub fn new(curve: &'a FlatCurve, twist: [f64; 2], perturbation: Option<&[C64]>) -> Self {
        let flat = curve.lattice_to_frame([2.0 * std::f64::consts::PI * twist[0], 2.0 * std::f64::consts::PI * twist[1]]);
        let alpha = match perturbation {
            Some(p) => p.iter().map(|a| a + flat).collect(),
            None => vec![flat; curve.len()],
        };
        Self { curve, twist, alpha }
    }

    /// Total connection form `ᾰ` seen by sections.
    pub fn alpha(&self) -> &[C64] {
        &self.alpha
    }

    fn check(&self, f: &TwistedField) -> Result<(), VortexError> {
        if f.data.len() != self.curve.len() {
            return Err(VortexError::InvalidField(format!(
                "field has {} samples, grid has {}",
                f.data.len(),
                self.curve.len()
            )));
        }
        if f.twist != self.twist {
            return Err(VortexError::HolonomyMismatch { field: f.twist, context: self.twist });
        }
        Ok(())
    }

    pub fn apply(&self, s: &TwistedField) -> Result<TwistedField, VortexError> {
        self.check(s)?;
        Ok(TwistedField { twist: self.twist, data: dbar_op(self.curve, &self.alpha, &s.data) })
    }

    pub fn adjoint(&self, w: &TwistedField) -> Result<TwistedField, VortexError> {
        self.check(w)?;
        Ok(TwistedField { twist: self.twist, data: dbar_adj(self.curve, &self.alpha, &w.data) })
    }
}
