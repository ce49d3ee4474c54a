use num_bigint::BigInt;
use zlattice::{FinAbGroup, IntMatrix};

use crate::TopologyError;

/// Action `f*` of a surface diffeomorphism on `H^1(Σ, Z) = Z^{2g}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingClass {
    genus: usize,
    fstar: IntMatrix,
}

/// Standard symplectic form `[[0, I], [-I, 0]]` on `Z^{2g}`.
fn standard_form(g: usize) -> IntMatrix {
    let mut j = IntMatrix::zeros(2 * g, 2 * g);
    for i in 0..g {
        j.set(i, g + i, BigInt::from(1));
        j.set(g + i, i, BigInt::from(-1));
    }
    j
}

pub fn validate_mapping_class(g: usize, matrix: IntMatrix) -> Result<MappingClass, TopologyError> {
    if g == 0 {
        return Err(TopologyError::GenusTooSmall);
    }
    if matrix.rows() != 2 * g || matrix.cols() != 2 * g {
        return Err(TopologyError::WrongSize {
            genus: g,
            expected: 2 * g,
            rows: matrix.rows(),
            cols: matrix.cols(),
        });
    }
    let j = standard_form(g);
    if matrix.transpose().mul(&j)?.mul(&matrix)? != j {
        return Err(TopologyError::NotSymplectic);
    }
    Ok(MappingClass { genus: g, fstar: matrix })
}

impl MappingClass {
    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn fstar(&self) -> &IntMatrix {
        &self.fstar
    }

    pub fn one_minus_fstar(&self) -> IntMatrix {
        self.fstar.one_minus().expect("square")
    }

    /// `det(1 - f*)`.
    pub fn lefschetz_det(&self) -> BigInt {
        self.one_minus_fstar().det().expect("square")
    }

    /// `coker(1 - f*)`, the group classifying spin^c structures of fixed degree.
    pub fn torsion_group(&self) -> FinAbGroup {
        zlattice::cokernel(&self.one_minus_fstar())
    }
}
