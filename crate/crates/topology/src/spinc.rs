use std::fmt;

use zlattice::{GroupElement, TorusPoint};

use crate::{MappingClass, TopologyError};

/// Spin^c structure on the mapping torus: fiber degree plus a coset of `coker(1 - f*)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinCClass {
    pub degree: i64,
    pub torsion_class: GroupElement,
}

impl fmt::Display for SpinCClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={} {}", self.degree, self.torsion_class)
    }
}

/// All degree-`d` classes, one per element of `coker(1 - f*)`, in lexicographic order.
pub fn spinc_classes(mc: &MappingClass, d: i64) -> Result<Vec<SpinCClass>, TopologyError> {
    let group = mc.torsion_group();
    let Some(elements) = group.elements() else {
        return Err(TopologyError::InfiniteFamily {
            group: group.to_string(),
            free_rank: group.free_rank(),
        });
    };
    Ok(elements
        .into_iter()
        .map(|torsion_class| SpinCClass { degree: d, torsion_class })
        .collect())
}

/// A fixed point of the Jacobian monodromy with its homotopy-class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPoint {
    pub point: TorusPoint,
    /// Class of the integer vector `(1 - f*) x` in `coker(1 - f*)`.
    pub label: GroupElement,
}

/// Fixed points of `f*` on `R^{2g} / Z^{2g}`, each labelled by `[(1 - f*) x]`.
///
/// Fixed points of `f*` and of its inverse coincide, so this is also the fixed set
/// of the monodromy on the Jacobian.
pub fn jacobian_fixed_points(mc: &MappingClass) -> Result<Vec<FixedPoint>, TopologyError> {
    let a = mc.one_minus_fstar();
    let points = zlattice::torsion_fixed_points(&a).map_err(|e| match e {
        zlattice::LatticeError::NonIsolatedFixedSet => TopologyError::NonIsolatedFixedSet,
        other => other.into(),
    })?;
    let group = mc.torsion_group();
    Ok(points
        .into_iter()
        .map(|point| {
            let image: Vec<_> = point.image(&a).into_iter().map(|q| q.to_integer()).collect();
            let label = group.normalize(&image);
            FixedPoint { point, label }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate_mapping_class;
    use zlattice::IntMatrix;

    #[test]
    fn minus_identity_four_classes() {
        let mc = validate_mapping_class(1, IntMatrix::from_rows(&[&[-1, 0], &[0, -1]])).unwrap();
        let classes = spinc_classes(&mc, 0).unwrap();
        assert_eq!(classes.len(), 4);
        assert!(classes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn identity_is_infinite() {
        let mc = validate_mapping_class(1, IntMatrix::identity(2)).unwrap();
        assert_eq!(
            spinc_classes(&mc, 3),
            Err(TopologyError::InfiniteFamily { group: "Z^2".into(), free_rank: 2 })
        );
        assert_eq!(jacobian_fixed_points(&mc), Err(TopologyError::NonIsolatedFixedSet));
    }
}
