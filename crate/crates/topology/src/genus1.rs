use std::collections::BTreeMap;

use serde::Serialize;
use zlattice::TorusPoint;

/// One summand `A^{n}` of the holonomy bundle, with its moduli component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HolonomyComponent {
    pub holonomy: String,
    pub multiplicity: usize,
    /// Framed moduli component, `P^{n-1}`.
    pub framed: String,
    /// Unframed component, `T*P^{n-1}`.
    pub unframed: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuliReport {
    pub components: Vec<HolonomyComponent>,
    pub compact: bool,
    /// `N` isolated points in the compact case.
    pub isolated_points: Option<usize>,
}

/// Degree-zero vortex moduli on an elliptic curve for `E = ⊕ A_k^{n_k}`.
///
/// Equal holonomies are grouped; each group of size `n` gives a `T*P^{n-1}`.
pub fn genus1_moduli_structure(holonomies: &[TorusPoint]) -> ModuliReport {
    let mut groups: BTreeMap<&TorusPoint, usize> = BTreeMap::new();
    for h in holonomies {
        *groups.entry(h).or_default() += 1;
    }
    let components: Vec<HolonomyComponent> = groups
        .into_iter()
        .map(|(h, n)| HolonomyComponent {
            holonomy: h.to_string(),
            multiplicity: n,
            framed: format!("P^{}", n - 1),
            unframed: format!("T*P^{}", n - 1),
        })
        .collect();
    let compact = components.iter().all(|c| c.multiplicity == 1);
    ModuliReport {
        isolated_points: compact.then_some(holonomies.len()),
        components,
        compact,
    }
}
