#![allow(dead_code)]

use monopole::*;
use transport::transport;
use vortexfield::*;

pub fn circle_family(tau: TauProfile) -> FlatBundleFamily {
    FlatBundleFamily {
        paths: vec![
            HolonomyPath::Circle { center: [0.25, 0.25], radius: 0.05, turns: 1.0, phase: 0.0 },
            HolonomyPath::constant([0.7, 0.6]),
        ],
        fstar: [[1, 0], [0, 1]],
        closing: vec![0, 1],
        tau,
    }
}

pub fn wavy_tau() -> TauProfile {
    TauProfile { mean: 1.0, amp: 0.15, osc: 0.0, mode: [1, 1] }
}

/// `Ξ₀` for `fam` on an `n×n` grid with `m` slices, transported with `steps` substeps per slice.
pub fn adiabatic(fam: &FlatBundleFamily, n: usize, m: usize, steps: usize) -> Config3D {
    let curve = FlatCurve::square(n).unwrap();
    let start = vortex_solve(&curve, &fam.holonomies(0.0), 0, &fam.tau.tau(&curve, 0.0)).unwrap();
    let trace = transport(&curve, fam, &start, m * steps).unwrap();
    assemble_adiabatic(&trace, fam, &AssembleOptions::new(m)).unwrap()
}

pub fn default_config() -> Config3D {
    adiabatic(&circle_family(TauProfile::constant(1.0)), 16, 16, 4)
}
