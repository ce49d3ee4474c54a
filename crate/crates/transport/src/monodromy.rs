use braid::{Permutation, ValidBraid};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use vortexfield::{vortex_solve, FlatBundleFamily, FlatCurve, HolonomyPath, TauProfile};

use crate::flow::{transport_opts, TransportOptions, TransportTrace};
use crate::{toroidal_distance, TransportError};

/// Flat bundle family whose summand holonomies follow the braid strands.
pub fn family_from_braid(b: &ValidBraid, tau: TauProfile) -> FlatBundleFamily {
    let f = |x: &num_rational::BigRational| x.to_f64().expect("breakpoints are finite");
    let paths = b
        .strands()
        .iter()
        .map(|s| HolonomyPath::Polyline {
            times: s.breakpoints().iter().map(|bp| f(&bp.t)).collect(),
            points: s.breakpoints().iter().map(|bp| [f(&bp.p[0]), f(&bp.p[1])]).collect(),
        })
        .collect();
    let m = b.mapping_class().fstar().to_i64().expect("genus-1 monodromy fits in i64");
    FlatBundleFamily {
        paths,
        fstar: [[m[0], m[1]], [m[2], m[3]]],
        closing: b.closing_permutation().images().to_vec(),
        tau,
    }
}

#[derive(Debug, Clone)]
pub struct MonodromyReport {
    pub permutation: Permutation,
    /// Distance from `f*(-ζ(1))` to the matched strand start, per strand.
    pub match_distances: Vec<f64>,
    pub traces: Vec<TransportTrace>,
}

impl MonodromyReport {
    pub fn max_moment_residual(&self) -> f64 {
        self.traces.iter().map(TransportTrace::max_moment_residual).fold(0.0, f64::max)
    }
}

pub fn numeric_monodromy(
    curve: &FlatCurve,
    family: &FlatBundleFamily,
    braid: &ValidBraid,
    steps: usize,
) -> Result<Permutation, TransportError> {
    Ok(numeric_monodromy_report(curve, family, braid, &TransportOptions::new(steps))?.permutation)
}

/// Transports the vortex seeded on every strand and matches the end holonomy against
/// the strand starts, after gluing by `f*`.
pub fn numeric_monodromy_report(
    curve: &FlatCurve,
    family: &FlatBundleFamily,
    braid: &ValidBraid,
    opts: &TransportOptions,
) -> Result<MonodromyReport, TransportError> {
    if family.n() != braid.n() || family.closing != braid.closing_permutation().images() {
        return Err(TransportError::InvalidInput("family was not built from this braid".into()));
    }
    family.validate(curve, 8)?;
    let hol0 = family.holonomies(0.0);
    let tau0 = family.tau.tau(curve, 0.0);
    let traces = (0..family.n())
        .into_par_iter()
        .map(|k| {
            let start = vortex_solve(curve, &hol0, k, &tau0)?;
            transport_opts(curve, family, &start, opts)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let tol = opts.match_tol();
    let mut images = Vec::with_capacity(traces.len());
    let mut match_distances = Vec::with_capacity(traces.len());
    for (k, tr) in traces.iter().enumerate() {
        let z = tr.last().zeta;
        let p = family.apply_fstar([-z[0], -z[1]]);
        let d: Vec<f64> = hol0.iter().map(|&a| toroidal_distance(p, a)).collect();
        let close: Vec<usize> = (0..d.len()).filter(|&j| d[j] < tol).collect();
        match close.as_slice() {
            [j] => {
                images.push(*j);
                match_distances.push(d[*j]);
            }
            [] => {
                return Err(TransportError::Unmatched { strand: k + 1, distance: d.iter().copied().fold(f64::INFINITY, f64::min) })
            }
            many => {
                return Err(TransportError::AmbiguousMatch { strand: k + 1, candidates: many.iter().map(|j| j + 1).collect() })
            }
        }
    }
    let permutation = Permutation::new(images.clone()).ok_or_else(|| {
        let j = images.iter().find(|j| images.iter().filter(|i| i == j).count() > 1).copied().unwrap_or(0);
        TransportError::AmbiguousMatch {
            strand: j + 1,
            candidates: (0..images.len()).filter(|&k| images[k] == j).map(|k| k + 1).collect(),
        }
    })?;
    Ok(MonodromyReport { permutation, match_distances, traces })
}
