use std::f64::consts::SQRT_2;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use transport::TransportTrace;
use vortexfield::FlatBundleFamily;

use crate::closing::Closing;
use crate::fields::{Config3D, Mesh, Tangent3D};
use crate::ops::{sw_map, vortex_parts};
use crate::{MonopoleError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AssembleOptions {
    /// Number of slices; the trace must hold a state at every `j/m`.
    pub m: usize,
    /// Allowed sup-norm mismatch between `Ξ(0)` and `𝒯Ξ(1)`.
    pub tol: f64,
}

impl AssembleOptions {
    pub fn new(m: usize) -> Self {
        Self { m, tol: 1e-6 }
    }
}

fn round_lift(x: [f64; 2], tol: f64, what: &str) -> Result<[i64; 2]> {
    let r = [x[0].round(), x[1].round()];
    let d = (x[0] - r[0]).hypot(x[1] - r[1]);
    if d > tol {
        return Err(MonopoleError::PeriodicityMismatch(format!("{what} is off the lattice by {d:e}")));
    }
    Ok([r[0] as i64, r[1] as i64])
}

fn sup_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Adiabatic configuration `Ξ₀` from a transport trace: `V = 0`, `b = 0`, `(ᾰ, Φ)` from the
/// trace and `Ψ = Ψ_tr/√2` (the transport normalizes `Ψ` with an extra `√2`).
///
/// The gluing is read off the trace: the active strand must close up under `f*` and the
/// closing permutation, the lifts `n_k`, `m_L` are the integer mismatches of the holonomies,
/// and the constant phase `e^{iχ}` is fitted to `Φ(0)`.
pub fn assemble_adiabatic(trace: &TransportTrace, family: &FlatBundleFamily, opts: &AssembleOptions) -> Result<Config3D> {
    let m = opts.m;
    let curve = trace.curve.clone();
    let (first, last) = (trace.initial(), trace.last());
    if first.t != 0.0 || (last.t - 1.0).abs() > 1e-12 {
        return Err(MonopoleError::InvalidInput("trace must cover [0, 1]".into()));
    }
    let slices = (0..m)
        .map(|j| {
            let t = j as f64 / m as f64;
            trace.states.iter().find(|s| (s.t - t).abs() < 1e-12).ok_or_else(|| {
                MonopoleError::InvalidInput(format!("trace has no state at t = {t}; its steps must be a multiple of {m}"))
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let k = trace.active;
    if family.closing.get(k) != Some(&k) {
        return Err(MonopoleError::PeriodicityMismatch(format!("active summand {k} is not fixed by the closing permutation")));
    }
    let lifts = (0..family.n())
        .map(|i| {
            let end = family.apply_fstar(family.paths[i].at(1.0));
            let start = family.paths[family.closing[i]].at(0.0);
            round_lift([end[0] - start[0], end[1] - start[1]], 1e-9, "summand lift")
        })
        .collect::<Result<Vec<_>>>()?;
    let fz = family.apply_fstar(last.zeta);
    let l_lift = round_lift([fz[0] - first.zeta[0], fz[1] - first.zeta[1]], opts.tol, "holonomy of A")?;

    let closing = Closing::new(&curve, family.fstar, family.closing.clone(), lifts.clone(), l_lift, C64::from(1.0))?;
    let n2 = curve.len();
    let pulled = closing.sections(&concat(&last.phi), false);
    let start = concat(&first.phi);
    let overlap: C64 = start.iter().zip(&pulled).map(|(a, b)| a * b.conj()).sum();
    if overlap.norm() == 0.0 {
        return Err(MonopoleError::PeriodicityMismatch("Φ vanishes at the endpoints".into()));
    }
    let phase = overlap / overlap.norm();
    let closing = Closing::new(&curve, family.fstar, family.closing.clone(), lifts, l_lift, phase)?;

    let checks = [
        ("Φ", sup_diff(&start, &closing.sections(&concat(&last.phi), false))),
        ("Ψ", sup_diff(&concat(&first.psi), &closing.sections(&concat(&last.psi), true))),
        ("ᾰ", sup_diff(&first.alpha, &closing.connection(&curve, &last.alpha))),
    ];
    for (name, d) in checks {
        if d > opts.tol {
            return Err(MonopoleError::PeriodicityMismatch(format!("{name}(0) and the glued {name}(1) differ by {d:e}")));
        }
    }

    let mesh = Arc::new(Mesh::from_family(curve, family, m, closing)?);
    let mut fields = Tangent3D::zeros(m, n2, family.n());
    for (j, s) in slices.iter().enumerate() {
        fields.a[j] = s.alpha.clone();
        fields.phi[j] = concat(&s.phi);
        fields.psi[j] = concat(&s.psi).into_iter().map(|z| z / SQRT_2).collect();
    }
    Config3D::new(mesh, fields)
}

fn concat(s: &[Vec<C64>]) -> Vec<C64> {
    s.iter().flatten().copied().collect()
}

/// Sup-norm residuals of the four adiabatic equations: the first two components of
/// `SW`, the vortex moment `⋆F_α - ½|Φ|² + τ` and `𝔡Φ`.
pub fn adiabatic_residual(cfg: &Config3D) -> [f64; 4] {
    let sw = sw_map(cfg, 1.0);
    let (moment, dphi) = vortex_parts(cfg);
    let sup_c = |x: &[Vec<C64>]| x.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    [
        sup_c(&sw.a),
        sup_c(&sw.phi),
        moment.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max),
        sup_c(&dphi),
    ]
}
