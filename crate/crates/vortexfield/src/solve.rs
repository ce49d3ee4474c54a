use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::curve::{complexify, re, sup_norm, sup_norm_c};
use crate::{dbar_op, FlatCurve, VortexError};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Largest grid for which Newton steps use a dense Cholesky factorization.
pub const DENSE_MAX_N: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Required sup-norm of the moment residual.
    pub tol: f64,
    /// Newton stops once the sup-norm of an increment drops below this.
    pub step_tol: f64,
    pub max_iter: usize,
    /// Warm start for the potential `u`.
    pub initial_u: Option<Vec<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-10, step_tol: 1e-9, max_iter: 50, initial_u: None }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NewtonReport {
    /// Sup-norm of each Newton increment.
    pub increments: Vec<f64>,
    /// Sup-norm of the Kazdan–Warner residual before each step, then after the last.
    pub residuals: Vec<f64>,
}

/// Framed vortex on a split bundle `E = ⊕ A_k`: only the active summand carries `Φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct VortexConfig {
    pub curve: FlatCurve,
    /// Lifted holonomies `ã_j` of the summands.
    pub holonomies: Vec<[f64; 2]>,
    pub active: usize,
    /// Constant part of the line-bundle connection, `α_flat = 2π(ζ_X dx + ζ_Y dy)`.
    pub zeta: [f64; 2],
    /// Complex-gauge potential: `Φ = e^u Φ₀`, `ᾰ = ᾰ_flat + iD̄u`.
    pub u: Vec<f64>,
    /// Full connection form `ᾰ` of the line bundle.
    pub alpha: Vec<C64>,
    pub phi: Vec<Vec<C64>>,
    pub newton: NewtonReport,
}

fn flat_form(curve: &FlatCurve, a: [f64; 2]) -> C64 {
    curve.lattice_to_frame([TWO_PI * a[0], TWO_PI * a[1]])
}

impl VortexConfig {
    /// `ᾰ + β̆_j`, the connection seen by the `j`-th component of `Φ`.
    pub fn summand_alpha(&self, j: usize) -> Vec<C64> {
        let b = flat_form(&self.curve, self.holonomies[j]);
        self.alpha.iter().map(|a| a + b).collect()
    }

    pub fn phi_norm_sq(&self) -> f64 {
        self.phi.iter().map(|f| self.curve.norm_sq(f)).sum()
    }

    /// Sup-norm of `∂̄_{A}Φ` over all components.
    pub fn dbar_residual(&self) -> f64 {
        (0..self.phi.len())
            .map(|j| sup_norm_c(&dbar_op(&self.curve, &self.summand_alpha(j), &self.phi[j])))
            .fold(0.0, f64::max)
    }

    /// `Σ_j |Φ_j|²` on the grid.
    pub fn phi_density(&self) -> Vec<f64> {
        phi_density(&self.phi, self.curve.len())
    }
}

pub fn phi_density(phi: &[Vec<C64>], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for f in phi {
        for (o, z) in out.iter_mut().zip(f) {
            *o += z.norm_sqr();
        }
    }
    out
}

/// `curl α - ½|Φ|² + τ`; the moment map is `i` times this.
pub fn moment_field(curve: &FlatCurve, alpha: &[C64], phi: &[Vec<C64>], tau: &[f64]) -> Vec<f64> {
    let curl = curve.d(alpha);
    let dens = phi_density(phi, curve.len());
    curl.iter().zip(&dens).zip(tau).map(|((c, r), t)| c.im - 0.5 * r + t).collect()
}

/// Sup-norm of `⋆F_A - (i/2)|Φ|² + iτ`.
pub fn moment_residual(cfg: &VortexConfig, tau: &[f64]) -> f64 {
    sup_norm(&moment_field(&cfg.curve, &cfg.alpha, &cfg.phi, tau))
}

/// Dense matrix of the spectral Laplacian, a circulant in both grid directions.
fn dense_laplacian(curve: &FlatCurve) -> DMatrix<f64> {
    let n = curve.n();
    let mut delta = vec![C64::default(); curve.len()];
    delta[0] = C64::from(1.0);
    let kernel = re(&curve.laplacian(&delta));
    DMatrix::from_fn(curve.len(), curve.len(), |p, q| {
        let dx = (p % n + n - q % n) % n;
        let dy = (p / n + n - q / n) % n;
        kernel[dy * n + dx]
    })
}

/// Solves `(-Δ + w) x = b` for positive `w` by preconditioned conjugate gradients.
fn cg_solve(curve: &FlatCurve, w: &[f64], b: &[f64]) -> Vec<f64> {
    let apply = |x: &[f64]| -> Vec<f64> {
        let lx = curve.laplacian_real(x);
        lx.iter().zip(x).zip(w).map(|((l, xi), wi)| -l + wi * xi).collect()
    };
    let wbar = w.iter().sum::<f64>() / w.len() as f64;
    let precond = |r: &[f64]| -> Vec<f64> {
        re(&curve.multiplier(&complexify(r), |j| {
            C64::from(1.0 / (curve.k1()[j].powi(2) + curve.k2()[j].powi(2) + wbar))
        }))
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut x = vec![0.0; b.len()];
    let mut r = b.to_vec();
    let mut z = precond(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let bnorm = dot(b, b).sqrt().max(f64::MIN_POSITIVE);
    for _ in 0..1000 {
        if dot(&r, &r).sqrt() <= 1e-14 * bnorm {
            break;
        }
        let ap = apply(&p);
        let a = rz / dot(&p, &ap);
        x.iter_mut().zip(&p).for_each(|(xi, pi)| *xi += a * pi);
        r.iter_mut().zip(&ap).for_each(|(ri, api)| *ri -= a * api);
        z = precond(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
    }
    x
}

/// Kazdan–Warner residual `Δu - e^{2u} + τ`.
fn kw_residual(curve: &FlatCurve, u: &[f64], tau: &[f64]) -> Vec<f64> {
    let lu = curve.laplacian_real(u);
    lu.iter().zip(u).zip(tau).map(|((l, ui), t)| l - (2.0 * ui).exp() + t).collect()
}

/// Newton iteration for `Δu - e^{2u} + τ = 0`.
pub fn kazdan_warner(curve: &FlatCurve, tau: &[f64], opts: &SolveOptions) -> Result<(Vec<f64>, NewtonReport), VortexError> {
    let mean_tau = curve.integrate(tau) / curve.area();
    if !(mean_tau > 0.0) {
        return Err(VortexError::NonPositiveTau { mean: mean_tau });
    }
    let mut u = match &opts.initial_u {
        Some(u0) if u0.len() == curve.len() => u0.clone(),
        Some(u0) => return Err(VortexError::InvalidField(format!("warm start has {} samples", u0.len()))),
        None => vec![0.5 * mean_tau.ln(); curve.len()],
    };
    let dense = (curve.n() <= DENSE_MAX_N).then(|| dense_laplacian(curve));
    let mut report = NewtonReport::default();
    for _ in 0..opts.max_iter {
        let g = kw_residual(curve, &u, tau);
        let res = sup_norm(&g);
        report.residuals.push(res);
        if res < opts.tol * 1e-3 {
            return Ok((u, report));
        }
        let w: Vec<f64> = u.iter().map(|x| 2.0 * (2.0 * x).exp()).collect();
        // (Δ - 2e^{2u}) δ = -G  <=>  (-Δ + 2e^{2u}) δ = G
        let delta = match &dense {
            Some(l) => {
                let mut a = -l.clone();
                for (i, wi) in w.iter().enumerate() {
                    a[(i, i)] += wi;
                }
                let chol = a.cholesky().ok_or(VortexError::NonConvergence {
                    iterations: report.increments.len(),
                    residual: res,
                })?;
                chol.solve(&DVector::from_vec(g.clone())).data.into()
            }
            None => cg_solve(curve, &w, &g),
        };
        u.iter_mut().zip(&delta).for_each(|(ui, d)| *ui += d);
        let step = sup_norm(&delta);
        report.increments.push(step);
        if step < opts.step_tol {
            let res = sup_norm(&kw_residual(curve, &u, tau));
            report.residuals.push(res);
            if res < opts.tol {
                return Ok((u, report));
            }
        }
    }
    Err(VortexError::NonConvergence {
        iterations: report.increments.len(),
        residual: *report.residuals.last().unwrap_or(&f64::NAN),
    })
}

/// Solves the framed vortex equations with `Φ` in summand `k` (so `ζ = -ã_k`).
pub fn vortex_solve(curve: &FlatCurve, holonomies: &[[f64; 2]], k: usize, tau: &[f64]) -> Result<VortexConfig, VortexError> {
    vortex_solve_opts(curve, holonomies, k, tau, &SolveOptions::default())
}

pub fn vortex_solve_opts(
    curve: &FlatCurve,
    holonomies: &[[f64; 2]],
    k: usize,
    tau: &[f64],
    opts: &SolveOptions,
) -> Result<VortexConfig, VortexError> {
    let a = *holonomies
        .get(k)
        .ok_or_else(|| VortexError::InvalidField(format!("summand {k} of {}", holonomies.len())))?;
    solve_with_zeta(curve, holonomies, k, [-a[0], -a[1]], tau, opts)
}

/// Finds the summand with `ã_k + ζ ∈ Z²` and solves there.
pub fn vortex_solve_with_holonomy(
    curve: &FlatCurve,
    holonomies: &[[f64; 2]],
    zeta: [f64; 2],
    tau: &[f64],
) -> Result<VortexConfig, VortexError> {
    let matches: Vec<usize> = (0..holonomies.len())
        .filter(|&j| (0..2).all(|c| {
            let s = holonomies[j][c] + zeta[c];
            (s - s.round()).abs() < 1e-9
        }))
        .collect();
    match matches.as_slice() {
        [] => Err(VortexError::NoHolomorphicSection { zeta }),
        [k] => solve_with_zeta(curve, holonomies, *k, zeta, tau, &SolveOptions::default()),
        [a, b, ..] => Err(VortexError::CoincidentHolonomies { a: *a, b: *b }),
    }
}

fn solve_with_zeta(
    curve: &FlatCurve,
    holonomies: &[[f64; 2]],
    k: usize,
    zeta: [f64; 2],
    tau: &[f64],
    opts: &SolveOptions,
) -> Result<VortexConfig, VortexError> {
    if tau.len() != curve.len() {
        return Err(VortexError::InvalidField(format!("tau has {} samples, grid has {}", tau.len(), curve.len())));
    }
    let (u, newton) = kazdan_warner(curve, tau, opts)?;
    // total flat connection on summand k is 2π m·dx with m integral
    let m = [(holonomies[k][0] + zeta[0]).round(), (holonomies[k][1] + zeta[1]).round()];
    let du = curve.dbar(&complexify(&u));
    let flat = flat_form(curve, zeta);
    let alpha: Vec<C64> = du.iter().map(|d| flat + C64::i() * d).collect();
    let mut phi = vec![vec![C64::default(); curve.len()]; holonomies.len()];
    phi[k] = (0..curve.len())
        .map(|p| {
            let (x, y) = curve.point(p);
            let gauge = C64::from_polar(1.0, -TWO_PI * (m[0] * x + m[1] * y));
            gauge * (std::f64::consts::SQRT_2 * u[p].exp())
        })
        .collect();
    Ok(VortexConfig { curve: curve.clone(), holonomies: holonomies.to_vec(), active: k, zeta, u, alpha, phi, newton })
}
