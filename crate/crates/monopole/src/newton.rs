use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use vortexfield::FlatCurve;

use crate::fields::{Config3D, Tangent3D};
use crate::norms::weighted_norm;
use crate::ops::{linearize_apply, sw_map};
use crate::{MonopoleError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOptions {
    /// Stop once `‖SW_ε(Ξ_k)‖_{0,2,ε}` drops below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Relative residual for each linear solve.
    pub linear_tol: f64,
    pub max_linear_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_iter: 12, linear_tol: 1e-11, max_linear_iter: 4000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonLogEntry {
    pub k: usize,
    pub residual_0_2_eps: f64,
    /// `‖ξ_k‖_{1,2,ε}` of the increment that produced this iterate (0 for the start).
    pub increment_1_2_eps: f64,
    pub linear_iterations: usize,
}

#[derive(Debug, Clone)]
pub struct NewtonResult {
    pub config: Config3D,
    pub log: Vec<NewtonLogEntry>,
    pub converged: bool,
}

impl NewtonResult {
    /// One JSON object per iterate: `k`, `residual_0_2_eps`, `increment_1_2_eps`.
    pub fn log_json_lines(&self) -> String {
        self.log
            .iter()
            .map(|e| {
                serde_json::json!({
                    "k": e.k,
                    "residual_0_2_eps": e.residual_0_2_eps,
                    "increment_1_2_eps": e.increment_1_2_eps,
                })
                .to_string()
                    + "\n"
            })
            .collect()
    }
}

/// Fourier-diagonal approximation of `|H|⁻¹`, `H` the `ε`-scaled symmetric form of `D_ε`:
/// `1/√(ω² + ε⁻²s(k))` with `s` the constant-coefficient symbol of `K*K` on each slot.
struct Preconditioner {
    curve: FlatCurve,
    m: usize,
    nsum: usize,
    eps: f64,
    /// Spatial symbols for `a`, `v`/`c` and per summand for `φ`/`ψ`.
    form: Vec<f64>,
    scalar: Vec<f64>,
    section: Vec<Vec<f64>>,
}

impl Preconditioner {
    fn new(cfg: &Config3D, eps: f64) -> Self {
        let (mesh, f) = (&*cfg.mesh, &cfg.fields);
        let (m, n2, nsum) = (cfg.m(), mesh.n2(), mesh.nsum);
        let (k1, k2) = (mesh.curve.k1(), mesh.curve.k2());
        let count = (m * n2) as f64;
        let phi2: Vec<f64> = (0..nsum)
            .map(|k| f.phi.iter().map(|s| s[k * n2..(k + 1) * n2].iter().map(|z| z.norm_sqr()).sum::<f64>()).sum::<f64>() / count)
            .collect();
        let total: f64 = phi2.iter().sum();
        let lap: Vec<f64> = (0..n2).map(|j| k1[j].powi(2) + k2[j].powi(2)).collect();
        let section = (0..nsum)
            .map(|k| {
                let mean: C64 = (0..m).map(|j| f.a[j].iter().sum::<C64>() / n2 as f64 + mesh.beta[j][k]).sum::<C64>() / m as f64;
                (0..n2).map(|j| (C64::new(-k2[j], k1[j]) + C64::i() * mean).norm_sqr() + phi2[k]).collect()
            })
            .collect();
        Self {
            curve: mesh.curve.clone(),
            m,
            nsum,
            eps,
            form: lap.iter().map(|l| l + total).collect(),
            scalar: lap.iter().map(|l| l + total).collect(),
            section,
        }
    }

    /// Space-time multiplier on one slot, data indexed `[slice][point]`.
    fn apply_field(&self, x: &[Vec<C64>], sym: &[f64]) -> Vec<Vec<C64>> {
        let (m, n2) = (self.m, sym.len());
        let mut spec: Vec<Vec<C64>> = x
            .iter()
            .map(|s| {
                let mut h = s.clone();
                self.curve.fft(&mut h);
                h
            })
            .collect();
        let mut planner = FftPlanner::new();
        let (fwd, inv) = (planner.plan_fft_forward(m), planner.plan_fft_inverse(m));
        let e2 = 1.0 / (self.eps * self.eps);
        let mut line = vec![C64::default(); m];
        for p in 0..n2 {
            for j in 0..m {
                line[j] = spec[j][p];
            }
            fwd.process(&mut line);
            for (l, z) in line.iter_mut().enumerate() {
                let ll = if l <= m / 2 { l as f64 } else { l as f64 - m as f64 };
                let w = TAU * ll;
                *z /= (w * w + e2 * sym[p]).sqrt() * m as f64;
            }
            inv.process(&mut line);
            for j in 0..m {
                spec[j][p] = line[j];
            }
        }
        spec.into_iter()
            .map(|mut h| {
                self.curve.ifft(&mut h);
                h
            })
            .collect()
    }

    fn apply(&self, r: &Tangent3D) -> Tangent3D {
        let n2 = self.form.len();
        let real = |x: &[Vec<f64>]| -> Vec<Vec<f64>> {
            let xc: Vec<Vec<C64>> = x.iter().map(|s| s.iter().map(|&v| C64::from(v)).collect()).collect();
            self.apply_field(&xc, &self.scalar).into_iter().map(|s| s.into_iter().map(|z| z.re).collect()).collect()
        };
        let summands = |x: &[Vec<C64>]| -> Vec<Vec<C64>> {
            let mut out = vec![Vec::with_capacity(n2 * self.nsum); self.m];
            for k in 0..self.nsum {
                let part: Vec<Vec<C64>> = x.iter().map(|s| s[k * n2..(k + 1) * n2].to_vec()).collect();
                for (o, p) in out.iter_mut().zip(self.apply_field(&part, &self.section[k])) {
                    o.extend(p);
                }
            }
            out
        };
        Tangent3D {
            a: self.apply_field(&r.a, &self.form),
            phi: summands(&r.phi),
            v: real(&r.v),
            c: real(&r.c),
            psi: summands(&r.psi),
        }
    }
}

/// `E = diag(1, 1, ε, ε, ε)` on `(a, φ, v, c, ψ)`, in place; `inverse` divides.
fn scale_e(t: &mut Tangent3D, eps: f64, inverse: bool) {
    let s = if inverse { 1.0 / eps } else { eps };
    t.v.iter_mut().chain(t.c.iter_mut()).flatten().for_each(|x| *x *= s);
    t.psi.iter_mut().flatten().for_each(|z| *z *= s);
}

fn dot(a: &Tangent3D, b: &Tangent3D) -> f64 {
    a.pairing(b, 1.0, 1.0)
}

/// Solves `D_ε ξ = r` by preconditioned MINRES on `H = E D_ε E⁻¹`, which is symmetric for
/// the unweighted pairing because `D_ε` is self-adjoint for the `ε`-weighted one.
pub(crate) fn solve_linear(cfg: &Config3D, r: &Tangent3D, eps: f64, tol: f64, max_iter: usize) -> Result<(Tangent3D, usize)> {
    let pre = Preconditioner::new(cfg, eps);
    let h = |z: &Tangent3D| {
        let mut xi = z.clone();
        scale_e(&mut xi, eps, true);
        let mut d = linearize_apply(cfg, &xi, eps);
        scale_e(&mut d, eps, false);
        d
    };
    let mut b = r.clone();
    scale_e(&mut b, eps, false);

    let mut x = b.zeros_like();
    let mut r1 = b.clone();
    let mut y = pre.apply(&r1);
    let beta1 = dot(&r1, &y).sqrt();
    if beta1 == 0.0 {
        return Ok((x, 0));
    }
    let (mut oldb, mut beta, mut dbar, mut epsln, mut phibar) = (0.0, beta1, 0.0, 0.0, beta1);
    let (mut cs, mut sn) = (-1.0, 0.0);
    let (mut w, mut w2) = (b.zeros_like(), b.zeros_like());
    let mut r2 = r1.clone();
    let mut itn = 0;
    while itn < max_iter {
        itn += 1;
        let v = y.scaled(1.0 / beta);
        y = h(&v);
        if itn >= 2 {
            y.axpy(-beta / oldb, &r1);
        }
        let alfa = dot(&v, &y);
        y.axpy(-alfa / beta, &r2);
        r1 = r2;
        r2 = y.clone();
        y = pre.apply(&r2);
        oldb = beta;
        let b2 = dot(&r2, &y);
        if b2 < 0.0 {
            return Err(MonopoleError::LinearSolveFailure { iterations: itn, residual: phibar / beta1 });
        }
        beta = b2.sqrt();
        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;
        let w1 = std::mem::replace(&mut w2, w);
        let mut nw = v;
        nw.axpy(-oldeps, &w1);
        nw.axpy(-delta, &w2);
        w = nw.scaled(1.0 / gamma);
        x.axpy(phi, &w);
        if phibar / beta1 < tol || beta == 0.0 {
            break;
        }
    }
    let mut res = h(&x);
    res.axpy(-1.0, &b);
    let rel = dot(&res, &res).sqrt() / dot(&b, &b).sqrt();
    if rel.is_nan() || rel >= tol.max(1e-13) * 1e3 {
        return Err(MonopoleError::LinearSolveFailure { iterations: itn, residual: rel });
    }
    scale_e(&mut x, eps, true);
    Ok((x, itn))
}

/// Gauge-fixed Newton iteration `D_ε(Ξ_k)ξ_k = -P·SW_ε(Ξ_k)`, where `P` flips the signs of
/// the second and fifth components to match the row layout of `D_ε`. The third row of `D_ε`
/// is the Coulomb condition, so each increment satisfies it by construction.
pub fn newton_refine(start: &Config3D, eps: f64, opts: &NewtonOptions) -> Result<NewtonResult> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(MonopoleError::InvalidInput(format!("ε must be positive, got {eps}")));
    }
    let mut cfg = start.clone();
    let mut sw = sw_map(&cfg, eps);
    let mut res = weighted_norm(&cfg, &sw, eps, 2.0).zero;
    let mut log = vec![NewtonLogEntry { k: 0, residual_0_2_eps: res, increment_1_2_eps: 0.0, linear_iterations: 0 }];
    let mut rises = 0;
    for k in 1..=opts.max_iter {
        if res < opts.tol {
            return Ok(NewtonResult { config: cfg, log, converged: true });
        }
        let mut rhs = sw.scaled(-1.0);
        rhs.phi.iter_mut().chain(rhs.psi.iter_mut()).flatten().for_each(|z| *z = -*z);
        rhs.v.iter_mut().flatten().for_each(|x| *x = 0.0);
        let (xi, its) = solve_linear(&cfg, &rhs, eps, opts.linear_tol, opts.max_linear_iter)?;
        let inc = weighted_norm(start, &xi, eps, 2.0).one;
        cfg = cfg.plus(&xi);
        sw = sw_map(&cfg, eps);
        let new = weighted_norm(&cfg, &sw, eps, 2.0).zero;
        log.push(NewtonLogEntry { k, residual_0_2_eps: new, increment_1_2_eps: inc, linear_iterations: its });
        rises = if new > res { rises + 1 } else { 0 };
        if rises >= 2 {
            return Err(MonopoleError::Divergence { iteration: k, residual: new, log });
        }
        res = new;
    }
    let converged = res < opts.tol;
    Ok(NewtonResult { config: cfg, log, converged })
}
