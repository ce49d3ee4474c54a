use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vortexfield::mode_index;

use crate::closing::FieldKind;
use crate::fields::{Config3D, Mesh, Tangent3D};
use crate::ops::{dbar_k, pair, Blocks};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Sup residuals of the three operator identities over a batch of test vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    /// `L*M y - Re Σ(∇_tΨ)ψ̄`.
    pub identity0: f64,
    /// `N G v + S* L v`.
    pub identity1: f64,
    /// `N S* y + G L* y + S* M y - R_Ξ y`.
    pub identity2: f64,
    pub samples: usize,
}

fn low_pass_space(mesh: &Mesh, f: &[C64], modes: i64) -> Vec<C64> {
    let n = mesh.curve.n();
    mesh.curve.multiplier(f, |j| {
        let ok = [j % n, j / n].iter().all(|&i| mode_index(i, n).is_some_and(|k| k.abs() <= modes));
        C64::from(if ok { 1.0 } else { 0.0 })
    })
}

fn noise(rng: &mut ChaCha8Rng, m: usize, len: usize, complex: bool) -> Vec<Vec<C64>> {
    (0..m)
        .map(|_| {
            (0..len)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), if complex { rng.gen_range(-1.0..1.0) } else { 0.0 }))
                .collect()
        })
        .collect()
}

/// Random tangent vector with spatial modes `|k| ≤ modes` and (Floquet) temporal modes
/// `|ω| ≤ 2π·modes` (Nyquist dropped), scaled to unit sup-norm. Band-limited data keeps the discrete product
/// rules exact.
pub fn band_limited_tangent(mesh: &Mesh, modes: i64, seed: u64) -> Tangent3D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m, n2, nsum) = (mesh.m, mesh.n2(), mesh.nsum);
    let cut = TAU * modes as f64 + 1e-9;
    let filter = |x: Vec<Vec<C64>>, kind: FieldKind| -> Vec<Vec<C64>> {
        let x = mesh.t_multiplier(kind, &x, |w, nyquist| if !nyquist && w.abs() <= cut { 1.0 } else { 0.0 });
        x.into_iter()
            .map(|s| s.chunks(n2).flat_map(|c| low_pass_space(mesh, c, modes)).collect())
            .collect()
    };
    let real = |x: Vec<Vec<C64>>| -> Vec<Vec<f64>> { x.into_iter().map(|s| s.into_iter().map(|z| z.re).collect()).collect() };
    let mut t = Tangent3D {
        a: filter(noise(&mut rng, m, n2, true), FieldKind::Form),
        phi: filter(noise(&mut rng, m, n2 * nsum, true), FieldKind::Section),
        v: real(filter(noise(&mut rng, m, n2, false), FieldKind::Scalar)),
        c: real(filter(noise(&mut rng, m, n2, false), FieldKind::Scalar)),
        psi: filter(noise(&mut rng, m, n2 * nsum, true), FieldKind::FormSection),
    };
    let s = t.sup_norm();
    if s > 0.0 {
        t = t.scaled(1.0 / s);
    }
    t
}

/// `Φ_k += amp·cos 2πt` on every summand, a deliberate violation of the equations.
pub fn perturb_phi(cfg: &Config3D, amp: f64) -> Config3D {
    let mut out = cfg.clone();
    for (j, s) in out.fields.phi.iter_mut().enumerate() {
        let w = amp * (TAU * j as f64 / cfg.m() as f64).cos();
        s.iter_mut().for_each(|z| *z += w);
    }
    out
}

fn sup_x(t: &Tangent3D) -> f64 {
    t.a.iter().chain(&t.phi).flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `∇_tΦ = Φ̇ + ib_rΦ` on every slice.
fn nabla_phi(cfg: &Config3D) -> Vec<Vec<C64>> {
    let f = &cfg.fields;
    let n2 = cfg.mesh.n2();
    let mut d = cfg.mesh.dt_sections(&f.phi);
    for (j, s) in d.iter_mut().enumerate() {
        s.iter_mut().enumerate().for_each(|(q, z)| *z += I * f.c[j][q % n2] * f.phi[j][q]);
    }
    d
}

/// `R_Ξ y` with `R_a = -Σ[ψ·conj(∇_tΦ) + i(𝔡Ψ)ψ̄]` and
/// `R_φ = -2ic∇_tΦ - i[∇_t, 𝔡*]ψ + Ψ·Σψ̄Φ - Φ·ΣΨψ̄`, where the commutator is the
/// multiplication operator `[∇_t, 𝔡*_k] = i(Db_r) - i·conj(ᾰ̇ + β̆̇_k)`.
fn remainder(cfg: &Config3D, y: &Tangent3D) -> Tangent3D {
    let (mesh, f) = (&*cfg.mesh, &cfg.fields);
    let (m, n2, nsum) = (cfg.m(), mesh.n2(), mesh.nsum);
    let nphi = nabla_phi(cfg);
    let adot = mesh.dt_connection(&f.a);
    let mut out = f.zeros_like();
    for j in 0..m {
        let db = mesh.curve.d(&f.c[j].iter().map(|&b| C64::from(b)).collect::<Vec<_>>());
        let dpsi: Vec<C64> =
            (0..nsum).flat_map(|k| dbar_k(mesh, j, &f.a[j], k, &f.psi[j][k * n2..(k + 1) * n2])).collect();
        let t1 = pair(&y.psi[j], &nphi[j], n2);
        let t2 = pair(&dpsi, &y.psi[j], n2);
        out.a[j] = t1.iter().zip(&t2).map(|(a, b)| -(a + I * b)).collect();
        let psibar_phi = pair(&f.phi[j], &y.psi[j], n2);
        let psi_psibar = pair(&f.psi[j], &y.psi[j], n2);
        out.phi[j] = (0..n2 * nsum)
            .map(|q| {
                let (k, p) = (q / n2, q % n2);
                let comm = I * db[p] - I * (adot[j][p] + mesh.beta_dot[j][k]).conj();
                -2.0 * I * y.c[j][p] * nphi[j][q] - I * comm * y.psi[j][q] + f.psi[j][q] * psibar_phi[p]
                    - f.phi[j][q] * psi_psibar[p]
            })
            .collect();
    }
    out
}

/// Residuals over `samples` random test vectors with spatial and temporal band `modes`.
pub fn identity_check(cfg: &Config3D, samples: usize, modes: i64, seed: u64) -> IdentityReport {
    let b = Blocks::new(cfg);
    let (mesh, f) = (&*cfg.mesh, &cfg.fields);
    let n2 = mesh.n2();
    let nabla_psi = {
        let mut d = mesh.dt_form_sections(&f.psi);
        for (j, s) in d.iter_mut().enumerate() {
            s.iter_mut().enumerate().for_each(|(q, z)| *z += I * f.c[j][q % n2] * f.psi[j][q]);
        }
        d
    };
    let mut rep = IdentityReport { identity0: 0.0, identity1: 0.0, identity2: 0.0, samples };
    for s in 0..samples {
        let xi = band_limited_tangent(mesh, modes, seed.wrapping_add(s as u64));

        let lm = b.l_adj(&b.m(&xi));
        let r0 = (0..cfg.m())
            .flat_map(|j| {
                let rhs = pair(&nabla_psi[j], &xi.psi[j], n2);
                lm.v[j].iter().zip(rhs).map(|(l, r)| (l - r.re).abs()).collect::<Vec<_>>()
            })
            .fold(0.0, f64::max);

        let mut one = b.n(&b.g(&xi));
        one.axpy(1.0, &b.s_adj(&b.l(&xi)));

        let mut two = b.n(&b.s_adj(&xi));
        two.axpy(1.0, &b.g(&b.l_adj(&xi)));
        two.axpy(1.0, &b.s_adj(&b.m(&xi)));
        two.axpy(-1.0, &remainder(cfg, &xi));

        rep.identity0 = rep.identity0.max(r0);
        rep.identity1 = rep.identity1.max(sup_x(&one));
        rep.identity2 = rep.identity2.max(sup_x(&two));
    }
    rep
}

