use num_complex::Complex64 as C64;
use rayon::prelude::*;
use vortexfield::FlatCurve;

use crate::fields::{Config3D, Mesh, Tangent3D};

const I: C64 = C64 { re: 0.0, im: 1.0 };

pub(crate) fn cplx(x: &[f64]) -> Vec<C64> {
    x.iter().map(|&r| C64::from(r)).collect()
}

/// `𝔡_k s = D̄s + i(ᾰ + β̆_k)s` on slice `j`.
pub(crate) fn dbar_k(mesh: &Mesh, j: usize, alpha: &[C64], k: usize, s: &[C64]) -> Vec<C64> {
    let b = mesh.beta[j][k];
    let mut out = mesh.curve.dbar(s);
    out.iter_mut().zip(alpha).zip(s).for_each(|((o, a), x)| *o += I * (a + b) * x);
    out
}

/// `𝔡*_k w = -(Dw + i·conj(ᾰ + β̆_k)w)`, the `L²` adjoint of `𝔡_k`.
pub(crate) fn dadj_k(mesh: &Mesh, j: usize, alpha: &[C64], k: usize, w: &[C64]) -> Vec<C64> {
    let b = mesh.beta[j][k];
    let mut out = mesh.curve.d(w);
    out.iter_mut().zip(alpha).zip(w).for_each(|((o, a), x)| *o = -(*o + I * (a + b).conj() * x));
    out
}

fn summands(s: &[C64], n2: usize) -> std::slice::Chunks<'_, C64> {
    s.chunks(n2)
}

/// `Σ_k f_k·conj(g_k)` pointwise.
pub(crate) fn pair(f: &[C64], g: &[C64], n2: usize) -> Vec<C64> {
    let mut out = vec![C64::default(); n2];
    for (fk, gk) in summands(f, n2).zip(summands(g, n2)) {
        out.iter_mut().zip(fk).zip(gk).for_each(|((o, x), y)| *o += x * y.conj());
    }
    out
}

fn par_slices<T: Send>(m: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..m).into_par_iter().map(f).collect()
}

/// The operator blocks of `D_ε` at a configuration, with `x = (a, φ)`, `v`, `y = (c, ψ)`.
///
/// Each block reads its argument from the matching slots of a [`Tangent3D`] and writes only
/// the slots of its target.
pub struct Blocks<'a> {
    cfg: &'a Config3D,
}

impl<'a> Blocks<'a> {
    pub fn new(cfg: &'a Config3D) -> Self {
        Self { cfg }
    }

    fn mesh(&self) -> &Mesh {
        &self.cfg.mesh
    }

    fn curve(&self) -> &FlatCurve {
        &self.cfg.mesh.curve
    }

    fn zeros(&self) -> Tangent3D {
        self.cfg.fields.zeros_like()
    }

    /// `N x = (iȧ + iΣΨφ̄, iφ̇ - b_r φ + i·conj(a)Ψ)`.
    pub fn n(&self, x: &Tangent3D) -> Tangent3D {
        let (f, n2) = (&self.cfg.fields, self.mesh().n2());
        let adot = self.mesh().dt_form(&x.a);
        let pdot = self.mesh().dt_sections(&x.phi);
        let rows = par_slices(self.cfg.m(), |j| {
            let u = pair(&f.psi[j], &x.phi[j], n2);
            let a: Vec<C64> = adot[j].iter().zip(&u).map(|(d, u)| I * (d + u)).collect();
            let phi: Vec<C64> = (0..pdot[j].len())
                .map(|q| {
                    let p = q % n2;
                    I * pdot[j][q] - f.c[j][p] * x.phi[j][q] + I * x.a[j][p].conj() * f.psi[j][q]
                })
                .collect();
            (a, phi)
        });
        let mut out = self.zeros();
        for (j, (a, phi)) in rows.into_iter().enumerate() {
            out.a[j] = a;
            out.phi[j] = phi;
        }
        out
    }

    /// `G v = (-D̄v, ivΦ)`.
    pub fn g(&self, v: &Tangent3D) -> Tangent3D {
        let (f, n2) = (&self.cfg.fields, self.mesh().n2());
        let rows = par_slices(self.cfg.m(), |j| {
            let a: Vec<C64> = self.curve().dbar(&cplx(&v.v[j])).into_iter().map(|z| -z).collect();
            let phi: Vec<C64> = f.phi[j].iter().enumerate().map(|(q, p)| I * v.v[j][q % n2] * p).collect();
            (a, phi)
        });
        let mut out = self.zeros();
        for (j, (a, phi)) in rows.into_iter().enumerate() {
            out.a[j] = a;
            out.phi[j] = phi;
        }
        out
    }

    /// `S* y = (-iD̄c + iΣψΦ̄, -cΦ - 𝔡*ψ)`.
    pub fn s_adj(&self, y: &Tangent3D) -> Tangent3D {
        let (f, n2, mesh) = (&self.cfg.fields, self.mesh().n2(), self.mesh());
        let rows = par_slices(self.cfg.m(), |j| {
            let u = pair(&y.psi[j], &f.phi[j], n2);
            let dc = self.curve().dbar(&cplx(&y.c[j]));
            let a: Vec<C64> = dc.iter().zip(&u).map(|(d, u)| I * (u - d)).collect();
            let mut phi = Vec::with_capacity(f.phi[j].len());
            for k in 0..mesh.nsum {
                let r = k * n2..(k + 1) * n2;
                let w = dadj_k(mesh, j, &f.a[j], k, &y.psi[j][r.clone()]);
                phi.extend(f.phi[j][r].iter().zip(&w).enumerate().map(|(p, (ph, w))| -y.c[j][p] * ph - w));
            }
            (a, phi)
        });
        let mut out = self.zeros();
        for (j, (a, phi)) in rows.into_iter().enumerate() {
            out.a[j] = a;
            out.phi[j] = phi;
        }
        out
    }

    /// `G* x = Re Da - Im ΣΦφ̄`.
    pub fn g_adj(&self, x: &Tangent3D) -> Tangent3D {
        let (f, n2) = (&self.cfg.fields, self.mesh().n2());
        let rows = par_slices(self.cfg.m(), |j| {
            let da = self.curve().d(&x.a[j]);
            let u = pair(&f.phi[j], &x.phi[j], n2);
            da.iter().zip(&u).map(|(d, u)| d.re - u.im).collect::<Vec<f64>>()
        });
        let mut out = self.zeros();
        out.v = rows;
        out
    }

    /// `S x = (Im Da - Re ΣΦφ̄, -(𝔡φ + iaΦ))`.
    pub fn s(&self, x: &Tangent3D) -> Tangent3D {
        let (f, n2, mesh) = (&self.cfg.fields, self.mesh().n2(), self.mesh());
        let rows = par_slices(self.cfg.m(), |j| {
            let da = self.curve().d(&x.a[j]);
            let u = pair(&f.phi[j], &x.phi[j], n2);
            let c: Vec<f64> = da.iter().zip(&u).map(|(d, u)| d.im - u.re).collect();
            let mut psi = Vec::with_capacity(f.phi[j].len());
            for k in 0..mesh.nsum {
                let r = k * n2..(k + 1) * n2;
                let d = dbar_k(mesh, j, &f.a[j], k, &x.phi[j][r.clone()]);
                psi.extend(d.iter().zip(&f.phi[j][r]).enumerate().map(|(p, (d, ph))| -(d + I * x.a[j][p] * ph)));
            }
            (c, psi)
        });
        let mut out = self.zeros();
        for (j, (c, psi)) in rows.into_iter().enumerate() {
            out.c[j] = c;
            out.psi[j] = psi;
        }
        out
    }

    /// `L v = (-v̇, ivΨ)`.
    pub fn l(&self, v: &Tangent3D) -> Tangent3D {
        let (f, n2) = (&self.cfg.fields, self.mesh().n2());
        let vdot = self.mesh().dt_scalar(&v.v);
        let mut out = self.zeros();
        for j in 0..self.cfg.m() {
            out.c[j] = vdot[j].iter().map(|d| -d).collect();
            out.psi[j] = f.psi[j].iter().enumerate().map(|(q, p)| I * v.v[j][q % n2] * p).collect();
        }
        out
    }

    /// `L* y = ċ - Im ΣΨψ̄`.
    pub fn l_adj(&self, y: &Tangent3D) -> Tangent3D {
        let (f, n2) = (&self.cfg.fields, self.mesh().n2());
        let cdot = self.mesh().dt_scalar(&y.c);
        let mut out = self.zeros();
        for j in 0..self.cfg.m() {
            let u = pair(&f.psi[j], &y.psi[j], n2);
            out.v[j] = cdot[j].iter().zip(&u).map(|(d, u)| d - u.im).collect();
        }
        out
    }

    /// `M y = (Re ΣΨψ̄, cΨ - iψ̇ + b_r ψ)`.
    pub fn m(&self, y: &Tangent3D) -> Tangent3D {
        let (f, n2) = (&self.cfg.fields, self.mesh().n2());
        let psidot = self.mesh().dt_form_sections(&y.psi);
        let mut out = self.zeros();
        for j in 0..self.cfg.m() {
            out.c[j] = pair(&f.psi[j], &y.psi[j], n2).iter().map(|u| u.re).collect();
            out.psi[j] = (0..y.psi[j].len())
                .map(|q| {
                    let p = q % n2;
                    y.c[j][p] * f.psi[j][q] - I * psidot[j][q] + f.c[j][p] * y.psi[j][q]
                })
                .collect();
        }
        out
    }
}

/// `D_ε(Ξ)ξ`, rows `(dSW₁, -dSW₂, gauge, dSW₄, -dSW₅)`:
/// `(Nx + Gv + S*y, ε⁻²G*x + L*y, ε⁻²Sx + Lv + My)`, plus the `V`-terms `iV_r(φ, ψ)`.
pub fn linearize_apply(cfg: &Config3D, xi: &Tangent3D, eps: f64) -> Tangent3D {
    let b = Blocks::new(cfg);
    let e2 = 1.0 / (eps * eps);
    let mut out = b.n(xi);
    out.axpy(1.0, &b.g(xi));
    out.axpy(1.0, &b.s_adj(xi));
    out.axpy(e2, &b.g_adj(xi));
    out.axpy(1.0, &b.l_adj(xi));
    out.axpy(e2, &b.s(xi));
    out.axpy(1.0, &b.l(xi));
    out.axpy(1.0, &b.m(xi));
    let (f, n2) = (&cfg.fields, cfg.mesh.n2());
    for j in 0..cfg.m() {
        for q in 0..xi.phi[j].len() {
            let vr = f.v[j][q % n2];
            out.phi[j][q] += I * vr * xi.phi[j][q];
            out.psi[j][q] += I * vr * xi.psi[j][q];
        }
    }
    out
}

/// Linearization `D^{SW}ξ` of [`sw_map`]; its third component is zero.
pub fn sw_linear(cfg: &Config3D, xi: &Tangent3D, eps: f64) -> Tangent3D {
    let mut d = linearize_apply(cfg, xi, eps);
    d.phi.iter_mut().chain(d.psi.iter_mut()).flatten().for_each(|z| *z = -*z);
    d.v.iter_mut().flatten().for_each(|x| *x = 0.0);
    d
}

/// The Seiberg–Witten map `SW_ε(Ξ)` in the encoding of [`Tangent3D`]:
///
/// - `SW₁ = i(α̇ - D̄b_r - σ) - D̄V_r + iΣΨΦ̄`
/// - `SW₂ = -iΦ̇ + b_rΦ + 𝔡*Ψ - iV_rΦ`
/// - `SW₃ = 0`
/// - `SW₄ = ε⁻²(⋆F_α - ½|Φ|² + τ) - V̇_r + ½|Ψ|²`
/// - `SW₅ = iΨ̇ - b_rΨ + ε⁻²𝔡Φ - iV_rΨ`
pub fn sw_map(cfg: &Config3D, eps: f64) -> Tangent3D {
    let (mesh, f) = (&*cfg.mesh, &cfg.fields);
    let n2 = mesh.n2();
    let e2 = 1.0 / (eps * eps);
    let adot = mesh.dt_connection(&f.a);
    let pdot = mesh.dt_sections(&f.phi);
    let vdot = mesh.dt_scalar(&f.v);
    let psidot = mesh.dt_form_sections(&f.psi);
    let rows = par_slices(cfg.m(), |j| {
        let (alpha, phi, psi, vr, br) = (&f.a[j], &f.phi[j], &f.psi[j], &f.v[j], &f.c[j]);
        let u = pair(psi, phi, n2);
        let db = mesh.curve.dbar(&cplx(br));
        let dv = mesh.curve.dbar(&cplx(vr));
        let sw1: Vec<C64> = (0..n2).map(|p| I * (adot[j][p] - db[p] - mesh.sigma[j][p]) - dv[p] + I * u[p]).collect();
        let curl = mesh.curve.d(alpha);
        let sw4: Vec<f64> = (0..n2)
            .map(|p| {
                let phi2: f64 = (0..mesh.nsum).map(|k| phi[k * n2 + p].norm_sqr()).sum();
                let psi2: f64 = (0..mesh.nsum).map(|k| psi[k * n2 + p].norm_sqr()).sum();
                e2 * (curl[p].im - 0.5 * phi2 + mesh.tau[j][p]) - vdot[j][p] + 0.5 * psi2
            })
            .collect();
        let (mut sw2, mut sw5) = (Vec::with_capacity(phi.len()), Vec::with_capacity(phi.len()));
        for k in 0..mesh.nsum {
            let r = k * n2..(k + 1) * n2;
            let dpsi = dadj_k(mesh, j, alpha, k, &psi[r.clone()]);
            let dphi = dbar_k(mesh, j, alpha, k, &phi[r.clone()]);
            for p in 0..n2 {
                let q = k * n2 + p;
                sw2.push(-I * pdot[j][q] + br[p] * phi[q] + dpsi[p] - I * vr[p] * phi[q]);
                sw5.push(I * psidot[j][q] - br[p] * psi[q] + e2 * dphi[p] - I * vr[p] * psi[q]);
            }
        }
        (sw1, sw2, sw4, sw5)
    });
    let mut out = f.zeros_like();
    for (j, (a, phi, c, psi)) in rows.into_iter().enumerate() {
        out.a[j] = a;
        out.phi[j] = phi;
        out.c[j] = c;
        out.psi[j] = psi;
    }
    out
}

/// Exact quadratic remainder `Q_εξ = SW_ε(Ξ + ξ) - SW_ε(Ξ) - D^{SW}ξ`; it involves no derivatives
/// and no background fields:
/// `(iΣψφ̄, cφ - i·conj(a)ψ - ivφ, 0, -½ε⁻²|φ|² + ½|ψ|², -cψ + iε⁻²aφ - ivψ)`.
pub fn quadratic_term(xi: &Tangent3D, eps: f64) -> Tangent3D {
    let (n2, nsum) = (xi.n2(), xi.nsum());
    let e2 = 1.0 / (eps * eps);
    let mut out = xi.zeros_like();
    for j in 0..xi.m() {
        let (a, phi, v, c, psi) = (&xi.a[j], &xi.phi[j], &xi.v[j], &xi.c[j], &xi.psi[j]);
        out.a[j] = pair(psi, phi, n2).into_iter().map(|u| I * u).collect();
        for p in 0..n2 {
            let phi2: f64 = (0..nsum).map(|k| phi[k * n2 + p].norm_sqr()).sum();
            let psi2: f64 = (0..nsum).map(|k| psi[k * n2 + p].norm_sqr()).sum();
            out.c[j][p] = -0.5 * e2 * phi2 + 0.5 * psi2;
            for k in 0..nsum {
                let q = k * n2 + p;
                out.phi[j][q] = c[p] * phi[q] - I * a[p].conj() * psi[q] - I * v[p] * phi[q];
                out.psi[j][q] = -c[p] * psi[q] + I * e2 * a[p] * phi[q] - I * v[p] * psi[q];
            }
        }
    }
    out
}

/// Slice-wise vortex residuals: the moment `⋆F_α - ½|Φ|² + τ` and `𝔡Φ`.
pub(crate) fn vortex_parts(cfg: &Config3D) -> (Vec<Vec<f64>>, Vec<Vec<C64>>) {
    let (mesh, f) = (&*cfg.mesh, &cfg.fields);
    let n2 = mesh.n2();
    par_slices(cfg.m(), |j| {
        let curl = mesh.curve.d(&f.a[j]);
        let moment = (0..n2)
            .map(|p| {
                let phi2: f64 = (0..mesh.nsum).map(|k| f.phi[j][k * n2 + p].norm_sqr()).sum();
                curl[p].im - 0.5 * phi2 + mesh.tau[j][p]
            })
            .collect();
        let dphi = (0..mesh.nsum).flat_map(|k| dbar_k(mesh, j, &f.a[j], k, &f.phi[j][k * n2..(k + 1) * n2])).collect();
        (moment, dphi)
    })
    .into_iter()
    .unzip()
}
