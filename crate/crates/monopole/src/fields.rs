use std::sync::Arc;

use num_complex::Complex64 as C64;
use vortexfield::{FlatBundleFamily, FlatCurve};

use crate::closing::{Closing, FieldKind, Twist};
use crate::{flat, MonopoleError, Result};

/// Background of the problem: the grid, the gluing and the family data at each slice.
pub struct Mesh {
    pub curve: FlatCurve,
    pub m: usize,
    pub nsum: usize,
    pub closing: Closing,
    /// `β̆_k(t_j)`, the flat summand connections, indexed `[slice][k]`.
    pub beta: Vec<Vec<C64>>,
    /// `∂_tβ̆_k(t_j)`.
    pub beta_dot: Vec<Vec<C64>>,
    pub sigma: Vec<Vec<C64>>,
    pub tau: Vec<Vec<f64>>,
    scalar: Twist,
    form: Twist,
    section: Twist,
    form_section: Twist,
    /// Affine part of the gluing on `ᾰ`: ramp slope, or fixed point when `rot ≠ 1`.
    drift: Drift,
}

enum Drift {
    Ramp(C64),
    Fixed(C64),
}

impl std::fmt::Debug for Mesh {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Mesh")
            .field("n", &self.curve.n())
            .field("m", &self.m)
            .field("nsum", &self.nsum)
            .field("closing", &self.closing)
            .finish_non_exhaustive()
    }
}

impl Mesh {
    pub fn new(
        curve: FlatCurve,
        closing: Closing,
        beta: Vec<Vec<C64>>,
        beta_dot: Vec<Vec<C64>>,
        sigma: Vec<Vec<C64>>,
        tau: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let m = beta.len();
        let nsum = closing.nsum();
        if m < 4 || beta_dot.len() != m || sigma.len() != m || tau.len() != m {
            return Err(MonopoleError::InvalidInput(format!("need at least 4 slices with matching data, got {m}")));
        }
        if beta.iter().chain(&beta_dot).any(|b| b.len() != nsum)
            || sigma.iter().any(|s| s.len() != curve.len())
            || tau.iter().any(|s| s.len() != curve.len())
        {
            return Err(MonopoleError::InvalidInput("slice data has the wrong shape".into()));
        }
        let rot = closing.rotation();
        let b = rot.conj() * flat(&curve, [closing.l_lift[0] as f64, closing.l_lift[1] as f64]);
        let drift = if (rot - 1.0).norm() < 1e-12 {
            Drift::Ramp(b)
        } else {
            Drift::Fixed(b / (1.0 - rot.conj()))
        };
        Ok(Self {
            scalar: closing.twist(FieldKind::Scalar),
            form: closing.twist(FieldKind::Form),
            section: closing.twist(FieldKind::Section),
            form_section: closing.twist(FieldKind::FormSection),
            curve,
            m,
            nsum,
            closing,
            beta,
            beta_dot,
            sigma,
            tau,
            drift,
        })
    }

    /// Samples a bundle family at `t_j = j/m`.
    pub fn from_family(curve: FlatCurve, family: &FlatBundleFamily, m: usize, closing: Closing) -> Result<Self> {
        let times: Vec<f64> = (0..m).map(|j| j as f64 / m as f64).collect();
        let beta = times.iter().map(|&t| family.holonomies(t).into_iter().map(|a| flat(&curve, a)).collect()).collect();
        let beta_dot = times.iter().map(|&t| family.velocities(t).into_iter().map(|a| flat(&curve, a)).collect()).collect();
        let sigma = times.iter().map(|&t| family.tau.sigma(&curve, t)).collect();
        let tau = times.iter().map(|&t| family.tau.tau(&curve, t)).collect();
        Self::new(curve, closing, beta, beta_dot, sigma, tau)
    }

    pub fn n2(&self) -> usize {
        self.curve.len()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.m).map(|j| j as f64 / self.m as f64).collect()
    }

    /// `ᾰ + β̆_k` on slice `j`.
    pub fn summand_alpha(&self, j: usize, alpha: &[C64], k: usize) -> Vec<C64> {
        alpha.iter().map(|a| a + self.beta[j][k]).collect()
    }

    pub(crate) fn dt_scalar(&self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        self.scalar.derivative_real(x)
    }

    pub(crate) fn dt_form(&self, x: &[Vec<C64>]) -> Vec<Vec<C64>> {
        self.form.derivative(x)
    }

    pub(crate) fn dt_sections(&self, x: &[Vec<C64>]) -> Vec<Vec<C64>> {
        self.section.derivative(x)
    }

    pub(crate) fn dt_form_sections(&self, x: &[Vec<C64>]) -> Vec<Vec<C64>> {
        self.form_section.derivative(x)
    }

    /// `∂_t` of the connection, whose gluing is affine.
    pub(crate) fn dt_connection(&self, x: &[Vec<C64>]) -> Vec<Vec<C64>> {
        match self.drift {
            Drift::Ramp(b) => {
                let y: Vec<Vec<C64>> = x
                    .iter()
                    .enumerate()
                    .map(|(j, s)| s.iter().map(|z| z - b * (j as f64 / self.m as f64)).collect())
                    .collect();
                self.form.derivative(&y).into_iter().map(|s| s.into_iter().map(|z| z + b).collect()).collect()
            }
            Drift::Fixed(c) => {
                let y: Vec<Vec<C64>> = x.iter().map(|s| s.iter().map(|z| z - c).collect()).collect();
                self.form.derivative(&y)
            }
        }
    }

    /// Real `t`-multiplier `sym(ω, nyquist)` on a field of the given kind.
    pub(crate) fn t_multiplier(&self, kind: FieldKind, x: &[Vec<C64>], sym: impl Fn(f64, bool) -> f64) -> Vec<Vec<C64>> {
        let tw = match kind {
            FieldKind::Scalar => &self.scalar,
            FieldKind::Form => &self.form,
            FieldKind::Section => &self.section,
            FieldKind::FormSection => &self.form_section,
        };
        tw.multiplier(x, |w, nyq| C64::from(sym(w, nyq)))
    }
}

/// Tangent vector `ξ = (a, φ, v, c, ψ)`; `a` is frame-encoded, `v` and `c` are the real parts
/// over `i`, `φ` and `ψ` are summand-major. Indexed `[slice][point]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tangent3D {
    pub a: Vec<Vec<C64>>,
    pub phi: Vec<Vec<C64>>,
    pub v: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
    pub psi: Vec<Vec<C64>>,
}

impl Tangent3D {
    pub fn zeros(m: usize, n2: usize, nsum: usize) -> Self {
        Self {
            a: vec![vec![C64::default(); n2]; m],
            phi: vec![vec![C64::default(); n2 * nsum]; m],
            v: vec![vec![0.0; n2]; m],
            c: vec![vec![0.0; n2]; m],
            psi: vec![vec![C64::default(); n2 * nsum]; m],
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.m(), self.a[0].len(), self.phi[0].len() / self.a[0].len())
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn n2(&self) -> usize {
        self.a[0].len()
    }

    pub fn nsum(&self) -> usize {
        self.phi[0].len() / self.n2()
    }

    /// `self += s·other`.
    pub fn axpy(&mut self, s: f64, other: &Self) {
        fn cx(x: &mut [Vec<C64>], y: &[Vec<C64>], s: f64) {
            x.iter_mut().flatten().zip(y.iter().flatten()).for_each(|(a, b)| *a += s * b);
        }
        fn re(x: &mut [Vec<f64>], y: &[Vec<f64>], s: f64) {
            x.iter_mut().flatten().zip(y.iter().flatten()).for_each(|(a, b)| *a += s * b);
        }
        cx(&mut self.a, &other.a, s);
        cx(&mut self.phi, &other.phi, s);
        re(&mut self.v, &other.v, s);
        re(&mut self.c, &other.c, s);
        cx(&mut self.psi, &other.psi, s);
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.zeros_like();
        out.axpy(s, self);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// `ε`-weighted pairing `∫∫ Re(a·ā' + φ·φ̄') + ε²(vv' + cc' + Re ψ·ψ̄')`, with `area` the area of `Σ`.
    pub fn pairing(&self, other: &Self, eps: f64, area: f64) -> f64 {
        let cx = |x: &[Vec<C64>], y: &[Vec<C64>]| -> f64 {
            x.iter().flatten().zip(y.iter().flatten()).map(|(a, b)| (a * b.conj()).re).sum()
        };
        let re = |x: &[Vec<f64>], y: &[Vec<f64>]| -> f64 { x.iter().flatten().zip(y.iter().flatten()).map(|(a, b)| a * b).sum() };
        let e2 = eps * eps;
        let s = cx(&self.a, &other.a)
            + cx(&self.phi, &other.phi)
            + e2 * (re(&self.v, &other.v) + re(&self.c, &other.c) + cx(&self.psi, &other.psi));
        s * area / (self.n2() * self.m()) as f64
    }

    /// Real coordinates, slice by slice: `a`, `φ`, `v`, `c`, `ψ`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.m() * self.n2() * (4 + 4 * self.nsum()));
        for j in 0..self.m() {
            for z in self.a[j].iter().chain(&self.phi[j]) {
                out.push(z.re);
                out.push(z.im);
            }
            out.extend_from_slice(&self.v[j]);
            out.extend_from_slice(&self.c[j]);
            for z in &self.psi[j] {
                out.push(z.re);
                out.push(z.im);
            }
        }
        out
    }

    pub fn from_flat(m: usize, n2: usize, nsum: usize, x: &[f64]) -> Self {
        let mut t = Self::zeros(m, n2, nsum);
        let mut it = x.iter().copied();
        let mut next = || it.next().expect("flat vector has the tangent dimension");
        for j in 0..m {
            for z in t.a[j].iter_mut().chain(t.phi[j].iter_mut()) {
                *z = C64::new(next(), next());
            }
            for r in t.v[j].iter_mut().chain(t.c[j].iter_mut()) {
                *r = next();
            }
            for z in t.psi[j].iter_mut() {
                *z = C64::new(next(), next());
            }
        }
        t
    }

    pub fn sup_norm(&self) -> f64 {
        let c = self.a.iter().chain(&self.phi).chain(&self.psi).flatten().map(|z| z.norm());
        let r = self.v.iter().chain(&self.c).flatten().map(|x| x.abs());
        c.chain(r).fold(0.0, f64::max)
    }
}

/// Configuration `Ξ = (A, Φ, V, b, Ψ)` over a shared [`Mesh`]; the fields are stored as a
/// [`Tangent3D`] with `a = ᾰ`, `v = V_r`, `c = b_r`.
#[derive(Debug, Clone)]
pub struct Config3D {
    pub mesh: Arc<Mesh>,
    pub fields: Tangent3D,
}

impl Config3D {
    pub fn new(mesh: Arc<Mesh>, fields: Tangent3D) -> Result<Self> {
        if fields.m() != mesh.m || fields.n2() != mesh.n2() || fields.nsum() != mesh.nsum {
            return Err(MonopoleError::InvalidInput("fields do not fit the mesh".into()));
        }
        Ok(Self { mesh, fields })
    }

    pub fn plus(&self, xi: &Tangent3D) -> Self {
        let mut fields = self.fields.clone();
        fields.axpy(1.0, xi);
        Self { mesh: self.mesh.clone(), fields }
    }

    pub fn m(&self) -> usize {
        self.mesh.m
    }
}
