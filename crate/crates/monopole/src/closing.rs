use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{Arc, Mutex};

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};
use vortexfield::FlatCurve;

use crate::MonopoleError;

/// Gluing map `𝒯` of the mapping torus, `Ξ(0) = 𝒯 Ξ(1)`.
///
/// Grid points are pulled back by `G = f*ᵀ` (so constant forms pull back by `f*`), 1-forms and
/// (0,1)-forms pick up the frame rotation `rot`, summand `k` at `t = 1` lands on `closing[k]`
/// at `t = 0`, and sections are multiplied by `e^{iχ}·e^{2πi δ_k·x}` with `δ_k = n_k + m_L`.
#[derive(Debug, Clone, PartialEq)]
pub struct Closing {
    pub fstar: [[i64; 2]; 2],
    pub closing: Vec<usize>,
    /// Integer lifts `n_k = f*ã_k(1) - ã_{ρ(k)}(0)`.
    pub lifts: Vec<[i64; 2]>,
    /// `m_L = f*ζ(1) - ζ(0)`.
    pub l_lift: [i64; 2],
    /// Constant phase `e^{iχ}` of the bundle lift.
    pub phase: C64,
    rot: C64,
    grid: Vec<usize>,
    n: usize,
}

/// Order of `f*` in `GL(2, Z)`, if it is at most 12.
pub fn fstar_order(f: [[i64; 2]; 2]) -> Option<usize> {
    let mul = |a: [[i64; 2]; 2], b: [[i64; 2]; 2]| {
        let mut c = [[0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        c
    };
    let mut p = f;
    for k in 1..=12 {
        if p == [[1, 0], [0, 1]] {
            return Some(k);
        }
        p = mul(p, f);
    }
    None
}

impl Closing {
    pub fn new(
        curve: &FlatCurve,
        fstar: [[i64; 2]; 2],
        closing: Vec<usize>,
        lifts: Vec<[i64; 2]>,
        l_lift: [i64; 2],
        phase: C64,
    ) -> Result<Self, MonopoleError> {
        let lf = |a: [f64; 2]| curve.lattice_to_frame(a);
        let img = |a: [f64; 2]| {
            [
                fstar[0][0] as f64 * a[0] + fstar[0][1] as f64 * a[1],
                fstar[1][0] as f64 * a[0] + fstar[1][1] as f64 * a[1],
            ]
        };
        let rot = lf(img([1.0, 0.0])) / lf([1.0, 0.0]);
        let rot2 = lf(img([0.0, 1.0])) / lf([0.0, 1.0]);
        if (rot.norm() - 1.0).abs() > 1e-10 || (rot - rot2).norm() > 1e-10 {
            return Err(MonopoleError::PeriodicityMismatch(format!(
                "f* = {fstar:?} is not an isometry of the curve, its pullback does not preserve the grid fields"
            )));
        }
        if closing.len() != lifts.len() {
            return Err(MonopoleError::InvalidInput("closing and lifts disagree in length".into()));
        }
        let n = curve.n();
        let g = [[fstar[0][0], fstar[1][0]], [fstar[0][1], fstar[1][1]]];
        let grid = (0..n * n)
            .map(|p| {
                let (ix, iy) = ((p % n) as i64, (p / n) as i64);
                let jx = (g[0][0] * ix + g[0][1] * iy).rem_euclid(n as i64) as usize;
                let jy = (g[1][0] * ix + g[1][1] * iy).rem_euclid(n as i64) as usize;
                jy * n + jx
            })
            .collect();
        Ok(Self { fstar, closing, lifts, l_lift, phase, rot, grid, n })
    }

    /// Trivial gluing for `N` summands.
    pub fn identity(curve: &FlatCurve, nsum: usize) -> Self {
        Self::new(curve, [[1, 0], [0, 1]], (0..nsum).collect(), vec![[0, 0]; nsum], [0, 0], C64::from(1.0))
            .expect("identity is an isometry")
    }

    pub fn nsum(&self) -> usize {
        self.closing.len()
    }

    /// Frame rotation acting on 1-forms and (0,1)-forms.
    pub fn rotation(&self) -> C64 {
        self.rot
    }

    fn section_weight(&self, k: usize, p: usize) -> C64 {
        let d = [self.lifts[k][0] + self.l_lift[0], self.lifts[k][1] + self.l_lift[1]];
        let (ix, iy) = ((p % self.n) as i64, (p / self.n) as i64);
        let q = (d[0] * ix + d[1] * iy).rem_euclid(self.n as i64) as f64 / self.n as f64;
        self.phase * C64::from_polar(1.0, TAU * q)
    }

    /// `𝒯` on a scalar.
    pub fn scalar(&self, s: &[f64]) -> Vec<f64> {
        self.grid.iter().map(|&q| s[q]).collect()
    }

    /// `𝒯` on the connection form `ᾰ`, including the shift by the flat form of `m_L`.
    pub fn connection(&self, curve: &FlatCurve, a: &[C64]) -> Vec<C64> {
        let shift = crate::flat(curve, [self.l_lift[0] as f64, self.l_lift[1] as f64]);
        self.grid.iter().map(|&q| self.rot * a[q] - shift).collect()
    }

    /// `𝒯` on a tangent 1-form.
    pub fn form(&self, a: &[C64]) -> Vec<C64> {
        self.grid.iter().map(|&q| self.rot * a[q]).collect()
    }

    /// `𝒯` on summand-major sections; `forms` adds the frame rotation for (0,1)-forms.
    pub fn sections(&self, s: &[C64], forms: bool) -> Vec<C64> {
        let n2 = self.n * self.n;
        let r = if forms { self.rot } else { C64::from(1.0) };
        let mut out = vec![C64::default(); s.len()];
        for k in 0..self.nsum() {
            let dst = self.closing[k];
            for p in 0..n2 {
                out[dst * n2 + p] = r * self.section_weight(k, p) * s[k * n2 + self.grid[p]];
            }
        }
        out
    }

    /// Forward step `x(t+1) = ph·x(t)[src]` of the linear gluing on one field kind.
    pub(crate) fn twist(&self, kind: FieldKind) -> Twist {
        let n2 = self.n * self.n;
        let mut inv = vec![0; n2];
        for (p, &q) in self.grid.iter().enumerate() {
            inv[q] = p;
        }
        match kind {
            FieldKind::Scalar | FieldKind::Form => {
                let ph = if kind == FieldKind::Form { self.rot.conj() } else { C64::from(1.0) };
                Twist::new((0..n2).map(|q| inv[q]).collect(), vec![ph; n2])
            }
            FieldKind::Section | FieldKind::FormSection => {
                let r = if kind == FieldKind::FormSection { self.rot } else { C64::from(1.0) };
                let mut src = vec![0; n2 * self.nsum()];
                let mut ph = vec![C64::default(); n2 * self.nsum()];
                for k in 0..self.nsum() {
                    for q in 0..n2 {
                        let p = inv[q];
                        src[k * n2 + q] = self.closing[k] * n2 + p;
                        ph[k * n2 + q] = (r * self.section_weight(k, p)).conj();
                    }
                }
                Twist::new(src, ph)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FieldKind {
    Scalar,
    Form,
    Section,
    FormSection,
}

struct Cycle {
    members: Vec<usize>,
    /// `Π_{q<r} ph[i_q]` for each position `r`.
    weights: Vec<C64>,
    /// Floquet exponent `ν` with `μ = e^{iν}`.
    nu: f64,
}

/// Spectral `∂_t` on twisted-periodic sequences, by unfolding each cycle of the gluing.
type Plans = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

pub(crate) struct Twist {
    cycles: Vec<Cycle>,
    dim: usize,
    plans: Mutex<HashMap<usize, Plans>>,
}

impl Twist {
    fn new(src: Vec<usize>, ph: Vec<C64>) -> Self {
        let dim = src.len();
        let mut seen = vec![false; dim];
        let mut cycles = Vec::new();
        for start in 0..dim {
            if seen[start] {
                continue;
            }
            let (mut members, mut weights) = (Vec::new(), Vec::new());
            let (mut i, mut w) = (start, C64::from(1.0));
            while !seen[i] {
                seen[i] = true;
                members.push(i);
                weights.push(w);
                w *= ph[i];
                i = src[i];
            }
            debug_assert_eq!(i, start);
            let mut nu = w.arg();
            if nu.abs() < 1e-14 {
                nu = 0.0;
            }
            cycles.push(Cycle { members, weights, nu });
        }
        Self { cycles, dim, plans: Mutex::new(HashMap::new()) }
    }

    fn plans(&self, len: usize) -> Plans {
        let mut cache = self.plans.lock().expect("fft plan cache");
        cache
            .entry(len)
            .or_insert_with(|| {
                let mut p = FftPlanner::new();
                (p.plan_fft_forward(len), p.plan_fft_inverse(len))
            })
            .clone()
    }

    /// Applies the Fourier multiplier `sym(ω, nyquist)` in `t`, `ω` the Floquet frequency.
    ///
    /// The Nyquist mode is passed with only its Floquet shift, so `iω` stays skew-adjoint.
    pub(crate) fn multiplier(&self, x: &[Vec<C64>], sym: impl Fn(f64, bool) -> C64) -> Vec<Vec<C64>> {
        let m = x.len();
        let mut out = vec![vec![C64::default(); self.dim]; m];
        for cyc in &self.cycles {
            let l = cyc.members.len();
            let len = l * m;
            let (fwd, inv) = self.plans(len);
            let mut y = vec![C64::default(); len];
            for (r, (&i, &w)) in cyc.members.iter().zip(&cyc.weights).enumerate() {
                for j in 0..m {
                    let s = (r * m + j) as f64 / m as f64;
                    y[r * m + j] = w * x[j][i] * C64::from_polar(1.0, -cyc.nu * s / l as f64);
                }
            }
            fwd.process(&mut y);
            for (k, z) in y.iter_mut().enumerate() {
                let kk = if k <= len / 2 { k as f64 } else { k as f64 - len as f64 };
                let nyquist = len % 2 == 0 && k == len / 2;
                let omega = if nyquist { cyc.nu / l as f64 } else { (2.0 * PI * kk + cyc.nu) / l as f64 };
                *z *= sym(omega, nyquist) / len as f64;
            }
            inv.process(&mut y);
            for (r, (&i, &w)) in cyc.members.iter().zip(&cyc.weights).enumerate() {
                for j in 0..m {
                    let s = (r * m + j) as f64 / m as f64;
                    out[j][i] = y[r * m + j] * C64::from_polar(1.0, cyc.nu * s / l as f64) / w;
                }
            }
        }
        out
    }

    pub(crate) fn derivative(&self, x: &[Vec<C64>]) -> Vec<Vec<C64>> {
        self.multiplier(x, |w, _| C64::new(0.0, w))
    }

    pub(crate) fn derivative_real(&self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let xc: Vec<Vec<C64>> = x.iter().map(|s| s.iter().map(|&v| C64::from(v)).collect()).collect();
        self.derivative(&xc).into_iter().map(|s| s.into_iter().map(|z| z.re).collect()).collect()
    }
}
