use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::VortexError;

/// Flat torus `C / λ(Z + τZ)` sampled on an `n × n` grid in lattice coordinates.
///
/// Grid point `(ix, iy)` sits at `(x, y) = (ix/n, iy/n)` and is stored at `iy·n + ix`.
/// The orthonormal coordinate is `z = x₁ + i x₂ = λ(x + τ y)`, with `λ` fixed by the area.
/// Real 1-forms are stored as `α₁ + iα₂` in the frame `dx₁, dx₂`, so `⋆` is multiplication by `i`.
#[derive(Clone)]
pub struct FlatCurve {
    modulus: C64,
    n: usize,
    area: f64,
    lambda: f64,
    /// Symbols of `∂₁` and `∂₂` divided by `i`, with the Nyquist row and column zeroed.
    k1: Vec<f64>,
    k2: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for FlatCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FlatCurve")
            .field("modulus", &self.modulus)
            .field("n", &self.n)
            .field("area", &self.area)
            .finish()
    }
}

impl PartialEq for FlatCurve {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.n == other.n && self.area == other.area
    }
}

/// Signed Fourier index of slot `j` on an `n`-point axis; `None` at the Nyquist slot.
pub fn mode_index(j: usize, n: usize) -> Option<i64> {
    match j.cmp(&(n / 2)) {
        std::cmp::Ordering::Less => Some(j as i64),
        std::cmp::Ordering::Equal => None,
        std::cmp::Ordering::Greater => Some(j as i64 - n as i64),
    }
}

impl FlatCurve {
    pub fn new(modulus: C64, n: usize, area: f64) -> Result<Self, VortexError> {
        if n < 8 || n % 2 != 0 {
            return Err(VortexError::InvalidCurve(format!("grid size {n} must be even and at least 8")));
        }
        if !(modulus.im > 0.0) || !modulus.re.is_finite() {
            return Err(VortexError::InvalidCurve(format!("modulus {modulus} must lie in the upper half plane")));
        }
        if !(area > 0.0) || !area.is_finite() {
            return Err(VortexError::InvalidCurve(format!("area {area} must be positive")));
        }
        let lambda = (area / modulus.im).sqrt();
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut k1 = vec![0.0; n * n];
        let mut k2 = vec![0.0; n * n];
        for jy in 0..n {
            for jx in 0..n {
                if let (Some(mx), Some(my)) = (mode_index(jx, n), mode_index(jy, n)) {
                    let (mx, my) = (mx as f64, my as f64);
                    k1[jy * n + jx] = two_pi * mx / lambda;
                    k2[jy * n + jx] = two_pi * (my - modulus.re * mx) / (lambda * modulus.im);
                }
            }
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            modulus,
            n,
            area,
            lambda,
            k1,
            k2,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        })
    }

    /// Square torus of area `2π`.
    pub fn square(n: usize) -> Result<Self, VortexError> {
        Self::new(C64::new(0.0, 1.0), n, 2.0 * std::f64::consts::PI)
    }

    pub fn modulus(&self) -> C64 {
        self.modulus
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of grid points, `n²`.
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Lattice coordinates `(x, y)` of grid point `p`.
    pub fn point(&self, p: usize) -> (f64, f64) {
        ((p % self.n) as f64 / self.n as f64, (p / self.n) as f64 / self.n as f64)
    }

    pub fn k1(&self) -> &[f64] {
        &self.k1
    }

    pub fn k2(&self) -> &[f64] {
        &self.k2
    }

    fn transform(&self, data: &mut [C64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        assert_eq!(data.len(), n * n, "field length");
        plan.process(data);
        let mut t = vec![C64::default(); n * n];
        for iy in 0..n {
            for ix in 0..n {
                t[ix * n + iy] = data[iy * n + ix];
            }
        }
        plan.process(&mut t);
        for iy in 0..n {
            for ix in 0..n {
                data[iy * n + ix] = t[ix * n + iy];
            }
        }
    }

    /// Unnormalized forward 2-D DFT, in place.
    pub fn fft(&self, data: &mut [C64]) {
        self.transform(data, &self.fwd);
    }

    /// Inverse 2-D DFT including the `1/n²` factor, in place.
    pub fn ifft(&self, data: &mut [C64]) {
        self.transform(data, &self.inv);
        let s = 1.0 / (self.n * self.n) as f64;
        data.iter_mut().for_each(|z| *z *= s);
    }

    /// Applies the Fourier multiplier `sym(j)` to `f`.
    pub fn multiplier(&self, f: &[C64], sym: impl Fn(usize) -> C64) -> Vec<C64> {
        let mut h = f.to_vec();
        self.fft(&mut h);
        h.iter_mut().enumerate().for_each(|(j, z)| *z *= sym(j));
        self.ifft(&mut h);
        h
    }

    /// `D̄ = ∂₁ + i∂₂`; on a real function this is `df` in the 1-form encoding.
    pub fn dbar(&self, f: &[C64]) -> Vec<C64> {
        self.multiplier(f, |j| C64::new(-self.k2[j], self.k1[j]))
    }

    /// `D = ∂₁ - i∂₂`; on an encoded 1-form, `Re D` is the divergence and `Im D` the curl.
    pub fn d(&self, f: &[C64]) -> Vec<C64> {
        self.multiplier(f, |j| C64::new(self.k2[j], self.k1[j]))
    }

    pub fn d1(&self, f: &[C64]) -> Vec<C64> {
        self.multiplier(f, |j| C64::new(0.0, self.k1[j]))
    }

    pub fn d2(&self, f: &[C64]) -> Vec<C64> {
        self.multiplier(f, |j| C64::new(0.0, self.k2[j]))
    }

    /// `Δ = D D̄`, symbol `-(k₁² + k₂²)`.
    pub fn laplacian(&self, f: &[C64]) -> Vec<C64> {
        self.multiplier(f, |j| C64::from(-(self.k1[j].powi(2) + self.k2[j].powi(2))))
    }

    pub fn laplacian_real(&self, f: &[f64]) -> Vec<f64> {
        re(&self.laplacian(&complexify(f)))
    }

    /// `-Δ` restricted to modes with nonzero symbol, inverted there and zero elsewhere.
    pub fn inverse_neg_laplacian(&self, f: &[C64]) -> Vec<C64> {
        self.multiplier(f, |j| {
            let s = self.k1[j].powi(2) + self.k2[j].powi(2);
            C64::from(if s > 0.0 { 1.0 / s } else { 0.0 })
        })
    }

    /// `∫ f ω`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.area * f.iter().sum::<f64>() / f.len() as f64
    }

    pub fn integrate_c(&self, f: &[C64]) -> C64 {
        f.iter().sum::<C64>() * (self.area / f.len() as f64)
    }

    /// `⟨a, b⟩ = ∫ a·b̄`, antilinear in the second slot.
    pub fn inner(&self, a: &[C64], b: &[C64]) -> C64 {
        assert_eq!(a.len(), b.len());
        a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<C64>() * (self.area / a.len() as f64)
    }

    /// `‖f‖²_{L²}`.
    pub fn norm_sq(&self, f: &[C64]) -> f64 {
        self.area * f.iter().map(|z| z.norm_sqr()).sum::<f64>() / f.len() as f64
    }

    /// Constant 1-form `a_X dx + a_Y dy` in the frame encoding.
    pub fn lattice_to_frame(&self, a: [f64; 2]) -> C64 {
        let (t, l) = (self.modulus, self.lambda);
        C64::new(a[0] / l, (a[1] - t.re * a[0]) / (l * t.im))
    }

    /// Inverse of [`lattice_to_frame`](Self::lattice_to_frame).
    pub fn frame_to_lattice(&self, w: C64) -> [f64; 2] {
        let (t, l) = (self.modulus, self.lambda);
        [l * w.re, l * (t.re * w.re + t.im * w.im)]
    }

    /// Field `f(x, y)` sampled on the grid.
    pub fn sample<T>(&self, f: impl Fn(f64, f64) -> T) -> Vec<T> {
        (0..self.len()).map(|p| {
            let (x, y) = self.point(p);
            f(x, y)
        })
        .collect()
    }

    /// Same torus at a different resolution.
    pub fn with_n(&self, n: usize) -> Result<Self, VortexError> {
        Self::new(self.modulus, n, self.area)
    }
}

pub fn complexify(f: &[f64]) -> Vec<C64> {
    f.iter().map(|&x| C64::from(x)).collect()
}

pub fn re(f: &[C64]) -> Vec<f64> {
    f.iter().map(|z| z.re).collect()
}

pub fn im(f: &[C64]) -> Vec<f64> {
    f.iter().map(|z| z.im).collect()
}

pub fn sup_norm(f: &[f64]) -> f64 {
    f.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn sup_norm_c(f: &[C64]) -> f64 {
    f.iter().fold(0.0, |m, z| m.max(z.norm()))
}
