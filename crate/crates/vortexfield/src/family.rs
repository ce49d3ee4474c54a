use num_complex::Complex64 as C64;

use crate::curve::{complexify, sup_norm};
use crate::{FlatCurve, VortexError};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Lifted holonomy path `t ↦ ã(t) ∈ R²`, `t ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum HolonomyPath {
    /// Linear between breakpoints; times start at 0, end at 1, strictly increasing.
    Polyline { times: Vec<f64>, points: Vec<[f64; 2]> },
    /// `center + radius·(cos θ, sin θ)` with `θ = 2π(phase + turns·t)`.
    Circle { center: [f64; 2], radius: f64, turns: f64, phase: f64 },
}

impl HolonomyPath {
    pub fn constant(p: [f64; 2]) -> Self {
        Self::Polyline { times: vec![0.0, 1.0], points: vec![p, p] }
    }

    fn segment(times: &[f64], t: f64) -> usize {
        times.partition_point(|&s| s <= t).clamp(1, times.len() - 1) - 1
    }

    pub fn at(&self, t: f64) -> [f64; 2] {
        match self {
            Self::Polyline { times, points } => {
                let i = Self::segment(times, t);
                let s = (t - times[i]) / (times[i + 1] - times[i]);
                [0, 1].map(|c| points[i][c] + s * (points[i + 1][c] - points[i][c]))
            }
            Self::Circle { center, radius, turns, phase } => {
                let th = TWO_PI * (phase + turns * t);
                [center[0] + radius * th.cos(), center[1] + radius * th.sin()]
            }
        }
    }

    /// `dã/dt`; on a polyline, the slope of the segment containing `t` (right-continuous).
    pub fn velocity(&self, t: f64) -> [f64; 2] {
        match self {
            Self::Polyline { times, points } => {
                let i = Self::segment(times, t);
                let dt = times[i + 1] - times[i];
                [0, 1].map(|c| (points[i + 1][c] - points[i][c]) / dt)
            }
            Self::Circle { radius, turns, phase, .. } => {
                let th = TWO_PI * (phase + turns * t);
                let w = TWO_PI * turns * radius;
                [-w * th.sin(), w * th.cos()]
            }
        }
    }

    /// Interior times where the velocity jumps.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            Self::Polyline { times, .. } => times[1..times.len() - 1].to_vec(),
            Self::Circle { .. } => Vec::new(),
        }
    }

    /// The same path run backwards, `t ↦ ã(1 - t)`.
    pub fn reversed(&self) -> Self {
        match self {
            Self::Polyline { times, points } => Self::Polyline {
                times: times.iter().rev().map(|t| 1.0 - t).collect(),
                points: points.iter().rev().copied().collect(),
            },
            Self::Circle { center, radius, turns, phase } => {
                Self::Circle { center: *center, radius: *radius, turns: -turns, phase: phase + turns }
            }
        }
    }

    fn validate(&self) -> Result<(), VortexError> {
        if let Self::Polyline { times, points } = self {
            let ok = times.len() >= 2
                && times.len() == points.len()
                && times[0] == 0.0
                && times[times.len() - 1] == 1.0
                && times.windows(2).all(|w| w[0] < w[1]);
            if !ok {
                return Err(VortexError::InvalidFamily("polyline times must rise from 0 to 1".into()));
            }
        }
        Ok(())
    }
}

/// `τ(t) = τ̄ + (amp + osc·sin 2πt)·cos 2π(m·x)`; `σ(t)` is the co-exact form with
/// `⋆dσ = -τ̇`, so the closedness constraint holds identically.
#[derive(Debug, Clone, PartialEq)]
pub struct TauProfile {
    pub mean: f64,
    pub amp: f64,
    pub osc: f64,
    pub mode: [i64; 2],
}

impl TauProfile {
    pub fn constant(mean: f64) -> Self {
        Self { mean, amp: 0.0, osc: 0.0, mode: [1, 0] }
    }

    fn wave(&self, curve: &FlatCurve) -> Vec<f64> {
        let m = self.mode;
        curve.sample(|x, y| (TWO_PI * (m[0] as f64 * x + m[1] as f64 * y)).cos())
    }

    pub fn is_static(&self) -> bool {
        self.osc == 0.0
    }

    /// Profile of `t ↦ τ(1 - t)`.
    pub fn reversed(&self) -> Self {
        Self { osc: -self.osc, ..self.clone() }
    }

    pub fn tau(&self, curve: &FlatCurve, t: f64) -> Vec<f64> {
        let c = self.amp + self.osc * (TWO_PI * t).sin();
        self.wave(curve).into_iter().map(|w| self.mean + c * w).collect()
    }

    pub fn tau_dot(&self, curve: &FlatCurve, t: f64) -> Vec<f64> {
        let c = self.osc * TWO_PI * (TWO_PI * t).cos();
        self.wave(curve).into_iter().map(|w| c * w).collect()
    }

    /// `σ̆ = iD̄w` with `-Δw = τ̇`, giving `curl σ = Δw = -τ̇`.
    pub fn sigma(&self, curve: &FlatCurve, t: f64) -> Vec<C64> {
        if self.is_static() {
            return vec![C64::default(); curve.len()];
        }
        let w = curve.inverse_neg_laplacian(&complexify(&self.tau_dot(curve, t)));
        let w: Vec<C64> = w.iter().map(|z| C64::from(z.re)).collect();
        curve.dbar(&w).into_iter().map(|z| C64::i() * z).collect()
    }

    /// Sup-norm of `τ̇ + ⋆dσ` at time `t`.
    pub fn closedness_residual(&self, curve: &FlatCurve, t: f64) -> f64 {
        let curl = curve.d(&self.sigma(curve, t));
        let td = self.tau_dot(curve, t);
        sup_norm(&curl.iter().zip(&td).map(|(c, d)| c.im + d).collect::<Vec<_>>())
    }
}

/// Family of split flat bundles `E_t = ⊕ A_k(t)` over the circle, with perturbation data.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatBundleFamily {
    pub paths: Vec<HolonomyPath>,
    /// Monodromy on `H¹`, row-major.
    pub fstar: [[i64; 2]; 2],
    /// `closing[k] = ρ(k)`: summand `k` at `t = 1` is glued to summand `ρ(k)` at `t = 0`.
    pub closing: Vec<usize>,
    pub tau: TauProfile,
}

impl FlatBundleFamily {
    pub fn n(&self) -> usize {
        self.paths.len()
    }

    pub fn holonomies(&self, t: f64) -> Vec<[f64; 2]> {
        self.paths.iter().map(|p| p.at(t)).collect()
    }

    pub fn velocities(&self, t: f64) -> Vec<[f64; 2]> {
        self.paths.iter().map(|p| p.velocity(t)).collect()
    }

    /// All interior kink times, sorted and deduplicated.
    pub fn kinks(&self) -> Vec<f64> {
        let mut k: Vec<f64> = self.paths.iter().flat_map(|p| p.kinks()).collect();
        k.sort_by(f64::total_cmp);
        k.dedup();
        k
    }

    /// The family over the reversed circle: paths run backwards, glued by `f*⁻¹` and `ρ⁻¹`.
    pub fn reversed(&self) -> Self {
        let [[a, b], [c, d]] = self.fstar;
        let det = a * d - b * c;
        let mut closing = vec![0; self.n()];
        for (k, &j) in self.closing.iter().enumerate() {
            closing[j] = k;
        }
        Self {
            paths: self.paths.iter().map(HolonomyPath::reversed).collect(),
            fstar: [[d * det, -b * det], [-c * det, a * det]],
            closing,
            tau: self.tau.reversed(),
        }
    }

    pub fn apply_fstar(&self, a: [f64; 2]) -> [f64; 2] {
        let f = self.fstar;
        [f[0][0] as f64 * a[0] + f[0][1] as f64 * a[1], f[1][0] as f64 * a[0] + f[1][1] as f64 * a[1]]
    }

    /// Checks shape, endpoint matching `ã_{ρ(k)}(0) ≡ f*·ã_k(1)`, and closedness on a `t`-grid.
    pub fn validate(&self, curve: &FlatCurve, t_samples: usize) -> Result<(), VortexError> {
        if self.paths.is_empty() || self.closing.len() != self.paths.len() {
            return Err(VortexError::InvalidFamily("closing permutation and paths disagree".into()));
        }
        let mut seen = vec![false; self.n()];
        for &j in &self.closing {
            if j >= self.n() || std::mem::replace(&mut seen[j], true) {
                return Err(VortexError::InvalidFamily("closing is not a permutation".into()));
            }
        }
        for p in &self.paths {
            p.validate()?;
        }
        for k in 0..self.n() {
            let end = self.apply_fstar(self.paths[k].at(1.0));
            let start = self.paths[self.closing[k]].at(0.0);
            if (0..2).any(|c| {
                let d = start[c] - end[c];
                (d - d.round()).abs() > 1e-9
            }) {
                return Err(VortexError::InvalidFamily(format!("summand {k} does not close up")));
            }
        }
        for i in 0..=t_samples {
            let t = i as f64 / t_samples.max(1) as f64;
            let r = self.tau.closedness_residual(curve, t);
            if r > 1e-10 {
                return Err(VortexError::ClosednessViolated { time: t, residual: r });
            }
        }
        Ok(())
    }
}
