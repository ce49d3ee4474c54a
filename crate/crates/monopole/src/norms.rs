use crate::fields::{Config3D, Tangent3D};
use crate::ops::Blocks;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormLevel {
    Zero,
    One,
    Infinity,
}

/// `‖ξ‖_{0,p,ε}`, `‖ξ‖_{1,p,ε}` (blocks at the reference configuration) and `‖ξ‖_{∞,ε}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedNormReport {
    pub eps: f64,
    pub p: f64,
    pub zero: f64,
    pub one: f64,
    pub infinity: f64,
}

impl WeightedNormReport {
    pub fn get(&self, level: NormLevel) -> f64 {
        match level {
            NormLevel::Zero => self.zero,
            NormLevel::One => self.one,
            NormLevel::Infinity => self.infinity,
        }
    }
}

/// Pointwise magnitudes `|x|`, `|v|`, `|y|` on every slice.
fn magnitudes(t: &Tangent3D) -> [Vec<Vec<f64>>; 3] {
    let (n2, nsum) = (t.n2(), t.nsum());
    let sum_sq = |s: &[num_complex::Complex64], p: usize| (0..nsum).map(|k| s[k * n2 + p].norm_sqr()).sum::<f64>();
    let x = (0..t.m()).map(|j| (0..n2).map(|p| (t.a[j][p].norm_sqr() + sum_sq(&t.phi[j], p)).sqrt()).collect()).collect();
    let v = t.v.iter().map(|s| s.iter().map(|r| r.abs()).collect()).collect();
    let y = (0..t.m()).map(|j| (0..n2).map(|p| (t.c[j][p].powi(2) + sum_sq(&t.psi[j], p)).sqrt()).collect()).collect();
    [x, v, y]
}

/// `∫₀¹ ‖g‖^p_{L^p(Σ_t)} dt` by grid-sample quadrature.
fn lp_pow(g: &[Vec<f64>], p: f64, area: f64) -> f64 {
    let count = (g.len() * g[0].len()) as f64;
    g.iter().flatten().map(|r| r.powf(p)).sum::<f64>() * area / count
}

fn sup(g: &[Vec<f64>]) -> f64 {
    g.iter().flatten().fold(0.0, |a, &b| a.max(b))
}

pub fn weighted_norm(reference: &Config3D, xi: &Tangent3D, eps: f64, p: f64) -> WeightedNormReport {
    let area = reference.mesh.curve.area();
    let [x, v, y] = magnitudes(xi);
    let ep = eps.powf(p);
    let zero = (lp_pow(&x, p, area) + ep * (lp_pow(&v, p, area) + lp_pow(&y, p, area))).powf(1.0 / p);
    let infinity = sup(&x) + eps * (sup(&v) + sup(&y));

    let b = Blocks::new(reference);
    let part = |t: &Tangent3D, slot: usize| lp_pow(&magnitudes(t)[slot], p, area);
    let one = (lp_pow(&x, p, area)
        + part(&b.g_adj(xi), 1)
        + part(&b.s(xi), 2)
        + ep * part(&b.n(xi), 0)
        + ep * part(&b.g(xi), 0)
        + ep * ep * part(&b.l(xi), 2)
        + ep * part(&b.s_adj(xi), 0)
        + ep * ep * part(&b.l_adj(xi), 1)
        + ep * ep * part(&b.m(xi), 2))
    .powf(1.0 / p);
    WeightedNormReport { eps, p, zero, one, infinity }
}
