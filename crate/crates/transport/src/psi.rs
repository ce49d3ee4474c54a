use num_complex::Complex64 as C64;
use vortexfield::{dbar_adj, dbar_op, FlatCurve};

use crate::{flat_form, TransportError};

const MAX_ITER: usize = 500;

/// `Ψ ↦ ∂̄∂̄*Ψ + ½⟨Ψ,Φ⟩Φ` on the `N` summands, each with its own connection.
pub struct PsiOperator<'a> {
    curve: &'a FlatCurve,
    alphas: Vec<Vec<C64>>,
    phi: &'a [Vec<C64>],
    precond: Vec<Vec<f64>>,
}

impl<'a> PsiOperator<'a> {
    /// `alpha` is the line-bundle connection, `holonomies` the lifted summand holonomies.
    pub fn new(curve: &'a FlatCurve, alpha: &[C64], holonomies: &[[f64; 2]], phi: &'a [Vec<C64>]) -> Self {
        let alphas: Vec<Vec<C64>> = holonomies
            .iter()
            .map(|&a| {
                let b = flat_form(curve, a);
                alpha.iter().map(|x| x + b).collect()
            })
            .collect();
        let precond = alphas
            .iter()
            .zip(phi)
            .map(|(al, f)| {
                let c = curve.integrate_c(al) / curve.area();
                let m = 0.5 * curve.integrate(&f.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>()) / curve.area();
                (0..curve.len())
                    .map(|p| {
                        let sym = C64::new(-curve.k2()[p], curve.k1()[p]) + C64::i() * c;
                        let s = 0.5 * sym.norm_sqr() + m;
                        if s > 1e-12 { 1.0 / s } else { 1.0 }
                    })
                    .collect()
            })
            .collect();
        Self { curve, alphas, phi, precond }
    }

    pub fn summand_alpha(&self, j: usize) -> &[C64] {
        &self.alphas[j]
    }

    pub fn apply(&self, psi: &[Vec<C64>]) -> Vec<Vec<C64>> {
        let u = pairing(psi, self.phi);
        psi.iter()
            .enumerate()
            .map(|(j, s)| {
                let al = &self.alphas[j];
                let mut out = dbar_op(self.curve, al, &dbar_adj(self.curve, al, s));
                for ((o, w), f) in out.iter_mut().zip(&u).zip(&self.phi[j]) {
                    *o += 0.5 * w * f;
                }
                out
            })
            .collect()
    }

    fn precondition(&self, r: &[Vec<C64>]) -> Vec<Vec<C64>> {
        r.iter().zip(&self.precond).map(|(x, m)| self.curve.multiplier(x, |p| C64::from(m[p]))).collect()
    }
}

/// `⟨Ψ,Φ⟩ = Σ_j Ψ_j Φ̄_j`, a (0,1)-form in the frame encoding.
pub fn pairing(psi: &[Vec<C64>], phi: &[Vec<C64>]) -> Vec<C64> {
    let mut u = vec![C64::default(); phi.first().map_or(0, Vec::len)];
    for (s, f) in psi.iter().zip(phi) {
        for ((o, a), b) in u.iter_mut().zip(s).zip(f) {
            *o += a * b.conj();
        }
    }
    u
}

fn dot(a: &[Vec<C64>], b: &[Vec<C64>]) -> C64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| x * y.conj()).sum()
}

fn norm(a: &[Vec<C64>]) -> f64 {
    dot(a, a).re.sqrt()
}

fn axpy(y: &mut [Vec<C64>], a: C64, x: &[Vec<C64>]) {
    for (ys, xs) in y.iter_mut().zip(x) {
        ys.iter_mut().zip(xs).for_each(|(p, q)| *p += a * q);
    }
}

/// Solves `∂̄∂̄*Ψ + ½⟨Ψ,Φ⟩Φ = rhs` to relative residual `tol`.
pub fn solve_psi(op: &PsiOperator, rhs: &[Vec<C64>], tol: f64) -> Result<Vec<Vec<C64>>, TransportError> {
    solve_psi_from(op, rhs, None, tol)
}

/// Preconditioned conjugate gradients, optionally warm-started.
pub fn solve_psi_from(
    op: &PsiOperator,
    rhs: &[Vec<C64>],
    guess: Option<&[Vec<C64>]>,
    tol: f64,
) -> Result<Vec<Vec<C64>>, TransportError> {
    let bn = norm(rhs);
    let mut x: Vec<Vec<C64>> = match guess {
        Some(g) => g.to_vec(),
        None => rhs.iter().map(|r| vec![C64::default(); r.len()]).collect(),
    };
    if bn == 0.0 {
        return Ok(rhs.iter().map(|r| vec![C64::default(); r.len()]).collect());
    }
    let mut r = rhs.to_vec();
    axpy(&mut r, C64::from(-1.0), &op.apply(&x));
    let mut z = op.precondition(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z).re;
    for it in 0..MAX_ITER {
        let res = norm(&r) / bn;
        if res <= tol {
            return Ok(x);
        }
        let ap = op.apply(&p);
        let pap = dot(&p, &ap).re;
        if pap <= 0.0 || !pap.is_finite() {
            return Err(TransportError::SingularOperator { iterations: it, residual: res });
        }
        let a = rz / pap;
        axpy(&mut x, C64::from(a), &p);
        axpy(&mut r, C64::from(-a), &ap);
        z = op.precondition(&r);
        let rz_new = dot(&r, &z).re;
        let beta = rz_new / rz;
        rz = rz_new;
        for (ps, zs) in p.iter_mut().zip(&z) {
            ps.iter_mut().zip(zs).for_each(|(q, w)| *q = w + beta * *q);
        }
    }
    Err(TransportError::SingularOperator { iterations: MAX_ITER, residual: norm(&r) / bn })
}

/// `‖L Ψ - rhs‖ / ‖rhs‖` with the operator applied afresh.
pub fn psi_residual(op: &PsiOperator, psi: &[Vec<C64>], rhs: &[Vec<C64>]) -> f64 {
    let mut r = op.apply(psi);
    axpy(&mut r, C64::from(-1.0), rhs);
    let bn = norm(rhs);
    if bn == 0.0 { norm(&r) } else { norm(&r) / bn }
}
