use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::IntMatrix;

/// `U * A * V = D` with `U`, `V` unimodular and `D` diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub d: IntMatrix,
    /// `U^{-1}`, kept because coset lifting needs it.
    pub u_inv: IntMatrix,
    /// Diagonal of `D`, length `min(rows, cols)`; `d_1 | d_2 | ...`, zeros last.
    pub invariant_factors: Vec<BigInt>,
}

struct Work {
    d: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
}

impl Work {
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.d.cols() {
            let (x, y) = (self.d.get(a, j).clone(), self.d.get(b, j).clone());
            self.d.set(a, j, y);
            self.d.set(b, j, x);
        }
        for j in 0..self.u.cols() {
            let (x, y) = (self.u.get(a, j).clone(), self.u.get(b, j).clone());
            self.u.set(a, j, y);
            self.u.set(b, j, x);
        }
        for i in 0..self.u_inv.rows() {
            let (x, y) = (self.u_inv.get(i, a).clone(), self.u_inv.get(i, b).clone());
            self.u_inv.set(i, a, y);
            self.u_inv.set(i, b, x);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for m in [&mut self.d, &mut self.v] {
            for i in 0..m.rows() {
                let (x, y) = (m.get(i, a).clone(), m.get(i, b).clone());
                m.set(i, a, y);
                m.set(i, b, x);
            }
        }
    }

    /// row_dst += q * row_src
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.d.cols() {
            let s = self.d.get(src, j) * q;
            *self.d.at_mut(dst, j) += s;
        }
        for j in 0..self.u.cols() {
            let s = self.u.get(src, j) * q;
            *self.u.at_mut(dst, j) += s;
        }
        // U^{-1} picks up the inverse elementary matrix on the right.
        for i in 0..self.u_inv.rows() {
            let s = self.u_inv.get(i, dst) * q;
            *self.u_inv.at_mut(i, src) -= s;
        }
    }

    /// col_dst += q * col_src
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for m in [&mut self.d, &mut self.v] {
            for i in 0..m.rows() {
                let s = m.get(i, src) * q;
                *m.at_mut(i, dst) += s;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.d.cols() {
            let x = -self.d.get(r, j);
            self.d.set(r, j, x);
        }
        for j in 0..self.u.cols() {
            let x = -self.u.get(r, j);
            self.u.set(r, j, x);
        }
        for i in 0..self.u_inv.rows() {
            let x = -self.u_inv.get(i, r);
            self.u_inv.set(i, r, x);
        }
    }

    /// Smallest nonzero |entry| in the trailing block; ties go to the lowest row, then column.
    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in t..self.d.rows() {
            for j in t..self.d.cols() {
                let a = self.d.get(i, j);
                if a.is_zero() {
                    continue;
                }
                let m = a.abs();
                if best.as_ref().map_or(true, |(_, _, b)| m < *b) {
                    best = Some((i, j, m));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }
}

/// Smith normal form by pivoting on the smallest nonzero entry.
///
/// Output is a deterministic function of the input.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (r, c) = (a.rows(), a.cols());
    let mut w = Work {
        d: a.clone(),
        u: IntMatrix::identity(r),
        u_inv: IntMatrix::identity(r),
        v: IntMatrix::identity(c),
    };
    let steps = r.min(c);
    for t in 0..steps {
        loop {
            let Some((pi, pj)) = w.pivot(t) else { break };
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);
            let p = w.d.get(t, t).clone();
            let mut dirty = false;
            for i in t + 1..r {
                let q = w.d.get(i, t).div_floor(&p);
                w.add_row(i, t, &-q);
                dirty |= !w.d.get(i, t).is_zero();
            }
            for j in t + 1..c {
                let q = w.d.get(t, j).div_floor(&p);
                w.add_col(j, t, &-q);
                dirty |= !w.d.get(t, j).is_zero();
            }
            if dirty {
                continue;
            }
            // Enforce divisibility: pull an offending row into row t and redo.
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !w.d.get(i, j).is_multiple_of(&p)));
            match bad {
                Some(i) => w.add_row(t, i, &BigInt::from(1)),
                None => break,
            }
        }
        if w.d.get(t, t).is_negative() {
            w.negate_row(t);
        }
    }
    let invariant_factors = (0..steps).map(|i| w.d.get(i, i).clone()).collect();
    SmithDecomposition { u: w.u, v: w.v, d: w.d, u_inv: w.u_inv, invariant_factors }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn diag_2_3() {
        let a = IntMatrix::from_rows(&[&[2, 0], &[0, 3]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.invariant_factors, big(&[1, 6]));
        assert_eq!(s.u.mul(&a).unwrap().mul(&s.v).unwrap(), s.d);
    }

    #[test]
    fn identity_is_fixed() {
        for n in 1..5 {
            let a = IntMatrix::identity(n);
            let s = smith_normal_form(&a);
            assert_eq!(s.d, a);
            assert_eq!(s.u, a);
            assert_eq!(s.v, a);
        }
    }

    #[test]
    fn zero_matrix() {
        let a = IntMatrix::zeros(2, 2);
        let s = smith_normal_form(&a);
        assert_eq!(s.invariant_factors, big(&[0, 0]));
        assert_eq!(s.d, a);
    }

    #[test]
    fn u_inv_is_inverse() {
        let a = IntMatrix::from_rows(&[&[4, 6, 2], &[2, 8, 10], &[6, 2, 4]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.u.mul(&s.u_inv).unwrap(), IntMatrix::identity(3));
    }
}
