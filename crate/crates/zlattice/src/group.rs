use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{smith_normal_form, IntMatrix, SmithDecomposition};

/// Finitely generated abelian group `Z^r / im(A)`, kept in Smith coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinAbGroup {
    torsion_factors: Vec<BigInt>,
    free_rank: usize,
    /// Smith coordinate index of each torsion factor, then each free summand.
    torsion_slots: Vec<usize>,
    free_slots: Vec<usize>,
    u: IntMatrix,
    u_inv: IntMatrix,
}

/// Canonical coset representative: torsion coordinates in `[0, d_i)`, then free coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(pub Vec<BigInt>);

impl GroupElement {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// `coker(A) = Z^rows / A Z^cols`.
pub fn cokernel(a: &IntMatrix) -> FinAbGroup {
    FinAbGroup::from_smith(&smith_normal_form(a), a.rows())
}

impl FinAbGroup {
    pub fn from_smith(s: &SmithDecomposition, rows: usize) -> Self {
        let mut torsion_factors = Vec::new();
        let mut torsion_slots = Vec::new();
        let mut free_slots = Vec::new();
        for i in 0..rows {
            let d = s.invariant_factors.get(i).cloned().unwrap_or_else(BigInt::zero);
            if d.is_zero() {
                free_slots.push(i);
            } else if !d.is_one() {
                torsion_factors.push(d);
                torsion_slots.push(i);
            }
        }
        Self {
            free_rank: free_slots.len(),
            torsion_factors,
            torsion_slots,
            free_slots,
            u: s.u.clone(),
            u_inv: s.u_inv.clone(),
        }
    }

    pub fn torsion_factors(&self) -> &[BigInt] {
        &self.torsion_factors
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn ambient_rank(&self) -> usize {
        self.u.rows()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// `None` for infinite groups.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion_factors.iter().product())
    }

    /// Reduce an integer vector of the ambient lattice to its coset representative.
    pub fn normalize(&self, x: &[BigInt]) -> GroupElement {
        assert_eq!(x.len(), self.ambient_rank(), "vector length");
        let y = self.u.mul_vec(x);
        let mut out = Vec::with_capacity(self.torsion_factors.len() + self.free_rank);
        for (slot, d) in self.torsion_slots.iter().zip(&self.torsion_factors) {
            out.push(y[*slot].mod_floor(d));
        }
        for slot in &self.free_slots {
            out.push(y[*slot].clone());
        }
        GroupElement(out)
    }

    pub fn normalize_i64(&self, x: &[i64]) -> GroupElement {
        let v: Vec<BigInt> = x.iter().map(|&a| BigInt::from(a)).collect();
        self.normalize(&v)
    }

    /// An ambient integer vector in the coset of `g`.
    pub fn lift(&self, g: &GroupElement) -> Vec<BigInt> {
        let mut y = vec![BigInt::zero(); self.ambient_rank()];
        let k = self.torsion_slots.len();
        for (i, slot) in self.torsion_slots.iter().enumerate() {
            y[*slot] = g.0[i].clone();
        }
        for (i, slot) in self.free_slots.iter().enumerate() {
            y[*slot] = g.0[k + i].clone();
        }
        self.u_inv.mul_vec(&y)
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.0.len() == self.torsion_factors.len() + self.free_rank
            && g.0
                .iter()
                .zip(&self.torsion_factors)
                .all(|(x, d)| !x.is_negative() && x < d)
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![BigInt::zero(); self.torsion_factors.len() + self.free_rank])
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let x: Vec<BigInt> = self.lift(a).iter().zip(self.lift(b)).map(|(p, q)| p + q).collect();
        self.normalize(&x)
    }

    /// All elements in lexicographic order; `None` when the group is infinite.
    pub fn elements(&self) -> Option<Vec<GroupElement>> {
        if !self.is_finite() {
            return None;
        }
        let mut out = vec![GroupElement(Vec::new())];
        for d in &self.torsion_factors {
            let mut next = Vec::new();
            for e in &out {
                let mut k = BigInt::zero();
                while &k < d {
                    let mut v = e.0.clone();
                    v.push(k.clone());
                    next.push(GroupElement(v));
                    k += 1;
                }
            }
            out = next;
        }
        Some(out)
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion_factors.iter().map(|d| format!("Z/{d}")).collect();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 { "Z".into() } else { format!("Z^{}", self.free_rank) });
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}
