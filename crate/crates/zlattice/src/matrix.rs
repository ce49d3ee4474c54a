use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::LatticeError;

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self, LatticeError> {
        if rows == 0 || cols == 0 {
            return Err(LatticeError::Shape("empty matrix".into()));
        }
        if data.len() != rows * cols {
            return Err(LatticeError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Result<Self, LatticeError> {
        Self::new(rows, cols, data.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// Build from nested rows; panics on ragged input.
    pub fn from_rows(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let flat: Vec<i64> = rows.iter().flat_map(|row| row.iter().copied()).collect();
        Self::from_i64(r, c, &flat).expect("non-empty")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub(crate) fn at_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }

    /// Entries as `i64` if all fit.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        use num_traits::ToPrimitive;
        self.data.iter().map(|x| x.to_i64()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix, LatticeError> {
        if self.cols != rhs.rows {
            return Err(LatticeError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    *out.at_mut(i, j) += a * rhs.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &x[j]).sum())
            .collect()
    }

    pub fn sub(&self, rhs: &IntMatrix) -> Result<IntMatrix, LatticeError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(LatticeError::Shape("sub of mismatched shapes".into()));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, k: &BigInt) -> IntMatrix {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * k).collect() }
    }

    /// `1 - self` for square matrices.
    pub fn one_minus(&self) -> Result<IntMatrix, LatticeError> {
        if !self.is_square() {
            return Err(LatticeError::Shape("1 - A needs a square matrix".into()));
        }
        Self::identity(self.rows).sub(self)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt, LatticeError> {
        if !self.is_square() {
            return Err(LatticeError::Shape("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a: Vec<Vec<BigInt>> =
            (0..n).map(|i| (0..n).map(|j| self.get(i, j).clone()).collect()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                    return Ok(BigInt::zero());
                };
                a.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().map(|d| d.abs().is_one()).unwrap_or(false)
    }
}

impl fmt::Display for IntMatrix {
    /// Row-major `a,b;c,d`, the same syntax `FromStr` accepts.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(";")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        Ok(())
    }
}

impl FromStr for IntMatrix {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for row in s.split(';') {
            let parsed: Result<Vec<BigInt>, _> = row
                .split(',')
                .map(|t| t.trim().parse::<BigInt>().map_err(|e| LatticeError::Parse(format!("{t:?}: {e}"))))
                .collect();
            rows.push(parsed?);
        }
        let c = rows[0].len();
        if rows.iter().any(|r| r.len() != c) {
            return Err(LatticeError::Parse("rows have different lengths".into()));
        }
        let r = rows.len();
        Self::new(r, c, rows.into_iter().flatten().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_small() {
        let m = IntMatrix::from_rows(&[&[2, 1], &[1, 1]]);
        assert_eq!(m.det().unwrap(), BigInt::from(1));
        let m = IntMatrix::from_rows(&[&[0, 1, 2], &[3, 4, 5], &[6, 7, 9]]);
        // cofactor expansion by hand: 0*(36-35) - 1*(27-30) + 2*(21-24) = -3
        assert_eq!(m.det().unwrap(), BigInt::from(-3));
    }

    #[test]
    fn parse_roundtrip() {
        let m: IntMatrix = "2,1;1,1".parse().unwrap();
        assert_eq!(m, IntMatrix::from_rows(&[&[2, 1], &[1, 1]]));
        assert_eq!(m.to_string(), "2,1;1,1");
        assert!("1,2;3".parse::<IntMatrix>().is_err());
        assert!("a,b".parse::<IntMatrix>().is_err());
    }

    #[test]
    fn one_minus() {
        let f = IntMatrix::from_rows(&[&[2, 1], &[1, 1]]);
        let a = f.one_minus().unwrap();
        assert_eq!(a, IntMatrix::from_rows(&[&[-1, -1], &[-1, 0]]));
        assert_eq!(a.det().unwrap(), BigInt::from(-1));
    }
}
