use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::{smith_normal_form, IntMatrix, LatticeError};

/// Point of `R^k / Z^k` with exact rational coordinates in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusPoint(Vec<BigRational>);

impl TorusPoint {
    /// Reduces every coordinate mod 1.
    pub fn new(coords: Vec<BigRational>) -> Self {
        Self(coords.into_iter().map(|x| frac(&x)).collect())
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.0.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// `A x`, which is an integer vector when `x` is a torsion point of `A`.
    pub fn image(&self, a: &IntMatrix) -> Vec<BigRational> {
        (0..a.rows())
            .map(|i| {
                (0..a.cols())
                    .map(|j| BigRational::from_integer(a.get(i, j).clone()) * &self.0[j])
                    .fold(BigRational::zero(), |s, t| s + t)
            })
            .collect()
    }
}

impl fmt::Display for TorusPoint {
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

/// Fractional part in `[0, 1)`.
pub(crate) fn frac(x: &BigRational) -> BigRational {
    let r = x - x.floor();
    debug_assert!(!r.is_negative());
    r
}

/// Points `x` of the torus with `A x` integral, sorted lexicographically.
///
/// Enumerated through the Smith decomposition: `x = V y` with `D y` integral.
pub fn torsion_fixed_points(a: &IntMatrix) -> Result<Vec<TorusPoint>, LatticeError> {
    if !a.is_square() {
        return Err(LatticeError::Shape("torsion points need a square matrix".into()));
    }
    if a.det()?.is_zero() {
        return Err(LatticeError::NonIsolatedFixedSet);
    }
    let s = smith_normal_form(a);
    let k = a.rows();
    let d = &s.invariant_factors;
    let mut counters = vec![BigInt::zero(); k];
    let mut out = Vec::new();
    loop {
        let y: Vec<BigRational> =
            (0..k).map(|i| BigRational::new(counters[i].clone(), d[i].clone())).collect();
        let x: Vec<BigRational> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| BigRational::from_integer(s.v.get(i, j).clone()) * &y[j])
                    .fold(BigRational::zero(), |acc, t| acc + t)
            })
            .collect();
        out.push(TorusPoint::new(x));
        // odometer over y_i in [0, d_i)
        let mut i = 0;
        loop {
            if i == k {
                out.sort();
                return Ok(out);
            }
            counters[i] += 1;
            if counters[i] < d[i].abs() {
                break;
            }
            counters[i] = BigInt::zero();
            i += 1;
        }
    }
}
