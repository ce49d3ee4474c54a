use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::{spinc_classes, MappingClass, SpinCClass, TopologyError};

/// Hypotheses the count relies on but which are never checked numerically.
const ASSUMPTIONS: [&str; 2] = [
    "bundle E is semistable of degree 0",
    "perturbation is generic (regular moduli spaces)",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountRow {
    pub degree: i64,
    pub torsion_class: String,
    pub count: i64,
}

/// Signed multi-monopole counts for every spin^c class of one degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountTable {
    pub rank: u32,
    pub degree: i64,
    pub genus: usize,
    /// `det(1 - f*)` in decimal.
    pub det: String,
    /// `coker(1 - f*)` as a sum of cyclic groups.
    pub group: String,
    /// Count shared by every class of this degree.
    pub count_per_class: i64,
    /// Empty when the group is infinite; the per-class count then still applies.
    pub rows: Vec<CountRow>,
    pub assumptions: Vec<String>,
}

impl CountTable {
    /// Sum over enumerated classes.
    pub fn total(&self) -> i64 {
        self.rows.iter().map(|r| r.count).sum()
    }

    pub fn to_json(&self) -> Result<String, TopologyError> {
        serde_json::to_string_pretty(self).map_err(|e| TopologyError::Serialize(e.to_string()))
    }

    /// Columns `degree,torsion_class,count`.
    pub fn to_csv(&self) -> Result<String, TopologyError> {
        let ser = |e: csv::Error| TopologyError::Serialize(e.to_string());
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.rows.is_empty() {
            w.write_record(["degree", "torsion_class", "count"]).map_err(ser)?;
        }
        for row in &self.rows {
            w.serialize(row).map_err(ser)?;
        }
        let bytes = w.into_inner().map_err(|e| TopologyError::Serialize(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// `sign(det(1 - f*)) * N * (d + 1 - g)` for each degree-`d` class, valid for `d > 2g - 2`.
pub fn count_large_d(mc: &MappingClass, rank: u32, d: i64) -> Result<CountTable, TopologyError> {
    if rank == 0 {
        return Err(TopologyError::RankTooSmall);
    }
    let g = mc.genus() as i64;
    let bound = 2 * g - 2;
    if d <= bound {
        return Err(TopologyError::DegreeTooSmall { d, bound });
    }
    let det = mc.lefschetz_det();
    let sign: i64 = if det.is_zero() { 0 } else if det.is_positive() { 1 } else { -1 };
    let per_class = sign * i64::from(rank) * (d + 1 - g);
    let rows = if det.is_zero() {
        Vec::new()
    } else {
        spinc_classes(mc, d)?
            .into_iter()
            .map(|SpinCClass { degree, torsion_class }| CountRow {
                degree,
                torsion_class: torsion_class.to_string(),
                count: per_class,
            })
            .collect()
    };
    Ok(CountTable {
        rank,
        degree: d,
        genus: mc.genus(),
        det: det.to_string(),
        group: mc.torsion_group().to_string(),
        count_per_class: per_class,
        rows,
        assumptions: ASSUMPTIONS.iter().map(|s| s.to_string()).collect(),
    })
}

/// Complex dimension `N d - (N - 1)(g - 1)` of the framed multi-vortex moduli space.
pub fn moduli_dimension(rank: u32, d: i64, g: usize) -> i64 {
    let n = i64::from(rank);
    n * d - (n - 1) * (g as i64 - 1)
}

/// `N^g`, the number of points of a zero-dimensional moduli space for generic E.
pub fn dimension_zero_point_count(rank: u32, g: usize) -> BigInt {
    num_traits::pow(BigInt::from(rank), g)
}

/// Genus `N^g (g - 1) + 1` of a one-dimensional moduli space for generic E.
pub fn dimension_one_curve_genus(rank: u32, g: usize) -> Option<i64> {
    (dimension_zero_point_count(rank, g) * BigInt::from(g as i64 - 1) + BigInt::from(1)).to_i64()
}
