use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::Serialize;
use zlattice::GroupElement;

use crate::braid::apply;
use crate::{braid_permutation, Permutation, ValidBraid};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedStrand {
    pub strand: usize,
    pub class: GroupElement,
}

/// Fixed strands of the braid permutation and their spin^c torsion classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BraidCensus {
    pub permutation: Permutation,
    pub fixed_strands: Vec<FixedStrand>,
    pub counts: BTreeMap<GroupElement, usize>,
}

/// Class of a strand that closes up on itself: `[γ(0) - f*·γ(1)]` in `coker(1 - f*)`.
///
/// For a fixed strand the vector is integral, and a constant strand at a fixed point
/// `x` gets `[(1 - f*) x]`, the label used for Jacobian fixed points.
pub fn strand_class(b: &ValidBraid, k: usize) -> GroupElement {
    let s = &b.strands()[k];
    let image = apply(b.mapping_class().fstar(), s.end());
    let v: Vec<BigInt> = (0..2)
        .map(|c| {
            let d = &s.start()[c] - &image[c];
            assert!(d.is_integer(), "strand {k} does not close up");
            d.to_integer()
        })
        .collect();
    b.mapping_class().torsion_group().normalize(&v)
}

pub fn braid_census(b: &ValidBraid) -> BraidCensus {
    let permutation = braid_permutation(b);
    let fixed_strands: Vec<FixedStrand> = permutation
        .fixed_points()
        .into_iter()
        .map(|k| FixedStrand { strand: k, class: strand_class(b, k) })
        .collect();
    let mut counts = BTreeMap::new();
    for f in &fixed_strands {
        *counts.entry(f.class.clone()).or_insert(0) += 1;
    }
    BraidCensus { permutation, fixed_strands, counts }
}

#[derive(Serialize)]
struct CensusJson {
    permutation: String,
    fixed_strands: Vec<FixedStrandJson>,
    counts: Vec<CountJson>,
}

#[derive(Serialize)]
struct FixedStrandJson {
    strand: usize,
    torsion_class: String,
}

#[derive(Serialize)]
struct CountJson {
    torsion_class: String,
    count: usize,
}

impl BraidCensus {
    pub fn count(&self, class: &GroupElement) -> usize {
        self.counts.get(class).copied().unwrap_or(0)
    }

    fn rows(&self) -> Vec<CountJson> {
        self.counts
            .iter()
            .map(|(c, &n)| CountJson { torsion_class: c.to_string(), count: n })
            .collect()
    }

    /// Strand indices are 1-based.
    pub fn to_json(&self) -> String {
        let out = CensusJson {
            permutation: self.permutation.to_string(),
            fixed_strands: self
                .fixed_strands
                .iter()
                .map(|f| FixedStrandJson { strand: f.strand + 1, torsion_class: f.class.to_string() })
                .collect(),
            counts: self.rows(),
        };
        serde_json::to_string_pretty(&out).expect("census serializes")
    }

    /// Columns `torsion_class,count`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["torsion_class", "count"]).expect("in-memory write");
        for r in self.rows() {
            w.write_record([r.torsion_class, r.count.to_string()]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}
