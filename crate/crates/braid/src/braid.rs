use std::ops::Deref;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use topology::{validate_mapping_class, MappingClass};
use zlattice::IntMatrix;

use crate::rational::{rational_from_json, rational_to_json};
use crate::{BraidError, Permutation};

/// A point of the universal cover `R^2` of the Jacobian torus.
pub type Lift = [BigRational; 2];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Breakpoint {
    pub t: BigRational,
    pub p: Lift,
}

/// Piecewise-linear path `[0, 1] -> R^2`, linear between breakpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strand(Vec<Breakpoint>);

impl Strand {
    /// Times must run strictly upward from 0 to 1.
    pub fn new(points: Vec<Breakpoint>) -> Result<Self, BraidError> {
        let bad = |m: &str| Err(BraidError::InvalidStrand(m.into()));
        if points.len() < 2 {
            return bad("a strand needs at least two breakpoints");
        }
        if !points[0].t.is_zero() || !points[points.len() - 1].t.is_one() {
            return bad("strand times must start at 0 and end at 1");
        }
        if points.windows(2).any(|w| w[0].t >= w[1].t) {
            return bad("strand times must be strictly increasing");
        }
        Ok(Self(points))
    }

    /// Straight segment from `a` to `b`.
    pub fn segment(a: Lift, b: Lift) -> Self {
        Self(vec![
            Breakpoint { t: BigRational::zero(), p: a },
            Breakpoint { t: BigRational::one(), p: b },
        ])
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.0
    }

    pub fn start(&self) -> &Lift {
        &self.0[0].p
    }

    pub fn end(&self) -> &Lift {
        &self.0[self.0.len() - 1].p
    }

    /// Exact position at time `t ∈ [0, 1]`.
    pub fn at(&self, t: &BigRational) -> Lift {
        let i = self.0.partition_point(|b| &b.t <= t).clamp(1, self.0.len() - 1);
        let (a, b) = (&self.0[i - 1], &self.0[i]);
        let s = (t - &a.t) / (&b.t - &a.t);
        [0, 1].map(|c| &a.p[c] + (&b.p[c] - &a.p[c]) * &s)
    }

    /// Same path translated by an integer vector.
    pub fn translated(&self, w: [i64; 2]) -> Self {
        Self(
            self.0
                .iter()
                .map(|b| Breakpoint {
                    t: b.t.clone(),
                    p: [0, 1].map(|c| &b.p[c] + BigRational::from_integer(w[c].into())),
                })
                .collect(),
        )
    }
}

/// `N` strands in the cover of a genus-1 Jacobian, closed up by `f*` and `closing`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusBraid {
    mc: MappingClass,
    strands: Vec<Strand>,
    closing: Permutation,
}

/// A braid that passed [`braid_validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidBraid(TorusBraid);

impl Deref for ValidBraid {
    type Target = TorusBraid;
    fn deref(&self) -> &TorusBraid {
        &self.0
    }
}

impl ValidBraid {
    pub fn into_inner(self) -> TorusBraid {
        self.0
    }
}

pub(crate) fn apply(m: &IntMatrix, x: &Lift) -> Lift {
    [0, 1].map(|i| {
        BigRational::from_integer(m.get(i, 0).clone()) * &x[0]
            + BigRational::from_integer(m.get(i, 1).clone()) * &x[1]
    })
}

fn congruent(a: &Lift, b: &Lift) -> bool {
    (0..2).all(|c| (&a[c] - &b[c]).is_integer())
}

impl TorusBraid {
    pub fn new(mc: MappingClass, strands: Vec<Strand>, closing: Permutation) -> Result<Self, BraidError> {
        if mc.genus() != 1 {
            return Err(BraidError::InvalidStrand("torus braids need a genus-1 mapping class".into()));
        }
        if strands.is_empty() || strands.len() != closing.len() {
            return Err(BraidError::InvalidStrand(format!(
                "{} strands but a permutation of {} letters",
                strands.len(),
                closing.len()
            )));
        }
        Ok(Self { mc, strands, closing })
    }

    pub fn n(&self) -> usize {
        self.strands.len()
    }

    pub fn mapping_class(&self) -> &MappingClass {
        &self.mc
    }

    pub fn strands(&self) -> &[Strand] {
        &self.strands
    }

    pub fn closing_permutation(&self) -> &Permutation {
        &self.closing
    }

    pub fn from_json(s: &str) -> Result<Self, BraidError> {
        let file: BraidFile = serde_json::from_str(s).map_err(|e| BraidError::Parse(e.to_string()))?;
        let fstar = parse_matrix(&file.fstar)?;
        let mc = validate_mapping_class(1, fstar)?;
        if file.strands.len() != file.n {
            return Err(BraidError::Parse(format!("N = {} but {} strands", file.n, file.strands.len())));
        }
        let images: Vec<usize> = file
            .closing_permutation
            .iter()
            .map(|&i| i.checked_sub(1).ok_or_else(|| BraidError::Parse("permutation is 1-based".into())))
            .collect::<Result<_, _>>()?;
        let closing = Permutation::new(images)
            .ok_or_else(|| BraidError::Parse("closing_permutation is not a permutation".into()))?;
        let strands = file
            .strands
            .iter()
            .map(|pts| {
                let bps = pts
                    .iter()
                    .map(|[t, x, y]| {
                        Ok(Breakpoint {
                            t: rational_from_json(t)?,
                            p: [rational_from_json(x)?, rational_from_json(y)?],
                        })
                    })
                    .collect::<Result<Vec<_>, BraidError>>()?;
                Strand::new(bps)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(mc, strands, closing)
    }

    pub fn to_json(&self) -> String {
        let f = self.mc.fstar();
        let fstar = match f.to_i64() {
            Some(e) => serde_json::json!([[e[0], e[1]], [e[2], e[3]]]),
            None => serde_json::Value::String(f.to_string()),
        };
        let file = BraidFile {
            n: self.n(),
            fstar,
            closing_permutation: self.closing.images().iter().map(|i| i + 1).collect(),
            strands: self
                .strands
                .iter()
                .map(|s| {
                    s.0.iter()
                        .map(|b| [rational_to_json(&b.t), rational_to_json(&b.p[0]), rational_to_json(&b.p[1])])
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("braid serializes")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BraidFile {
    #[serde(rename = "N")]
    n: usize,
    fstar: serde_json::Value,
    closing_permutation: Vec<usize>,
    strands: Vec<Vec<[serde_json::Value; 3]>>,
}

/// `[[a, b], [c, d]]` or `"a,b;c,d"`.
fn parse_matrix(v: &serde_json::Value) -> Result<IntMatrix, BraidError> {
    if let Some(s) = v.as_str() {
        return s.parse().map_err(BraidError::from);
    }
    let bad = || BraidError::Parse(format!("fstar must be a 2x2 integer matrix, got {v}"));
    let rows = v.as_array().ok_or_else(bad)?;
    let mut data = Vec::new();
    for r in rows {
        for x in r.as_array().ok_or_else(bad)? {
            data.push(BigInt::from(x.as_i64().ok_or_else(bad)?));
        }
    }
    IntMatrix::new(rows.len(), data.len() / rows.len().max(1), data).map_err(|_| bad())
}

/// Smallest `s ∈ [0, 1]` with `r0 + s·dv ∈ Z^2`.
fn first_lattice_hit(r0: &Lift, dv: &Lift) -> Option<BigRational> {
    if dv.iter().all(Zero::is_zero) {
        return (r0[0].is_integer() && r0[1].is_integer()).then(BigRational::zero);
    }
    // walk the moving coordinate with the fewest integer crossings
    let c = if dv[0].is_zero() || (!dv[1].is_zero() && dv[1].abs() < dv[0].abs()) { 1 } else { 0 };
    let o = 1 - c;
    if dv[o].is_zero() && !r0[o].is_integer() {
        return None;
    }
    let (from, to) = (&r0[c], &r0[c] + &dv[c]);
    let check = |n: &BigInt| {
        let s = (BigRational::from_integer(n.clone()) - from) / &dv[c];
        (&r0[o] + &s * &dv[o]).is_integer().then_some(s)
    };
    if dv[c].is_positive() {
        let mut n = from.ceil().to_integer();
        let last = to.floor().to_integer();
        while n <= last {
            if let Some(s) = check(&n) {
                return Some(s);
            }
            n += 1;
        }
    } else {
        let mut n = from.floor().to_integer();
        let last = to.ceil().to_integer();
        while n >= last {
            if let Some(s) = check(&n) {
                return Some(s);
            }
            n -= 1;
        }
    }
    None
}

/// Earliest time at which strands `a` and `b` meet in the torus.
fn first_collision(a: &Strand, b: &Strand) -> Option<BigRational> {
    let mut times: Vec<&BigRational> = a.0.iter().chain(&b.0).map(|bp| &bp.t).collect();
    times.sort();
    times.dedup();
    for w in times.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let (pa0, pb0, pa1, pb1) = (a.at(t0), b.at(t0), a.at(t1), b.at(t1));
        let r0 = [0, 1].map(|c| &pa0[c] - &pb0[c]);
        let dv = [0, 1].map(|c| (&pa1[c] - &pb1[c]) - &r0[c]);
        if let Some(s) = first_lattice_hit(&r0, &dv) {
            return Some(t0 + s * (t1 - t0));
        }
    }
    None
}

/// Checks strand separation exactly, then the twisted endpoint matching.
pub fn braid_validate(b: TorusBraid) -> Result<ValidBraid, BraidError> {
    let n = b.n();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let hit = pairs
        .par_iter()
        .filter_map(|&(i, j)| first_collision(&b.strands[i], &b.strands[j]).map(|t| (t, i, j)))
        .min();
    if let Some((t, i, j)) = hit {
        return Err(BraidError::DiagonalCollision { time: t.to_string(), strands: (i + 1, j + 1) });
    }
    let tracked = track_endpoints(&b)?;
    for k in 0..n {
        if tracked.apply(k) != b.closing.apply(k) {
            return Err(BraidError::EndpointMismatch { strand: k + 1 });
        }
    }
    Ok(ValidBraid(b))
}

/// `ρ(k)` is the strand whose start is congruent to `f*·γ_k(1)`.
fn track_endpoints(b: &TorusBraid) -> Result<Permutation, BraidError> {
    let f = b.mc.fstar();
    let mut images = Vec::with_capacity(b.n());
    for (k, s) in b.strands.iter().enumerate() {
        let target = apply(f, s.end());
        let j = b
            .strands
            .iter()
            .position(|o| congruent(o.start(), &target))
            .ok_or(BraidError::EndpointMismatch { strand: k + 1 })?;
        images.push(j);
    }
    Permutation::new(images).ok_or(BraidError::EndpointMismatch { strand: 1 })
}

/// Covering monodromy of the braid, recovered from strand tracking.
pub fn braid_permutation(b: &ValidBraid) -> Permutation {
    track_endpoints(b).expect("validated braid has matching endpoints")
}
