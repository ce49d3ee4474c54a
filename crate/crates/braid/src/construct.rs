use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{Matrix2, SymmetricEigen, Vector2};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use topology::{jacobian_fixed_points, MappingClass, TopologyError};
use zlattice::{GroupElement, IntMatrix, TorusPoint};

use crate::braid::{apply, Breakpoint, Lift};
use crate::{braid_validate, BraidError, Permutation, Strand, TorusBraid, ValidBraid};

/// Breakpoints per constructed strand.
const SAMPLES: i64 = 32;

/// Denominator used when rounding float breakpoints to rationals.
const GRID: i64 = 1_000_000_000;

fn to_q(x: f64) -> BigRational {
    BigRational::new(BigInt::from((x * GRID as f64).round() as i64), BigInt::from(GRID))
}

fn to_f(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn to_f64_matrix(m: &IntMatrix) -> Matrix2<f64> {
    let e = m.to_i64().expect("small entries");
    Matrix2::new(e[0] as f64, e[1] as f64, e[2] as f64, e[3] as f64)
}

/// Path `t ↦ Rot(tφ)·P^t` in SL(2, R) from the identity to `T = Rot(φ)·P`.
struct SlPath {
    phi: f64,
    basis: Matrix2<f64>,
    log_eig: Vector2<f64>,
}

impl SlPath {
    fn new(t: Matrix2<f64>) -> Self {
        let eig = SymmetricEigen::new(t.transpose() * t);
        let sqrt_eig = eig.eigenvalues.map(f64::sqrt);
        let p_inv = eig.eigenvectors * Matrix2::from_diagonal(&sqrt_eig.map(|x| 1.0 / x)) * eig.eigenvectors.transpose();
        let q = t * p_inv;
        Self { phi: q[(1, 0)].atan2(q[(0, 0)]), basis: eig.eigenvectors, log_eig: sqrt_eig.map(f64::ln) }
    }

    fn at(&self, s: f64) -> Matrix2<f64> {
        let (c, si) = ((s * self.phi).cos(), (s * self.phi).sin());
        let rot = Matrix2::new(c, -si, si, c);
        let pow = self.basis * Matrix2::from_diagonal(&self.log_eig.map(|l| (s * l).exp())) * self.basis.transpose();
        rot * pow
    }

    /// Largest operator norm over the sample times.
    fn max_norm(&self) -> f64 {
        (0..=SAMPLES)
            .map(|i| self.at(i as f64 / SAMPLES as f64).norm().max(1.0))
            .fold(1.0, f64::max)
    }
}

/// Strand `center + M(t)·v` sampled on the shared grid, with exact endpoints.
fn strand_along(center: &Lift, path: &SlPath, v: Vector2<f64>, start: Lift, end: Lift) -> Strand {
    let c = [to_f(&center[0]), to_f(&center[1])];
    let mut pts = vec![Breakpoint { t: BigRational::from_integer(0.into()), p: start }];
    for i in 1..SAMPLES {
        let s = i as f64 / SAMPLES as f64;
        let w = path.at(s) * v;
        pts.push(Breakpoint {
            t: BigRational::new(i.into(), SAMPLES.into()),
            p: [to_q(c[0] + w[0]), to_q(c[1] + w[1])],
        });
    }
    pts.push(Breakpoint { t: BigRational::from_integer(1.into()), p: end });
    Strand::new(pts).expect("grid is increasing")
}

fn lift_of(p: &TorusPoint) -> Lift {
    [p.coords()[0].clone(), p.coords()[1].clone()]
}

fn plus(x: &Lift, v: &Lift) -> Lift {
    [&x[0] + &v[0], &x[1] + &v[1]]
}

fn torus_distance(a: &Lift, b: &Lift) -> f64 {
    let d: Vec<f64> = (0..2)
        .map(|c| {
            let x = to_f(&(&a[c] - &b[c]));
            (x - x.round()).abs()
        })
        .collect();
    d[0].hypot(d[1])
}

/// A braid whose census has at least `targets[c]` fixed strands of each class `c`.
///
/// Each requested fixed strand runs from `x_c + r·e` to `x_c + r·(f*)^{-1} e` around the
/// fixed point `x_c` labelled `c`; strands of one class use distinct radii. Remaining
/// strands form one cycle near a fixed point, except a single leftover strand, which is
/// necessarily fixed.
pub fn braid_construct(
    mc: &MappingClass,
    targets: &BTreeMap<GroupElement, usize>,
    n: usize,
) -> Result<ValidBraid, BraidError> {
    let requested: usize = targets.values().sum();
    if requested > n {
        return Err(BraidError::TargetsExceedRank { requested, rank: n });
    }
    if n == 0 {
        return Err(BraidError::InvalidStrand("a braid needs at least one strand".into()));
    }
    let group = mc.torsion_group();
    if let Some(c) = targets.keys().find(|c| !group.contains(c)) {
        return Err(BraidError::UnrealizableClass(c.to_string()));
    }
    let fps = jacobian_fixed_points(mc).map_err(|e| match e {
        TopologyError::NonIsolatedFixedSet => BraidError::NonIsolatedFixedSet,
        other => other.into(),
    })?;

    let f = mc.fstar();
    let finv = {
        let e = f.to_i64().ok_or_else(|| BraidError::InvalidStrand("f* entries too large".into()))?;
        IntMatrix::from_i64(2, 2, &[e[3], -e[1], -e[2], e[0]]).expect("2x2")
    };
    let finv_f = to_f64_matrix(&finv);

    // How many strands sit at each fixed point.
    let mut at_point: Vec<usize> = fps.iter().map(|p| targets.get(&p.label).copied().unwrap_or(0)).collect();
    let leftover = n - requested;
    if leftover == 1 {
        at_point[0] += 1;
    }
    let pad = if leftover >= 2 {
        let i = (0..fps.len()).min_by_key(|&i| (at_point[i], i)).expect("a fixed point exists");
        Some(i)
    } else {
        None
    };

    let fixed_path = SlPath::new(finv_f);
    let m = leftover.max(1);
    let (c, s) = ((2.0 * PI / m as f64).cos(), (2.0 * PI / m as f64).sin());
    let rot = Matrix2::new(c, -s, s, c);
    let pad_path = SlPath::new(finv_f * rot);
    let (a, a_pad) = (fixed_path.max_norm(), pad_path.max_norm());

    let mut delta = 1.0_f64;
    for (i, p) in fps.iter().enumerate() {
        for q in &fps[i + 1..] {
            delta = delta.min(torus_distance(&lift_of(&p.point), &lift_of(&q.point)));
        }
    }
    let limit = delta / 3.0;
    let rho = limit / (1.5 * a_pad);
    let shares = pad.is_some_and(|i| at_point[i] > 0);
    let r_max = if shares { rho / (1.5 * a_pad * a) } else { limit / (1.5 * a) };

    let mut strands = Vec::new();
    for (i, fp) in fps.iter().enumerate() {
        let k = at_point[i];
        let x = lift_of(&fp.point);
        for j in 0..k {
            let r = to_q(r_max * (j + 1) as f64 / k as f64);
            let e: Lift = [r.clone(), BigRational::from_integer(0.into())];
            let v = Vector2::new(to_f(&r), 0.0);
            strands.push(strand_along(&x, &fixed_path, v, plus(&x, &e), plus(&x, &apply(&finv, &e))));
        }
    }
    let fixed_count = strands.len();
    if let Some(i) = pad {
        let x = lift_of(&fps[i].point);
        let v: Vec<Lift> = (0..m)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / m as f64;
                [to_q(rho * th.cos()), to_q(rho * th.sin())]
            })
            .collect();
        for k in 0..m {
            let vf = Vector2::new(to_f(&v[k][0]), to_f(&v[k][1]));
            let end = plus(&x, &apply(&finv, &v[(k + 1) % m]));
            strands.push(strand_along(&x, &pad_path, vf, plus(&x, &v[k]), end));
        }
    }

    let mut images: Vec<usize> = (0..fixed_count).collect();
    if pad.is_some() {
        images.extend((0..m).map(|k| fixed_count + (k + 1) % m));
    }
    let closing = Permutation::new(images).expect("cycle structure is a permutation");
    let braid = TorusBraid::new(mc.clone(), strands, closing)?;
    braid_validate(braid).map_err(|e| BraidError::ConstructionFailed(e.to_string()))
}
