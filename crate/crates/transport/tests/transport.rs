use std::f64::consts::PI;
use std::time::Instant;

use braid::{braid_permutation, braid_validate, Breakpoint, Permutation, Strand, TorusBraid};
use num_complex::Complex64 as C64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topology::validate_mapping_class;
use transport::*;
use vortexfield::*;
use zlattice::IntMatrix;

fn circle_family(tau: TauProfile) -> FlatBundleFamily {
    FlatBundleFamily {
        paths: vec![
            HolonomyPath::Circle { center: [0.25, 0.25], radius: 0.05, turns: 1.0, phase: 0.0 },
            HolonomyPath::constant([0.7, 0.6]),
        ],
        fstar: [[1, 0], [0, 1]],
        closing: vec![0, 1],
        tau,
    }
}

fn perturbed() -> TauProfile {
    TauProfile { mean: 1.0, amp: 0.1, osc: 0.0, mode: [1, 0] }
}

fn seed(curve: &FlatCurve, fam: &FlatBundleFamily, k: usize) -> VortexConfig {
    vortex_solve(curve, &fam.holonomies(0.0), k, &fam.tau.tau(curve, 0.0)).unwrap()
}

#[test]
fn psi_zero_rhs() {
    let c = FlatCurve::square(16).unwrap();
    let cfg = vortex_solve(&c, &[[0.1, 0.2], [0.6, 0.3]], 0, &vec![1.0; c.len()]).unwrap();
    let op = PsiOperator::new(&c, &cfg.alpha, &cfg.holonomies, &cfg.phi);
    let zero = vec![vec![C64::default(); c.len()]; 2];
    assert_eq!(solve_psi(&op, &zero, 1e-10).unwrap(), zero);
}

#[test]
fn psi_flat_constant_case() {
    let c = FlatCurve::new(C64::new(0.2, 1.1), 16, 2.0 * PI).unwrap();
    let tau = 1.4;
    let cfg = vortex_solve(&c, &[[0.3, 0.1]], 0, &vec![tau; c.len()]).unwrap();
    let op = PsiOperator::new(&c, &cfg.alpha, &cfg.holonomies, &cfg.phi);
    let bdot = C64::new(0.3, -0.7);
    let rhs = vec![cfg.phi[0].iter().map(|f| bdot * f / 2f64.sqrt()).collect::<Vec<_>>()];
    let psi = solve_psi(&op, &rhs, 1e-12).unwrap();
    for (p, r) in psi[0].iter().zip(&rhs[0]) {
        assert!((p - 2.0 * r / (2.0 * tau)).norm() < 1e-12);
    }
}

#[test]
fn psi_random_rhs_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c = FlatCurve::square(16).unwrap();
    let tau = c.sample(|x, y| 1.0 + 0.2 * (2.0 * PI * (x + y)).cos());
    let cfg = vortex_solve(&c, &[[0.1, 0.2], [0.6, 0.3], [0.4, 0.8]], 1, &tau).unwrap();
    let op = PsiOperator::new(&c, &cfg.alpha, &cfg.holonomies, &cfg.phi);
    let rhs: Vec<Vec<C64>> =
        (0..3).map(|_| (0..c.len()).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()).collect();
    let psi = solve_psi(&op, &rhs, 1e-11).unwrap();
    assert!(psi_residual(&op, &psi, &rhs) < 1e-10);
    // the operator is Hermitian
    let a: Vec<Vec<C64>> = rhs.iter().map(|r| r.iter().map(|z| z * C64::new(0.5, 0.5)).collect()).collect();
    let ip = |x: &[Vec<C64>], y: &[Vec<C64>]| -> C64 { x.iter().zip(y).map(|(p, q)| c.inner(p, q)).sum() };
    let lhs = ip(&op.apply(&rhs), &a);
    let rhs2 = ip(&rhs, &op.apply(&a));
    assert!((lhs - rhs2).norm() < 1e-10 * lhs.norm());
}

#[test]
fn constant_family_is_stationary() {
    let c = FlatCurve::square(16).unwrap();
    let fam = FlatBundleFamily {
        paths: vec![HolonomyPath::constant([0.2, 0.3]), HolonomyPath::constant([0.6, 0.1])],
        fstar: [[1, 0], [0, 1]],
        closing: vec![0, 1],
        tau: perturbed(),
    };
    let start = seed(&c, &fam, 1);
    let tr = transport(&c, &fam, &start, 20).unwrap();
    let end = tr.last();
    assert_eq!(end.t, 1.0);
    assert!(sup_norm_c(&end.alpha.iter().zip(&start.alpha).map(|(a, b)| a - b).collect::<Vec<_>>()) < 1e-12);
    assert!(sup_norm_c(&end.phi[1].iter().zip(&start.phi[1]).map(|(a, b)| a - b).collect::<Vec<_>>()) < 1e-12);
}

#[test]
fn flat_case_tracks_holonomy_with_fourth_order() {
    let c = FlatCurve::square(16).unwrap();
    let fam = circle_family(TauProfile::constant(1.0));
    let start = seed(&c, &fam, 0);
    // raw integrator order: no step rejection, which would mix step sizes
    let run = |s: usize| {
        let opts = TransportOptions { moment_tol: 1e-2, max_halvings: 0, ..TransportOptions::new(s) };
        transport_opts(&c, &fam, &start, &opts).unwrap().tracking_error()
    };
    let errs: Vec<f64> = [10, 20, 40].into_iter().map(run).collect();
    eprintln!("tracking errors {errs:?}");
    let (r1, r2) = (errs[0] / errs[1], errs[1] / errs[2]);
    assert!(errs[2] < 1e-7, "{errs:?}");
    assert!((12.0..20.0).contains(&r1) && (12.0..20.0).contains(&r2), "{errs:?}");
}

#[test]
fn perturbed_transport_conserves() {
    let c = FlatCurve::square(16).unwrap();
    let fam = circle_family(perturbed());
    let start = seed(&c, &fam, 0);
    let clock = Instant::now();
    let tr = transport(&c, &fam, &start, 200).unwrap();
    eprintln!("perturbed transport: {:?}, {} states", clock.elapsed(), tr.states.len());
    assert!(tr.max_moment_residual() <= 1e-6);
    let l0 = tr.initial().phi_l2;
    assert!(tr.states.iter().all(|s| (s.phi_l2 - l0).abs() < 1e-6));
    assert!(tr.tracking_error() < 1e-6, "{}", tr.tracking_error());
    assert_eq!(tr.rejections, 0);
    let lines = tr.to_json_lines();
    assert_eq!(lines.lines().count(), tr.states.len());
    let first: serde_json::Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert_eq!(first["t"], 0.0);
}

#[test]
fn oscillating_tau_keeps_moment_map() {
    let c = FlatCurve::square(16).unwrap();
    let fam = circle_family(TauProfile { mean: 1.0, amp: 0.1, osc: 0.05, mode: [1, 1] });
    let start = seed(&c, &fam, 0);
    let tr = transport(&c, &fam, &start, 200).unwrap();
    assert!(tr.max_moment_residual() <= 1e-6);
    assert!(tr.tracking_error() < 1e-6);
}

#[test]
fn time_reversal_returns() {
    let c = FlatCurve::square(16).unwrap();
    let fam = circle_family(perturbed());
    let start = seed(&c, &fam, 0);
    let fwd = transport(&c, &fam, &start, 100).unwrap();
    let mid = fwd.config(fwd.last());
    let back = transport(&c, &fam.reversed(), &mid, 100).unwrap();
    let end = back.last();
    let z0 = fwd.initial().zeta;
    assert!(toroidal_distance(end.zeta, z0) < 1e-6);
    let diff = |a: &[C64], b: &[C64]| sup_norm_c(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>());
    assert!(diff(&end.phi[0], &start.phi[0]) < 1e-5);
    assert!(diff(&end.alpha, &start.alpha) < 1e-5);
}

#[test]
fn rejects_foreign_start() {
    let c = FlatCurve::square(8).unwrap();
    let fam = circle_family(TauProfile::constant(1.0));
    let other = vortex_solve(&c, &[[0.0, 0.0], [0.5, 0.5]], 0, &vec![1.0; c.len()]).unwrap();
    assert!(matches!(transport(&c, &fam, &other, 4), Err(TransportError::Vortex(VortexError::HolonomyMismatch { .. }))));
    let mut bad = seed(&c, &fam, 0);
    bad.phi[0].iter_mut().for_each(|z| *z *= 1.1);
    assert!(matches!(transport(&c, &fam, &bad, 4), Err(TransportError::TrackingLoss { .. })));
}

fn q(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

fn strand(pts: &[(f64, f64, f64)]) -> Strand {
    Strand::new(pts.iter().map(|&(t, x, y)| Breakpoint { t: q(t), p: [q(x), q(y)] }).collect()).unwrap()
}

fn torus_braid(strands: Vec<Strand>, closing: Vec<usize>) -> braid::ValidBraid {
    let mc = validate_mapping_class(1, IntMatrix::identity(2)).unwrap();
    braid_validate(TorusBraid::new(mc, strands, Permutation::new(closing).unwrap()).unwrap()).unwrap()
}

fn monodromy_of(b: &braid::ValidBraid, steps: usize) -> Permutation {
    let c = FlatCurve::square(16).unwrap();
    let fam = family_from_braid(b, perturbed());
    numeric_monodromy(&c, &fam, b, steps).unwrap()
}

#[test]
fn trivial_braid_gives_identity() {
    let b = torus_braid(vec![strand(&[(0.0, 0.25, 0.25), (1.0, 0.25, 0.25)]), strand(&[(0.0, 0.75, 0.5), (1.0, 0.75, 0.5)])], vec![0, 1]);
    let p = monodromy_of(&b, 20);
    assert!(p.is_identity());
}

#[test]
fn swap_braid_gives_transposition() {
    let b = torus_braid(
        vec![
            strand(&[(0.0, 0.25, 0.25), (0.5, 0.5, 0.4), (1.0, 0.75, 0.25)]),
            strand(&[(0.0, 0.75, 0.25), (0.5, 0.5, 0.125), (1.0, 0.25, 0.25)]),
        ],
        vec![1, 0],
    );
    let p = monodromy_of(&b, 40);
    assert_eq!(p, braid_permutation(&b));
    assert_eq!(p.to_string(), "(1 2)");
}

/// `n` points on a circle, each turning `shift/n` of the way around; glued by `k ↦ k + shift`.
fn rotation_braid(n: usize, center: (f64, f64), r: f64, shift: usize, pieces: usize) -> braid::ValidBraid {
    let pt = |s: f64| (center.0 + r * (2.0 * PI * s).cos(), center.1 + r * (2.0 * PI * s).sin());
    let starts: Vec<(f64, f64)> = (0..n).map(|k| pt(k as f64 / n as f64)).collect();
    let strands = (0..n)
        .map(|k| {
            let mut pts: Vec<(f64, f64, f64)> = (0..pieces)
                .map(|i| {
                    let t = i as f64 / pieces as f64;
                    let (x, y) = pt((k as f64 + t * shift as f64) / n as f64);
                    (t, x, y)
                })
                .collect();
            // exact endpoint, so the gluing is exact in rationals
            let (x, y) = starts[(k + shift) % n];
            pts.push((1.0, x, y));
            strand(&pts)
        })
        .collect();
    torus_braid(strands, (0..n).map(|k| (k + shift) % n).collect())
}

#[test]
fn three_strand_rotation() {
    let b = rotation_braid(3, (0.5, 0.5), 0.25, 1, 4);
    let p = monodromy_of(&b, 40);
    assert_eq!(p, braid_permutation(&b));
    assert_eq!(p, Permutation::long_cycle(3));
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig::with_cases(8))]

    #[test]
    fn random_rotation_braids(cx in 0.0f64..1.0, cy in 0.0f64..1.0, r in 0.12f64..0.3, shift in 0usize..3, pieces in 3usize..7) {
        let b = rotation_braid(3, (cx, cy), r, shift, pieces);
        proptest::prop_assert_eq!(monodromy_of(&b, 40), braid_permutation(&b));
    }
}

#[test]
fn constructed_braids_match_census_permutation() {
    use std::collections::BTreeMap;
    for rows in [[[-1i64, 0], [0, -1]], [[2, 1], [1, 1]], [[1, 1], [-1, 0]], [[0, -1], [1, 0]]] {
        let m = validate_mapping_class(1, IntMatrix::from_rows(&[&rows[0], &rows[1]])).unwrap();
        let label = topology::jacobian_fixed_points(&m).unwrap().pop().unwrap().label;
        for n in [2, 3] {
            let b = braid::braid_construct(&m, &BTreeMap::from([(label.clone(), 1)]), n).unwrap();
            let clock = Instant::now();
            let p = monodromy_of(&b, 40);
            eprintln!("{rows:?} n={n}: {p} in {:?}", clock.elapsed());
            assert_eq!(p, braid_permutation(&b));
        }
    }
}
