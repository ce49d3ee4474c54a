use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vortexfield::*;

fn random_field(rng: &mut ChaCha8Rng, len: usize) -> Vec<C64> {
    (0..len).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

/// Band-limited random field (modes |m| ≤ 3), so pointwise products stay resolved.
fn smooth_field(curve: &FlatCurve, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let mut f = vec![C64::default(); curve.len()];
    for mx in -3i64..=3 {
        for my in -3i64..=3 {
            let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / (1.0 + (mx * mx + my * my) as f64);
            for (p, v) in f.iter_mut().enumerate() {
                let (x, y) = curve.point(p);
                *v += c * C64::from_polar(1.0, 2.0 * PI * (mx as f64 * x + my as f64 * y));
            }
        }
    }
    f
}

fn cos_tau(curve: &FlatCurve, mean: f64, amp: f64) -> Vec<f64> {
    curve.sample(|x, _| mean + amp * (2.0 * PI * x).cos())
}

#[test]
fn constants_are_holomorphic_for_trivial_holonomy() {
    let c = FlatCurve::new(C64::new(0.3, 1.2), 16, 2.0 * PI).unwrap();
    let ctx = DolbeaultContext::new(&c, [0.0, 0.0], None);
    let s = TwistedField { twist: [0.0, 0.0], data: vec![C64::new(0.7, -0.2); c.len()] };
    assert!(sup_norm_c(&ctx.apply(&s).unwrap().data) < 1e-14);
}

/// `∂/∂z̄` of `e^{2πi(Mx + Ny)}` worked out from `x, y` as functions of `z, z̄`,
/// times `√2` for the unit frame `dz̄/√2`.
fn mode_symbol(modulus: C64, lambda: f64, m: f64, n: f64) -> C64 {
    let dx_dzbar = modulus / (lambda * (modulus - modulus.conj()));
    let dy_dzbar = -1.0 / (lambda * (modulus - modulus.conj()));
    2f64.sqrt() * 2.0 * PI * C64::i() * (m * dx_dzbar + n * dy_dzbar)
}

#[test]
fn single_mode_eigen_action() {
    let modulus = C64::new(0.4, 0.9);
    let c = FlatCurve::new(modulus, 16, 2.0 * PI).unwrap();
    let theta = [0.2, -0.35];
    let ctx = DolbeaultContext::new(&c, theta, None);
    for (m, n) in [(0i64, 0i64), (1, 0), (0, 1), (-3, 2), (5, -7)] {
        let e = c.sample(|x, y| C64::from_polar(1.0, 2.0 * PI * (m as f64 * x + n as f64 * y)));
        let out = ctx.apply(&TwistedField { twist: theta, data: e.clone() }).unwrap();
        let want = mode_symbol(modulus, c.lambda(), m as f64 + theta[0], n as f64 + theta[1]);
        for (o, x) in out.data.iter().zip(&e) {
            assert!((o - want * x).norm() < 1e-12, "mode ({m},{n})");
        }
    }
}

#[test]
fn dolbeault_adjoint_pairing() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let c = FlatCurve::new(C64::new(-0.2, 1.1), 16, 2.0 * PI).unwrap();
    let pert = random_field(&mut rng, c.len());
    let ctx = DolbeaultContext::new(&c, [0.13, 0.71], Some(&pert));
    for _ in 0..5 {
        let s = TwistedField { twist: [0.13, 0.71], data: random_field(&mut rng, c.len()) };
        let w = TwistedField { twist: [0.13, 0.71], data: random_field(&mut rng, c.len()) };
        let lhs = c.inner(&ctx.apply(&s).unwrap().data, &w.data);
        let rhs = c.inner(&s.data, &ctx.adjoint(&w).unwrap().data);
        assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()), "{lhs} vs {rhs}");
    }
}

#[test]
fn holonomy_mismatch() {
    let c = FlatCurve::square(8).unwrap();
    let ctx = DolbeaultContext::new(&c, [0.5, 0.0], None);
    let s = TwistedField { twist: [0.25, 0.0], data: vec![C64::default(); c.len()] };
    assert!(matches!(ctx.apply(&s), Err(VortexError::HolonomyMismatch { .. })));
    assert!(matches!(ctx.adjoint(&s), Err(VortexError::HolonomyMismatch { .. })));
}

#[test]
fn invalid_curves() {
    assert!(FlatCurve::square(6).is_err());
    assert!(FlatCurve::square(9).is_err());
    assert!(FlatCurve::new(C64::new(0.0, -1.0), 8, 1.0).is_err());
    assert!(FlatCurve::new(C64::new(0.0, 1.0), 8, 0.0).is_err());
}

#[test]
fn constant_tau_is_exact() {
    let c = FlatCurve::square(16).unwrap();
    let tau = vec![1.7; c.len()];
    let cfg = vortex_solve(&c, &[[0.1, 0.2], [0.6, 0.4]], 1, &tau).unwrap();
    for (p, z) in cfg.phi[1].iter().enumerate() {
        assert!((z.norm_sqr() - 2.0 * tau[p]).abs() < 1e-12);
    }
    assert!(cfg.phi[0].iter().all(|z| *z == C64::default()));
    assert!(moment_residual(&cfg, &tau) < 1e-13);
    assert!(cfg.dbar_residual() < 1e-13);
}

#[test]
fn perturbed_tau_integral_identity_and_quadratic_newton() {
    let c = FlatCurve::square(32).unwrap();
    let tau = cos_tau(&c, 1.0, 0.1);
    let cfg = vortex_solve(&c, &[[0.1, 0.2], [0.4, 0.3]], 0, &tau).unwrap();
    let tau_bar = c.integrate(&tau) / (2.0 * PI);
    assert!((cfg.phi_norm_sq() - 4.0 * PI * tau_bar).abs() < 1e-8);
    assert!(moment_residual(&cfg, &tau) < 1e-10);
    assert!(cfg.dbar_residual() < 1e-10);
    let d = &cfg.newton.increments;
    assert!(d.len() >= 3);
    let last = &d[d.len() - 3..];
    for w in last.windows(2) {
        assert!(w[1] <= 10.0 * w[0] * w[0], "increments {d:?}");
    }
}

#[test]
fn conjugate_gradient_path_matches_dense() {
    let tau = |c: &FlatCurve| cos_tau(c, 1.3, 0.2);
    let c32 = FlatCurve::square(32).unwrap();
    let c64 = FlatCurve::square(64).unwrap();
    let a = vortex_solve(&c32, &[[0.0, 0.0]], 0, &tau(&c32)).unwrap();
    let b = vortex_solve(&c64, &[[0.0, 0.0]], 0, &tau(&c64)).unwrap();
    // resolution robustness of the L² norm
    assert!((a.phi_norm_sq().sqrt() - b.phi_norm_sq().sqrt()).abs() < 1e-6);
    // same u at shared grid points
    for iy in 0..32 {
        for ix in 0..32 {
            assert!((a.u[iy * 32 + ix] - b.u[2 * iy * 64 + 2 * ix]).abs() < 1e-9);
        }
    }
}

#[test]
fn skewed_lattice_solve() {
    let c = FlatCurve::new(C64::new(0.5, 0.8660254037844386), 16, 2.0 * PI).unwrap();
    let tau = c.sample(|x, y| 2.0 + 0.3 * (2.0 * PI * (x + y)).sin());
    let cfg = vortex_solve(&c, &[[0.3, -0.2]], 0, &tau).unwrap();
    assert!(moment_residual(&cfg, &tau) < 1e-10);
    assert!((cfg.phi_norm_sq() - 2.0 * c.integrate(&tau)).abs() < 1e-9);
}

#[test]
fn nonpositive_tau_rejected() {
    let c = FlatCurve::square(8).unwrap();
    assert!(matches!(
        vortex_solve(&c, &[[0.0, 0.0]], 0, &vec![0.0; c.len()]),
        Err(VortexError::NonPositiveTau { .. })
    ));
    assert!(matches!(
        vortex_solve(&c, &[[0.0, 0.0]], 0, &vec![-1.0; c.len()]),
        Err(VortexError::NonPositiveTau { .. })
    ));
}

#[test]
fn holonomy_matching() {
    let c = FlatCurve::square(8).unwrap();
    let tau = vec![1.0; c.len()];
    let hol = [[0.1, 0.2], [0.3, 0.4]];
    let cfg = vortex_solve_with_holonomy(&c, &hol, [-0.3, 0.6], &tau).unwrap();
    assert_eq!(cfg.active, 1);
    // the integer shift is absorbed by a winding gauge on Φ
    assert!(cfg.dbar_residual() < 1e-12);
    assert!(matches!(
        vortex_solve_with_holonomy(&c, &hol, [0.25, 0.0], &tau),
        Err(VortexError::NoHolomorphicSection { .. })
    ));
    assert!(matches!(
        vortex_solve_with_holonomy(&c, &[[0.1, 0.2], [0.1, 0.2]], [-0.1, -0.2], &tau),
        Err(VortexError::CoincidentHolonomies { a: 0, b: 1 })
    ));
}

#[test]
fn moment_residual_examples() {
    let c = FlatCurve::square(16).unwrap();
    let tau = vec![0.8; c.len()];
    let mut cfg = vortex_solve(&c, &[[0.0, 0.0]], 0, &tau).unwrap();
    assert!(moment_residual(&cfg, &tau) < 1e-13);
    cfg.phi[0].iter_mut().for_each(|z| *z *= 1.1);
    // ½(1.1² - 1)|Φ|² with |Φ|² = 2τ
    assert!((moment_residual(&cfg, &tau) - 0.105 * 2.0 * 0.8).abs() < 1e-12);
    cfg.phi[0].iter_mut().for_each(|z| *z = C64::default());
    cfg.alpha.iter_mut().for_each(|a| *a = C64::default());
    let tau = cos_tau(&c, 1.0, 0.25);
    assert!((moment_residual(&cfg, &tau) - 1.25).abs() < 1e-14);
}

#[test]
fn gauge_covariance() {
    let c = FlatCurve::square(16).unwrap();
    let tau = cos_tau(&c, 1.0, 0.1);
    let cfg = vortex_solve(&c, &[[0.2, 0.1]], 0, &tau).unwrap();
    // a little off the solution, so the residual is not just noise
    let mut base = cfg.clone();
    base.phi[0].iter_mut().for_each(|z| *z *= 1.05);
    let r0 = moment_residual(&base, &tau);
    let chi = c.sample(|x, y| 0.3 * (2.0 * PI * x).sin() + 0.2 * (2.0 * PI * (x - 2.0 * y)).cos());
    let dchi = c.dbar(&complexify(&chi));
    let mut g = base.clone();
    for p in 0..c.len() {
        let (x, y) = c.point(p);
        // smooth gauge times a winding one, e^{i(χ + 2π(x - y))}
        let phase = chi[p] + 2.0 * PI * (x - y);
        g.phi[0][p] *= C64::from_polar(1.0, phase);
        g.alpha[p] -= dchi[p] + c.lattice_to_frame([2.0 * PI, -2.0 * PI]);
    }
    assert!((moment_residual(&g, &tau) - r0).abs() < 1e-12);
}

#[test]
fn frame_conversion_roundtrip() {
    let c = FlatCurve::new(C64::new(0.37, 1.4), 8, 3.0).unwrap();
    let a = [0.3, -1.7];
    let back = c.frame_to_lattice(c.lattice_to_frame(a));
    assert!((back[0] - a[0]).abs() < 1e-14 && (back[1] - a[1]).abs() < 1e-14);
    // df for f = x is dx
    let f = complexify(&c.sample(|x, _| (2.0 * PI * x).sin()));
    let df = c.dbar(&f);
    for p in 0..c.len() {
        let (x, _) = c.point(p);
        let want = c.lattice_to_frame([2.0 * PI * (2.0 * PI * x).cos(), 0.0]);
        assert!((df[p] - want).norm() < 1e-12);
    }
}

#[test]
fn snapshot_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let c = FlatCurve::square(8).unwrap();
    let cfg = vortex_solve(&c, &[[0.0, 0.0], [0.5, 0.5]], 0, &vec![1.0; c.len()]).unwrap();
    let paths = write_snapshot(dir.path(), "slice", &cfg, 0.25).unwrap();
    assert_eq!(paths.len(), 2);
    assert_eq!(read_component(&paths[0]).unwrap(), cfg.phi[0]);
    let side: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("slice_phi0.json")).unwrap()).unwrap();
    assert_eq!(side["n"], 8);
    assert_eq!(side["time"], 0.25);
}

#[test]
fn family_closedness_and_matching() {
    let c = FlatCurve::square(16).unwrap();
    let tau = TauProfile { mean: 1.0, amp: 0.1, osc: 0.05, mode: [1, 1] };
    assert!(tau.closedness_residual(&c, 0.3) < 1e-12);
    let fam = FlatBundleFamily {
        paths: vec![
            HolonomyPath::Circle { center: [0.25, 0.25], radius: 0.05, turns: 1.0, phase: 0.0 },
            HolonomyPath::constant([0.7, 0.6]),
        ],
        fstar: [[1, 0], [0, 1]],
        closing: vec![0, 1],
        tau,
    };
    fam.validate(&c, 8).unwrap();
    let mut bad = fam.clone();
    bad.closing = vec![1, 0];
    assert!(matches!(bad.validate(&c, 8), Err(VortexError::InvalidFamily(_))));
    let swap = FlatBundleFamily {
        paths: vec![
            HolonomyPath::Polyline { times: vec![0.0, 1.0], points: vec![[0.0, 0.0], [0.5, 0.0]] },
            HolonomyPath::Polyline { times: vec![0.0, 1.0], points: vec![[0.5, 0.0], [1.0, 0.0]] },
        ],
        fstar: [[1, 0], [0, 1]],
        closing: vec![1, 0],
        tau: TauProfile::constant(1.0),
    };
    swap.validate(&c, 2).unwrap();
}

#[test]
fn circle_velocity() {
    let p = HolonomyPath::Circle { center: [0.1, 0.2], radius: 0.3, turns: 2.0, phase: 0.1 };
    let (t, h) = (0.37, 1e-6);
    let (a, b) = (p.at(t + h), p.at(t - h));
    let v = p.velocity(t);
    for k in 0..2 {
        assert!(((a[k] - b[k]) / (2.0 * h) - v[k]).abs() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn adjoint_any_lattice(re in -0.5f64..0.5, imag in 0.6f64..1.6, tx in -1.0f64..1.0, ty in -1.0f64..1.0, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = FlatCurve::new(C64::new(re, imag), 8, 2.0 * PI).unwrap();
        let pert = smooth_field(&c, &mut rng);
        let ctx = DolbeaultContext::new(&c, [tx, ty], Some(&pert));
        let s = TwistedField { twist: [tx, ty], data: random_field(&mut rng, c.len()) };
        let w = TwistedField { twist: [tx, ty], data: random_field(&mut rng, c.len()) };
        let lhs = c.inner(&ctx.apply(&s).unwrap().data, &w.data);
        let rhs = c.inner(&s.data, &ctx.adjoint(&w).unwrap().data);
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn integral_identity(mean in 0.5f64..3.0, amp in 0.0f64..0.4, mx in 0i64..3, my in 0i64..3) {
        let c = FlatCurve::square(16).unwrap();
        let tau = c.sample(|x, y| mean + amp * mean * (2.0 * PI * (mx as f64 * x + my as f64 * y)).cos());
        let cfg = vortex_solve(&c, &[[0.0, 0.5]], 0, &tau).unwrap();
        let tau_bar = c.integrate(&tau) / (2.0 * PI);
        prop_assert!((cfg.phi_norm_sq() - 4.0 * PI * tau_bar).abs() < 1e-8);
        prop_assert!(moment_residual(&cfg, &tau) < 1e-10);
    }
}

#[test]
fn reversed_family() {
    let c = FlatCurve::square(8).unwrap();
    let fam = FlatBundleFamily {
        paths: vec![
            HolonomyPath::Circle { center: [0.2, 0.3], radius: 0.1, turns: 1.0, phase: 0.2 },
            HolonomyPath::Polyline { times: vec![0.0, 0.3, 1.0], points: vec![[0.5, 0.0], [0.6, 0.2], [0.5, 1.0]] },
        ],
        fstar: [[2, 1], [1, 1]],
        closing: vec![0, 1],
        tau: TauProfile { mean: 1.0, amp: 0.1, osc: 0.05, mode: [1, 0] },
    };
    let rev = fam.reversed();
    for t in [0.0, 0.17, 0.5, 0.93] {
        for (a, b) in rev.holonomies(t).iter().zip(fam.holonomies(1.0 - t)) {
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        }
        let d = rev.tau.tau(&c, t).iter().zip(fam.tau.tau(&c, 1.0 - t)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(d < 1e-12);
    }
    assert_eq!(rev.fstar, [[1, -1], [-1, 2]]);
    let back = rev.reversed();
    assert_eq!((back.fstar, &back.closing, back.tau), (fam.fstar, &fam.closing, fam.tau));
}
