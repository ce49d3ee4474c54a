mod common;

use std::sync::Arc;

use common::*;
use monopole::*;
use num_complex::Complex64 as C64;
use vortexfield::*;

fn sup(t: &Tangent3D) -> f64 {
    t.sup_norm()
}

/// Ξ₀ plus a smooth random offset in every component, so `V` and `b` are nonzero.
fn generic(seed: u64) -> Config3D {
    let cfg = default_config();
    let off = band_limited_tangent(&cfg.mesh, 3, seed).scaled(0.3);
    cfg.plus(&off)
}

fn with_zero_v(cfg: &Config3D) -> Config3D {
    let mut out = cfg.clone();
    out.fields.v.iter_mut().flatten().for_each(|x| *x = 0.0);
    out
}

#[test]
fn self_adjoint_at_v_zero() {
    let cfg = with_zero_v(&generic(11));
    let area = cfg.mesh.curve.area();
    for (i, eps) in [0.5, 0.1, 0.05].into_iter().cycle().take(20).enumerate() {
        let x = band_limited_tangent(&cfg.mesh, 64, 100 + i as u64);
        let y = band_limited_tangent(&cfg.mesh, 64, 200 + i as u64);
        let lhs = linearize_apply(&cfg, &x, eps).pairing(&y, eps, area);
        let rhs = x.pairing(&linearize_apply(&cfg, &y, eps), eps, area);
        let scale = lhs.abs().max(rhs.abs());
        assert!((lhs - rhs).abs() < 1e-10 * scale, "eps {eps}: {lhs} vs {rhs}");
    }
}

#[test]
fn v_terms_are_skew() {
    let cfg = generic(12);
    let area = cfg.mesh.curve.area();
    let x = band_limited_tangent(&cfg.mesh, 64, 1);
    let y = band_limited_tangent(&cfg.mesh, 64, 2);
    let asym = |c: &Config3D| {
        linearize_apply(c, &x, 0.3).pairing(&y, 0.3, area) - x.pairing(&linearize_apply(c, &y, 0.3), 0.3, area)
    };
    assert!(asym(&cfg).abs() > 1e-6);
}

#[test]
fn rows_match_sw_linearization() {
    let cfg = generic(13);
    let xi = band_limited_tangent(&cfg.mesh, 5, 3);
    let eps = 0.2;
    let d = linearize_apply(&cfg, &xi, eps);
    let l = sw_linear(&cfg, &xi, eps);
    let b = Blocks::new(&cfg);
    let mut gauge = b.g_adj(&xi).scaled(1.0 / (eps * eps));
    gauge.axpy(1.0, &b.l_adj(&xi));
    let diff = |x: &[Vec<C64>], y: &[Vec<C64>], s: f64| {
        x.iter().flatten().zip(y.iter().flatten()).map(|(a, b)| (a - s * b).norm()).fold(0.0, f64::max)
    };
    assert!(diff(&d.a, &l.a, 1.0) < 1e-9);
    assert!(diff(&d.phi, &l.phi, -1.0) < 1e-9);
    assert!(diff(&d.psi, &l.psi, -1.0) < 1e-9);
    let real = |x: &[Vec<f64>], y: &[Vec<f64>]| x.iter().flatten().zip(y.iter().flatten()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(real(&d.c, &l.c) < 1e-9);
    assert!(real(&d.v, &gauge.v) < 1e-9);
    assert_eq!(l.v.iter().flatten().fold(0.0f64, |a, b| a.max(b.abs())), 0.0);
}

#[test]
fn finite_differences() {
    let cfg = generic(14);
    let xi = band_limited_tangent(&cfg.mesh, 4, 4);
    let eps = 0.3;
    let lin = sw_linear(&cfg, &xi, eps);
    let q = quadratic_term(&xi, eps);
    let scale = sup(&lin);
    for h in [1e-2, 5e-3, 2.5e-3] {
        let plus = sw_map(&cfg.plus(&xi.scaled(h)), eps);
        let minus = sw_map(&cfg.plus(&xi.scaled(-h)), eps);
        let base = sw_map(&cfg, eps);
        // SW is quadratic, so the central difference has no O(h²) term at all
        let central = plus.sub(&minus).scaled(0.5 / h);
        assert!(sup(&central.sub(&lin)) < 1e-9 * scale, "h = {h}");
        // the one-sided difference is off by exactly h·Q(ξ)
        let forward = plus.sub(&base).scaled(1.0 / h);
        let err = forward.sub(&lin);
        assert!(sup(&err.sub(&q.scaled(h))) < 1e-8 * scale, "h = {h}");
        assert!((sup(&err) / (h * sup(&q)) - 1.0).abs() < 1e-6);
    }
}

#[test]
fn quadratic_split_is_exact() {
    for seed in 0..5 {
        let cfg = generic(20 + seed);
        let xi = band_limited_tangent(&cfg.mesh, 6, 30 + seed).scaled(0.7);
        for eps in [1.0, 0.2, 0.05] {
            let lhs = sw_map(&cfg.plus(&xi), eps);
            let mut rhs = sw_map(&cfg, eps);
            rhs.axpy(1.0, &sw_linear(&cfg, &xi, eps));
            rhs.axpy(1.0, &quadratic_term(&xi, eps));
            let rel = sup(&lhs.sub(&rhs)) / sup(&lhs).max(1.0);
            assert!(rel < 1e-12, "seed {seed} eps {eps}: {rel:e}");
        }
    }
}

#[test]
fn quadratic_term_homogeneity() {
    let cfg = default_config();
    let xi = band_limited_tangent(&cfg.mesh, 4, 5);
    assert_eq!(sup(&quadratic_term(&xi.zeros_like(), 0.1)), 0.0);
    let q = quadratic_term(&xi, 0.1);
    for t in [2.0, -1.0, 0.5] {
        let qt = quadratic_term(&xi.scaled(t), 0.1);
        assert_eq!(qt.sub(&q.scaled(t * t)).sup_norm(), 0.0, "t = {t}");
    }
}

#[test]
fn quadratic_term_ignores_background() {
    let xi = band_limited_tangent(&default_config().mesh, 3, 6);
    let a = quadratic_term(&xi, 0.2);
    let other = generic(7);
    let lhs = sw_map(&other.plus(&xi), 0.2).sub(&sw_map(&other, 0.2)).sub(&sw_linear(&other, &xi, 0.2));
    assert!(sup(&lhs.sub(&a)) < 1e-10);
}

#[test]
fn flat_background_decouples() {
    let fam = FlatBundleFamily {
        paths: vec![HolonomyPath::constant([0.3, 0.1])],
        fstar: [[1, 0], [0, 1]],
        closing: vec![0],
        tau: TauProfile::constant(1.0),
    };
    let curve = FlatCurve::square(8).unwrap();
    let mesh = Arc::new(Mesh::from_family(curve.clone(), &fam, 8, Closing::identity(&curve, 1)).unwrap());
    let cfg = Config3D::new(mesh.clone(), Tangent3D::zeros(8, 64, 1)).unwrap();
    let xi = band_limited_tangent(&mesh, 3, 8);

    let mut gauge_part = xi.zeros_like();
    gauge_part.a = xi.a.clone();
    gauge_part.v = xi.v.clone();
    gauge_part.c = xi.c.clone();
    let mut section_part = xi.zeros_like();
    section_part.phi = xi.phi.clone();
    section_part.psi = xi.psi.clone();

    let d1 = linearize_apply(&cfg, &gauge_part, 0.3);
    let d2 = linearize_apply(&cfg, &section_part, 0.3);
    assert_eq!(d1.phi.iter().chain(&d1.psi).flatten().fold(0.0f64, |m, z| m.max(z.norm())), 0.0);
    assert_eq!(d2.a.iter().flatten().fold(0.0f64, |m, z| m.max(z.norm())), 0.0);
    assert_eq!(d2.v.iter().chain(&d2.c).flatten().fold(0.0f64, |m, x| m.max(x.abs())), 0.0);

    // the gauge row on (a, v, c) alone: ε⁻² div a + ċ
    let div: Vec<Vec<f64>> = xi.a.iter().map(|a| curve.d(a).into_iter().map(|z| z.re).collect()).collect();
    let lhs = &d1.v;
    let cdot = linearize_apply(&cfg, &{
        let mut t = xi.zeros_like();
        t.c = xi.c.clone();
        t
    }, 0.3)
    .v;
    for j in 0..8 {
        for p in 0..64 {
            assert!((lhs[j][p] - div[j][p] / 0.09 - cdot[j][p]).abs() < 1e-9);
        }
    }
}
