mod common;

use common::*;
use monopole::*;

#[test]
fn zero_has_zero_norms() {
    let cfg = default_config();
    let r = weighted_norm(&cfg, &cfg.fields.zeros_like(), 0.1, 2.0);
    assert_eq!((r.zero, r.one, r.infinity), (0.0, 0.0, 0.0));
    for level in [NormLevel::Zero, NormLevel::One, NormLevel::Infinity] {
        assert_eq!(r.get(level), 0.0);
    }
}

#[test]
fn nonzero_tangents_have_positive_norms() {
    let cfg = default_config();
    for seed in 0..5 {
        let xi = band_limited_tangent(&cfg.mesh, 3, seed);
        let r = weighted_norm(&cfg, &xi, 0.2, 4.0);
        assert!(r.zero > 0.0 && r.one >= r.zero && r.infinity > 0.0);
    }
    // a lone v component is still seen
    let mut v = cfg.fields.zeros_like();
    v.v[3][7] = 1.0;
    assert!(weighted_norm(&cfg, &v, 0.2, 2.0).zero > 0.0);
}

#[test]
fn unit_eps_pure_x_is_plain_lp() {
    let cfg = default_config();
    let mut xi = band_limited_tangent(&cfg.mesh, 4, 3);
    xi.v.iter_mut().chain(xi.c.iter_mut()).flatten().for_each(|x| *x = 0.0);
    xi.psi.iter_mut().flatten().for_each(|z| *z = 0.0.into());
    let (n2, area) = (cfg.mesh.n2(), cfg.mesh.curve.area());
    for p in [2.0, 3.0, 4.0] {
        let mut acc = 0.0;
        for j in 0..cfg.m() {
            for q in 0..n2 {
                let x2 = xi.a[j][q].norm_sqr() + xi.phi[j][q].norm_sqr() + xi.phi[j][n2 + q].norm_sqr();
                acc += x2.powf(p / 2.0);
            }
        }
        let lp = (acc * area / (cfg.m() * n2) as f64).powf(1.0 / p);
        let r = weighted_norm(&cfg, &xi, 1.0, p);
        assert!((r.zero - lp).abs() < 1e-12 * lp, "p = {p}");
    }
}

#[test]
fn weights_scale_the_y_part() {
    let cfg = default_config();
    let mut y = band_limited_tangent(&cfg.mesh, 2, 4);
    y.a.iter_mut().chain(y.phi.iter_mut()).flatten().for_each(|z| *z = 0.0.into());
    y.v.iter_mut().flatten().for_each(|x| *x = 0.0);
    let a = weighted_norm(&cfg, &y, 0.5, 2.0);
    let b = weighted_norm(&cfg, &y, 0.25, 2.0);
    assert!((a.zero / b.zero - 2.0).abs() < 1e-12);
    assert!((a.infinity / b.infinity - 2.0).abs() < 1e-12);
}

#[test]
fn sup_bound_scales_like_eps_to_minus_one_over_p() {
    let cfg = default_config();
    let p = 4.0;
    let eps = [0.4, 0.2, 0.1, 0.05, 0.025];
    let vectors: Vec<Tangent3D> = (0..12).map(|s| band_limited_tangent(&cfg.mesh, 1 + (s % 6) as i64, 50 + s)).collect();
    let scaled: Vec<f64> = eps
        .iter()
        .map(|&e| {
            let worst = vectors
                .iter()
                .map(|xi| {
                    let r = weighted_norm(&cfg, xi, e, p);
                    r.infinity / r.one
                })
                .fold(0.0, f64::max);
            worst * e.powf(1.0 / p)
        })
        .collect();
    // ‖ξ‖_∞ ≤ C ε^{-1/p} ‖ξ‖_{1,p,ε} with C fitted at the largest ε
    let c = scaled[0];
    assert!(scaled.iter().all(|&s| s <= 1.05 * c), "{scaled:?}");
}
