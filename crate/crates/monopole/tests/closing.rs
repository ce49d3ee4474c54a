use std::f64::consts::{PI, TAU};

use monopole::*;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vortexfield::FlatCurve;

fn hexagonal(n: usize) -> FlatCurve {
    FlatCurve::new(C64::from_polar(1.0, PI / 3.0), n, 2.0 * PI).unwrap()
}

#[test]
fn orders() {
    assert_eq!(fstar_order([[1, 0], [0, 1]]), Some(1));
    assert_eq!(fstar_order([[-1, 0], [0, -1]]), Some(2));
    assert_eq!(fstar_order([[0, -1], [1, -1]]), Some(3));
    assert_eq!(fstar_order([[0, -1], [1, 0]]), Some(4));
    assert_eq!(fstar_order([[1, -1], [1, 0]]), Some(6));
    assert_eq!(fstar_order([[2, 1], [1, 1]]), None);
}

#[test]
fn pullback_to_the_order_is_the_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cases = [
        (FlatCurve::square(12).unwrap(), [[-1, 0], [0, -1]]),
        (FlatCurve::square(12).unwrap(), [[0, -1], [1, 0]]),
        (hexagonal(12), [[0, -1], [1, -1]]),
        (hexagonal(12), [[1, -1], [1, 0]]),
    ];
    for (curve, f) in cases {
        let ord = fstar_order(f).unwrap();
        let c = Closing::new(&curve, f, vec![1, 0], vec![[0, 0]; 2], [0, 0], C64::from_polar(1.0, TAU / ord as f64)).unwrap();
        assert!((c.rotation().powi(ord as i32) - 1.0).norm() < 1e-12);
        let n2 = curve.len();
        let s: Vec<f64> = (0..n2).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a: Vec<C64> = (0..n2).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let phi: Vec<C64> = (0..2 * n2).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let (mut s1, mut a1, mut p1, mut q1) = (s.clone(), a.clone(), phi.clone(), phi.clone());
        // the summand swap has order 2
        let reps = if ord % 2 == 0 { ord } else { 2 * ord };
        for _ in 0..reps {
            s1 = c.scalar(&s1);
            a1 = c.form(&a1);
            p1 = c.sections(&p1, false);
            q1 = c.sections(&q1, true);
        }
        assert_eq!(s1, s, "{f:?}");
        let close = |x: &[C64], y: &[C64]| x.iter().zip(y).all(|(p, q)| (p - q).norm() < 1e-12);
        assert!(close(&a1, &a) && close(&p1, &phi) && close(&q1, &phi), "{f:?}");
    }
}

#[test]
fn constant_forms_pull_back_by_fstar() {
    let curve = FlatCurve::square(8).unwrap();
    let c = Closing::new(&curve, [[0, -1], [1, 0]], vec![0], vec![[0, 0]], [0, 0], C64::from(1.0)).unwrap();
    let w = curve.lattice_to_frame([0.3, -0.2]);
    let img = curve.lattice_to_frame([0.2, 0.3]);
    assert!(c.form(&vec![w; 64]).iter().all(|z| (z - img).norm() < 1e-12));
}

#[test]
fn connection_shift_and_section_phase() {
    let curve = FlatCurve::square(8).unwrap();
    let c = Closing::new(&curve, [[1, 0], [0, 1]], vec![0], vec![[1, 0]], [0, 1], C64::from(1.0)).unwrap();
    let zero = vec![C64::default(); 64];
    let shift = curve.lattice_to_frame([0.0, TAU]);
    assert!(c.connection(&curve, &zero).iter().all(|z| (z + shift).norm() < 1e-12));
    let ones = vec![C64::from(1.0); 64];
    let out = c.sections(&ones, false);
    for (p, z) in out.iter().enumerate() {
        let (x, y) = curve.point(p);
        assert!((z - C64::from_polar(1.0, TAU * (x + y))).norm() < 1e-12);
    }
}

#[test]
fn non_isometries_are_rejected() {
    let curve = FlatCurve::square(8).unwrap();
    let anosov = Closing::new(&curve, [[2, 1], [1, 1]], vec![0], vec![[0, 0]], [0, 0], C64::from(1.0));
    assert!(matches!(anosov, Err(MonopoleError::PeriodicityMismatch(_))));
    let skew = FlatCurve::new(C64::new(0.2, 1.1), 8, 2.0 * PI).unwrap();
    let rot = Closing::new(&skew, [[0, -1], [1, 0]], vec![0], vec![[0, 0]], [0, 0], C64::from(1.0));
    assert!(matches!(rot, Err(MonopoleError::PeriodicityMismatch(_))));
    assert!(Closing::new(&skew, [[-1, 0], [0, -1]], vec![0], vec![[0, 0]], [0, 0], C64::from(1.0)).is_ok());
}
