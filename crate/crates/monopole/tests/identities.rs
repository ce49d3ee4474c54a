mod common;

use common::*;
use monopole::*;
use vortexfield::*;

#[test]
fn constant_family_identities_vanish() {
    let fam = FlatBundleFamily {
        paths: vec![HolonomyPath::constant([0.2, 0.3]), HolonomyPath::constant([0.6, 0.1])],
        fstar: [[1, 0], [0, 1]],
        closing: vec![0, 1],
        tau: TauProfile::constant(1.0),
    };
    let cfg = adiabatic(&fam, 16, 8, 2);
    let r = identity_check(&cfg, 10, 2, 3);
    assert!(r.identity0 < 1e-12 && r.identity1 < 1e-12, "{r:?}");
}

#[test]
fn transported_solution_satisfies_identities() {
    let cfg = default_config();
    let r = identity_check(&cfg, 50, 2, 1);
    assert_eq!(r.samples, 50);
    assert!(r.identity0 < 1e-6 && r.identity1 < 1e-6 && r.identity2 < 1e-6, "{r:?}");
    // the identities need the equations, so the residual sits at the solve tolerance
    assert!(r.identity1 > 1e-14);

    let bad = identity_check(&perturb_phi(&cfg, 0.1), 50, 2, 1);
    assert!(bad.identity1 >= 1e3 * r.identity1, "{bad:?}");
    assert!(bad.identity2 >= 1e3 * r.identity2);
    // identity0 holds for any configuration
    assert!(bad.identity0 < 1e-6);
}

#[test]
fn residuals_follow_the_transport_tolerance() {
    let fam = circle_family(TauProfile::constant(1.0));
    let coarse = identity_check(&adiabatic(&fam, 16, 16, 2), 5, 2, 4);
    let fine = identity_check(&adiabatic(&fam, 16, 16, 4), 5, 2, 4);
    // fourth-order transport: doubling the steps divides the error by about 16
    let ratio = coarse.identity1 / fine.identity1;
    assert!(ratio > 4.0, "{coarse:?} {fine:?}");
}

#[test]
fn identity2_decreases_under_refinement() {
    let fam = circle_family(wavy_tau());
    let coarse = identity_check(&adiabatic(&fam, 16, 16, 4), 5, 6, 2);
    let fine = identity_check(&adiabatic(&fam, 32, 16, 4), 5, 6, 2);
    assert!(coarse.identity2 >= 4.0 * fine.identity2, "{coarse:?} {fine:?}");
}
