mod common;

use common::oracles::{exact_curvature_distance, tuple_rho};
use common::{atom_field, relabel};
use mmfield::curvature::{
    adm_of, adm_wasserstein, gw_convergence_experiment_with, reconstruction_test_with, rho_n, sample_adm,
};
use mmfield::generate::{random_mm_field, two_point_pair};
use mmfield::gwp::Exponent;
use proptest::prelude::*;

#[test]
fn two_point_laws_at_small_n() {
    let (x, y) = two_point_pair();
    // n = 1: every ADM is the zero matrix with value 0
    assert_eq!(exact_curvature_distance(&x, &y, 1, 1.0), 0.0);
    // n = 2: tuples on distinct points differ by 1/2, repeats agree
    assert!((exact_curvature_distance(&x, &y, 2, 1.0) - 0.25).abs() < 1e-12);
    let est = adm_wasserstein(
        &sample_adm(&x, 2, 600, 1).unwrap(),
        &sample_adm(&y, 2, 600, 2).unwrap(),
        Exponent::Finite(1.0),
    )
    .unwrap();
    assert!((est - 0.25).abs() < 0.05, "{est}");
}

#[test]
fn perturbed_atom_matches_exact_law() {
    let x = atom_field(3, 5, 0.0);
    let delta = 0.5 * x.base().diameter();
    let y = atom_field(3, 5, delta);
    let exact = exact_curvature_distance(&x, &y, 3, 1.0);
    let est = adm_wasserstein(
        &sample_adm(&x, 3, 500, 11).unwrap(),
        &sample_adm(&y, 3, 500, 12).unwrap(),
        Exponent::Finite(1.0),
    )
    .unwrap();
    assert!(exact > delta / 4.0);
    assert!((est - exact).abs() <= 0.15 * exact, "{est} vs {exact}");
}

#[test]
fn relabeled_copy_is_close() {
    let x = random_mm_field(5, 2, 1, 3);
    let y = relabel(&x, &[3, 0, 4, 1, 2]);
    assert_eq!(exact_curvature_distance(&x, &y, 2, 1.0), 0.0);
    let r = reconstruction_test_with(&x, &y, 3, 300, 9, 4).unwrap();
    // sampling noise alone; frozen from runs at this m
    assert!(r.statistic < 0.1 * x.base().diameter(), "{}", r.statistic);
    assert!(r.p_value > 0.0 && r.p_value <= 1.0);
}

#[test]
fn convergence_curve_rises_toward_reference() {
    let (x, y) = two_point_pair();
    let pts = gw_convergence_experiment_with(&x, &y, Exponent::Finite(1.0), &[1, 2, 4], 100, 4, 0).unwrap();
    assert_eq!(pts[0].estimate, 0.0);
    for w in pts.windows(2) {
        assert!(w[1].estimate >= w[0].estimate - w[1].stderr.max(w[0].stderr));
    }
    assert_eq!(pts[0].reference_upper, 0.5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rho_matches_direct_formula(seed in 0u64..10_000, t in prop::collection::vec(0usize..4, 3), u in prop::collection::vec(0usize..5, 3)) {
        let x = random_mm_field(4, 2, 2, seed);
        let y = random_mm_field(5, 3, 2, seed + 1);
        let a = adm_of(x.base(), &t).unwrap();
        let b = adm_of(y.base(), &u).unwrap();
        let r = rho_n(x.base().space(), &a, &b).unwrap();
        prop_assert!((r - tuple_rho(x.base(), &t, y.base(), &u)).abs() < 1e-12);
        prop_assert_eq!(r, rho_n(x.base().space(), &b, &a).unwrap());
    }
}
