mod common;

use common::oracles::{cross_dist, max_mass, perm_bottleneck, perm_wasserstein};
use mmfield::transport::{max_mass_on, prokhorov, wasserstein_inf, wasserstein_p};
use mmfield::{seeds, Matrix};
use proptest::prelude::*;
use rand::Rng;

fn random_points(seed: u64, tag: u64, n: usize) -> Vec<Vec<f64>> {
    let mut rng = seeds::rng(seed, &[tag]);
    (0..n).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect()
}

#[test]
fn uniform_four_by_four_matches_permutations() {
    let u = vec![0.25; 4];
    for s in 0..50 {
        let c = cross_dist(&random_points(s, 0, 4), &random_points(s, 1, 4));
        for p in [1.0, 2.0, 3.5] {
            let got = wasserstein_p(&u, &u, &c, p).unwrap();
            assert!((got.value - perm_wasserstein(&c, p)).abs() < 1e-7, "seed {s} p {p}");
            let cp = got.coupling.matrix();
            for i in 0..4 {
                assert!((cp.row(i).iter().sum::<f64>() - 0.25).abs() < 1e-12);
            }
        }
        let b = wasserstein_inf(&u, &u, &c, 1e-9).unwrap();
        assert_eq!(b.value, perm_bottleneck(&c), "seed {s}");
    }
}

#[test]
fn prokhorov_between_diracs() {
    let mut rng = seeds::rng(3, &[]);
    for _ in 0..20 {
        let d: f64 = rng.gen_range(0.0..2.0);
        let c = Matrix::from_rows(&[vec![d]]);
        let r = prokhorov(&[1.0], &[1.0], &c, 1e-9).unwrap();
        assert!((r.value - d.min(1.0)).abs() <= r.resolution, "d = {d}: {}", r.value);
    }
}

#[test]
fn prokhorov_mass_defect() {
    // 0.9 at x and 0.1 at a far point z, against all mass at x
    let c = Matrix::from_rows(&[vec![0.0], vec![5.0]]);
    let r = prokhorov(&[0.9, 0.1], &[1.0], &c, 1e-9).unwrap();
    assert!((r.value - 0.1).abs() <= r.resolution);
}

proptest! {
    #[test]
    fn max_mass_matches_cut_formula(
        a in prop::collection::vec(0.05f64..1.0, 3),
        b in prop::collection::vec(0.05f64..1.0, 3),
        mask in 0u32..512,
    ) {
        let sa: f64 = a.iter().sum();
        let sb: f64 = b.iter().sum();
        let a: Vec<f64> = a.iter().map(|v| v / sa).collect();
        let b: Vec<f64> = b.iter().map(|v| v / sb).collect();
        let cells: Vec<bool> = (0..9).map(|k| mask >> k & 1 == 1).collect();
        let got = max_mass_on(&a, &b, &cells).unwrap();
        prop_assert!((got - max_mass(&a, &b, &cells)).abs() < 1e-9);
    }

    #[test]
    fn wasserstein_is_symmetric_and_ordered_in_p(seed in 0u64..1000) {
        let x = random_points(seed, 0, 3);
        let y = random_points(seed, 1, 4);
        let a = vec![0.5, 0.3, 0.2];
        let b = vec![0.1, 0.2, 0.3, 0.4];
        let c = cross_dist(&x, &y);
        let ct = cross_dist(&y, &x);
        let w1 = wasserstein_p(&a, &b, &c, 1.0).unwrap().value;
        let w1t = wasserstein_p(&b, &a, &ct, 1.0).unwrap().value;
        let w2 = wasserstein_p(&a, &b, &c, 2.0).unwrap().value;
        let wi = wasserstein_inf(&a, &b, &c, 1e-9).unwrap().value;
        prop_assert!((w1 - w1t).abs() < 1e-9);
        prop_assert!(w1 <= w2 + 1e-9);
        prop_assert!(w2 <= wi + 1e-9);
    }
}
