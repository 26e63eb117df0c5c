mod common;

use std::collections::HashSet;

use mmfield::filtrations::{
    ball_masses, inclusion_interleaving_shift, min_enclosing_ball, nbhd_bifiltration, nbhd_trifiltration,
    radius_in_b, simplex_grade, vr_bifiltration, vr_identity_inclusion, vr_trifiltration, AmbientField, Cell,
    ParamGrid, TriCaps,
};
use mmfield::generate::{random_field, random_mm_field};
use mmfield::{seeds, BPoint, MMField};
use proptest::prelude::*;
use rand::Rng;

fn d2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Smallest enclosing circle by checking every circle through two or three
/// of the points.
fn brute_circle(pts: &[Vec<f64>]) -> f64 {
    let covers = |c: &[f64], r: f64| pts.iter().all(|p| d2(p, c) <= r * (1.0 + 1e-9) + 1e-12);
    let mut best = f64::INFINITY;
    if pts.len() == 1 {
        return 0.0;
    }
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let c = [(pts[i][0] + pts[j][0]) / 2.0, (pts[i][1] + pts[j][1]) / 2.0];
            let r = d2(&pts[i], &c);
            if covers(&c, r) {
                best = best.min(r);
            }
            for k in j + 1..pts.len() {
                let (a, b, cc) = (&pts[i], &pts[j], &pts[k]);
                let det = 2.0 * (a[0] * (b[1] - cc[1]) + b[0] * (cc[1] - a[1]) + cc[0] * (a[1] - b[1]));
                if det.abs() < 1e-12 {
                    continue;
                }
                let sq = |p: &[f64]| p[0] * p[0] + p[1] * p[1];
                let ux = (sq(a) * (b[1] - cc[1]) + sq(b) * (cc[1] - a[1]) + sq(cc) * (a[1] - b[1])) / det;
                let uy = (sq(a) * (cc[0] - b[0]) + sq(b) * (a[0] - cc[0]) + sq(cc) * (b[0] - a[0])) / det;
                let c = [ux, uy];
                let r = d2(a, &c);
                if covers(&c, r) {
                    best = best.min(r);
                }
            }
        }
    }
    best
}

fn grid(name: &str, stop: f64, step: f64) -> ParamGrid {
    ParamGrid::range(name, 0.0, stop, step).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enclosing_ball_matches_circle_enumeration(pts in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 1..7)) {
        let (c, r) = min_enclosing_ball(&pts).unwrap();
        let want = brute_circle(&pts);
        prop_assert!((r - want).abs() < 1e-9, "{} vs {}", r, want);
        prop_assert!(pts.iter().all(|p| d2(p, &c) <= r + 1e-9));
        let diam = pts.iter().flat_map(|p| pts.iter().map(move |q| d2(p, q))).fold(0.0, f64::max);
        prop_assert!(diam <= 2.0 * r + 1e-9);
        prop_assert!(r <= diam / 3f64.sqrt() + 1e-9);
    }

    #[test]
    fn bifiltration_is_union_of_balls(seed in 0u64..10_000) {
        let f = random_field(30, 2, 1, seed);
        let mut rng = seeds::rng(seed, &[1]);
        let xs: Vec<usize> = (0..30).filter(|_| rng.gen_bool(0.2)).chain([0]).collect::<HashSet<_>>().into_iter().collect();
        let (rg, sg) = (grid("r", 1.0, 0.1), grid("s", 0.5, 0.05));
        let amb = AmbientField::new(f.clone());
        let m = nbhd_bifiltration(&xs, &amb, &rg, &sg).unwrap();
        prop_assert!(m.is_monotone());
        for (ri, &r) in rg.values().iter().enumerate() {
            for (si, &s) in sg.values().iter().enumerate() {
                let got = m.at(&[ri, si]);
                for y in 0..30 {
                    let want = xs.iter().any(|&x| f.dist(x, y) <= r && f.bdist(x, &f, y) <= s);
                    prop_assert_eq!(got[y], want);
                }
            }
        }
    }

    #[test]
    fn trifiltration_thresholds_ball_mass(seed in 0u64..10_000) {
        let x = random_mm_field(25, 2, 1, seed);
        let (rg, sg, tg) = (grid("r", 0.8, 0.2), grid("s", 0.4, 0.1), grid("t", 1.0, 0.25));
        let amb = AmbientField::with_measure(x.clone());
        let m = nbhd_trifiltration(&amb, &rg, &sg, &tg).unwrap();
        let masses = ball_masses(&amb, &rg, &sg).unwrap();
        prop_assert!(m.is_monotone());
        let f = x.base();
        for (ri, &r) in rg.values().iter().enumerate() {
            for (si, &s) in sg.values().iter().enumerate() {
                for y in 0..25 {
                    let mass: f64 = (0..25).filter(|&z| f.dist(y, z) <= r && f.bdist(y, f, z) <= s).map(|z| x.weights()[z]).sum();
                    prop_assert!((masses[(ri * sg.len() + si) * 25 + y] - mass).abs() < 1e-12);
                    for (ti, &t) in tg.values().iter().enumerate() {
                        prop_assert_eq!(m.at(&[ri, si, ti])[y], mass >= 1.0 - t - 1e-12);
                    }
                }
            }
        }
        // t = 1 keeps everything
        prop_assert!(m.at(&[0, 0, tg.len() - 1]).iter().all(|&b| b));
    }

    #[test]
    fn shift_is_zero_on_itself_and_symmetric(seed in 0u64..10_000) {
        let f = random_field(20, 2, 1, seed);
        let amb = AmbientField::new(f);
        let (rg, sg) = (grid("r", 1.0, 0.05), grid("s", 1.0, 0.05));
        let a = nbhd_bifiltration(&[0, 1, 2], &amb, &rg, &sg).unwrap();
        let b = nbhd_bifiltration(&[3, 4], &amb, &rg, &sg).unwrap();
        prop_assert_eq!(inclusion_interleaving_shift(&a, &a).unwrap().shift, 0.0);
        let ab = inclusion_interleaving_shift(&a, &b).unwrap();
        prop_assert_eq!(ab.shift, inclusion_interleaving_shift(&b, &a).unwrap().shift);
    }

    #[test]
    fn vr_grades_are_diameter_and_value_spread(seed in 0u64..10_000) {
        let f = random_field(7, 2, 1, seed);
        let c = vr_bifiltration(&f, 3, f64::INFINITY, f64::INFINITY).unwrap();
        prop_assert_eq!(c.simplices.len(), 7 + 21 + 35 + 35);
        prop_assert!(c.is_downward_closed());
        for s in &c.simplices {
            let Cell::Simplex(v) = &s.cell else { panic!("chain in a simplicial complex") };
            let diam = v.iter().flat_map(|&a| v.iter().map(move |&b| (a, b))).map(|(a, b)| f.dist(a, b)).fold(0.0, f64::max);
            let vals: Vec<f64> = v.iter().map(|&a| match f.value(a) { BPoint::Coords(c) => c[0], _ => unreachable!() }).collect();
            let spread = vals.iter().cloned().fold(f64::MIN, f64::max) - vals.iter().cloned().fold(f64::MAX, f64::min);
            prop_assert_eq!(s.grade[0], diam);
            prop_assert!((s.grade[1] - spread).abs() < 1e-12);
        }
    }

    #[test]
    fn vr_with_planar_values_is_downward_closed(seed in 0u64..10_000) {
        let f = random_field(8, 3, 2, seed);
        let c = vr_bifiltration(&f, 3, 0.9, f64::INFINITY).unwrap();
        prop_assert!(c.is_downward_closed());
        for s in &c.simplices {
            let Cell::Simplex(v) = &s.cell else { panic!("chain in a simplicial complex") };
            let (_, spread) = simplex_grade(&f, v).unwrap();
            prop_assert!((s.grade[1] - spread).abs() < 1e-9);
        }
    }

    #[test]
    fn identity_inclusion_at_derived_shift(seed in 0u64..10_000) {
        let x = random_field(9, 2, 1, seed);
        let pts: Vec<Vec<f64>> = x.coords().unwrap().to_vec();
        let mut rng = seeds::rng(seed, &[2]);
        let moved: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|c| c + rng.gen_range(-0.05..0.05)).collect()).collect();
        let vals: Vec<BPoint> = x.values().iter().map(|v| match v { BPoint::Coords(c) => BPoint::Coords(vec![0.9 * c[0] + rng.gen_range(-0.02..0.02)]), _ => unreachable!() }).collect();
        let y = mmfield::MetricField::from_points(moved, vals, x.space().clone()).unwrap();
        let dgap = (0..9).flat_map(|i| (0..9).map(move |j| (i, j))).map(|(i, j)| (x.dist(i, j) - y.dist(i, j)).abs()).fold(0.0, f64::max);
        let sup = (0..9).map(|i| x.bdist(i, &y, i)).fold(0.0, f64::max);
        let eps = (dgap / 2.0).max(sup);
        prop_assert!(vr_identity_inclusion(&x, &y, 2.0 * eps, 2, f64::INFINITY, f64::INFINITY).unwrap().holds);
        prop_assert!(vr_identity_inclusion(&y, &x, 2.0 * eps, 2, f64::INFINITY, f64::INFINITY).unwrap().holds);
    }
}

#[test]
fn one_dimensional_values_have_half_spread_radius() {
    let space = mmfield::TargetSpace::euclidean(1);
    let pts = [BPoint::Coords(vec![0.3]), BPoint::Coords(vec![-0.2]), BPoint::Coords(vec![0.1])];
    let refs: Vec<&BPoint> = pts.iter().collect();
    assert!((radius_in_b(&space, &refs).unwrap() - 0.25).abs() < 1e-15);
}

/// Every chain of nonempty subsets of three points, graded by hand.
#[test]
fn three_point_trifiltration_by_enumeration() {
    let x: MMField = random_mm_field(3, 2, 1, 4);
    let c = vr_trifiltration(&x, 2, &TriCaps::default()).unwrap();
    let subsets: Vec<Vec<usize>> = (1u32..8).map(|m| (0..3).filter(|i| m >> i & 1 == 1).collect()).collect();
    let is_sub = |a: &[usize], b: &[usize]| a.len() < b.len() && a.iter().all(|v| b.contains(v));
    let mut chains: Vec<Vec<Vec<usize>>> = subsets.iter().map(|s| vec![s.clone()]).collect();
    let mut frontier = chains.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for ch in &frontier {
            for s in &subsets {
                if is_sub(ch.last().unwrap(), s) {
                    let mut c2 = ch.clone();
                    c2.push(s.clone());
                    next.push(c2);
                }
            }
        }
        chains.extend(next.iter().cloned());
        frontier = next;
    }
    assert_eq!(c.simplices.len(), chains.len());
    for ch in &chains {
        let top = ch.last().unwrap();
        let (diam, s) = simplex_grade(x.base(), top).unwrap();
        let t = 1.0 - ch[0].iter().map(|&v| x.weights()[v]).sum::<f64>();
        let g = c.grade_of(&Cell::Chain(ch.clone())).expect("chain present");
        assert_eq!(g[0], diam);
        assert_eq!(g[1], s);
        assert!((g[2] - t.max(0.0)).abs() < 1e-12, "{ch:?}: {g:?} vs {t}");
    }
    assert!(c.is_downward_closed());
}
