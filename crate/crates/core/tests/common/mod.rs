#![allow(dead_code)]

pub mod oracles;

use std::sync::Arc;

use mmfield::{BPoint, MMField, Matrix, MetricField, TargetSpace};

pub fn line_space() -> Arc<TargetSpace> {
    Arc::new(TargetSpace::euclidean(1))
}

/// One-point field with value `b` in the real line.
pub fn singleton(b: f64) -> MMField {
    let f = MetricField::new(Matrix::zeros(1, 1), vec![BPoint::Coords(vec![b])], line_space()).unwrap();
    MMField::uniform(f)
}

/// The same mm-field with point `i` moved to position `perm[i]`.
pub fn relabel(x: &MMField, perm: &[usize]) -> MMField {
    let n = x.n();
    let mut inv = vec![0; n];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    let d = Matrix::from_fn(n, n, |a, b| x.base().dist(inv[a], inv[b]));
    let vals = (0..n).map(|a| x.base().value(inv[a]).clone()).collect();
    let w = (0..n).map(|a| x.weights()[inv[a]]).collect();
    MMField::new(MetricField::new(d, vals, x.base().space().clone()).unwrap(), w).unwrap()
}

/// Plane field with an atom of mass 1/2 at `(1, 0)` and `n - 1` points of
/// equal mass within 0.1 of the origin; values `0.1 y`, plus `shift` at the
/// atom.
pub fn atom_field(n: usize, seed: u64, shift: f64) -> MMField {
    use rand::Rng;
    let mut rng = mmfield::seeds::rng(seed, &[0xa7]);
    let mut pts = vec![vec![1.0, 0.0]];
    for _ in 1..n {
        pts.push(vec![rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1)]);
    }
    let vals = pts
        .iter()
        .enumerate()
        .map(|(i, p)| BPoint::Coords(vec![0.1 * p[1] + if i == 0 { shift } else { 0.0 }]))
        .collect();
    let mut w = vec![0.5 / (n - 1) as f64; n];
    w[0] = 0.5;
    let f = MetricField::from_points(pts, vals, line_space()).unwrap();
    MMField::new(f, w).unwrap()
}
