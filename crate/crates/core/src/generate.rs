//! Instance generators for demos, experiments and tests.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;

use crate::{seeds, BPoint, MMField, Matrix, MetricField, Result, TargetSpace};

/// Field on points of the plane with scalar values `f(x, y)`.
pub fn plane_field(points: Vec<Vec<f64>>, f: impl Fn(f64, f64) -> f64) -> Result<MetricField> {
    let values = points.iter().map(|p| BPoint::Coords(vec![f(p[0], p[1])])).collect();
    MetricField::from_points(points, values, Arc::new(TargetSpace::euclidean(1)))
}

/// `n` points on each of two circles of radius `radius` centered at
/// `(-offset, 0)` and `(offset, 0)`, at random angles.
pub fn two_circles(n: usize, radius: f64, offset: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = seeds::rng(seed, &[0x7c, n as u64]);
    let mut pts = Vec::with_capacity(2 * n);
    for cx in [-offset, offset] {
        for _ in 0..n {
            let a: f64 = rng.gen_range(0.0..2.0 * PI);
            pts.push(vec![cx + radius * a.cos(), radius * a.sin()]);
        }
    }
    pts
}

/// Nodes of the regular grid with spacing `step` over `[x0, x1] x [y0, y1]`.
pub fn grid_points(x0: f64, x1: f64, y0: f64, y1: f64, step: f64) -> Vec<Vec<f64>> {
    let nx = ((x1 - x0) / step + 1e-9).floor() as usize + 1;
    let ny = ((y1 - y0) / step + 1e-9).floor() as usize + 1;
    let mut pts = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            pts.push(vec![x0 + i as f64 * step, y0 + j as f64 * step]);
        }
    }
    pts
}

/// `n` equally spaced points on the unit circle with von Mises weights
/// `exp(kappa cos(theta - theta0))`, normalized.
pub fn weighted_circle(n: usize, kappa: f64, theta0: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let angles: Vec<f64> = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
    let pts = angles.iter().map(|a| vec![a.cos(), a.sin()]).collect();
    let raw: Vec<f64> = angles.iter().map(|a| (kappa * (a - theta0).cos()).exp()).collect();
    let total: f64 = raw.iter().sum();
    (pts, raw.iter().map(|w| w / total).collect())
}

/// Random field on `n` points of the unit square in `R^dim_x` with values in
/// `R^dim_b`, scaled down where needed to be 1-Lipschitz.
pub fn random_field(n: usize, dim_x: usize, dim_b: usize, seed: u64) -> MetricField {
    let mut rng = seeds::rng(seed, &[0x52, n as u64, dim_x as u64, dim_b as u64]);
    let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..dim_x).map(|_| rng.gen::<f64>()).collect()).collect();
    let mut vals: Vec<Vec<f64>> = (0..n).map(|_| (0..dim_b).map(|_| rng.gen::<f64>()).collect()).collect();
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let mut ratio: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let dx = dist(&pts[i], &pts[j]);
            if dx > 0.0 {
                ratio = ratio.max(dist(&vals[i], &vals[j]) / dx);
            }
        }
    }
    if ratio > 1.0 {
        // a little slack keeps the Lipschitz check clear of roundoff
        let c = 1.0 / (ratio * (1.0 + 1e-9));
        for v in &mut vals {
            for x in v.iter_mut() {
                *x *= c;
            }
        }
    }
    MetricField::from_points(
        pts,
        vals.into_iter().map(BPoint::Coords).collect(),
        Arc::new(TargetSpace::euclidean(dim_b)),
    )
    .expect("generated field is well formed")
}

/// Random probability vector with all entries positive.
pub fn random_weights(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = seeds::rng(seed, &[0x57, n as u64]);
    let raw: Vec<f64> = (0..n).map(|_| 0.2 + rng.gen::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| w / total).collect()
}

pub fn random_mm_field(n: usize, dim_x: usize, dim_b: usize, seed: u64) -> MMField {
    let f = random_field(n, dim_x, dim_b, seed);
    MMField::new(f, random_weights(n, seed)).expect("lengths match")
}

/// Two-point fields with domain distances 1 and 2, equal values and uniform
/// weights; their `p = inf` Gromov-Wasserstein distance is `1/2`.
pub fn two_point_pair() -> (MMField, MMField) {
    let space = Arc::new(TargetSpace::euclidean(1));
    let mk = |d: f64| {
        let m = Matrix::from_rows(&[vec![0.0, d], vec![d, 0.0]]);
        let vals = vec![BPoint::Coords(vec![0.0]); 2];
        MMField::uniform(MetricField::new(m, vals, space.clone()).expect("well formed"))
    };
    (mk(1.0), mk(2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{validate_field, Tolerances};

    #[test]
    fn random_fields_validate() {
        for s in 0..20 {
            let f = random_mm_field(6, 2, 2, s);
            assert!(validate_field(&f, &Tolerances::default()).is_valid());
        }
    }

    #[test]
    fn shapes() {
        assert_eq!(grid_points(-1.0, 1.0, 0.0, 1.0, 0.5).len(), 15);
        assert_eq!(two_circles(10, 1.0, 1.5, 0).len(), 20);
        let (p, w) = weighted_circle(12, 6.0, 0.0);
        assert_eq!(p.len(), 12);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(w[0] > w[6]);
    }
}
