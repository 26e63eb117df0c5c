//! Neighborhood bi- and trifiltrations over a finite ambient field.

use rayon::prelude::*;

use super::{AmbientField, GradedSubsetMask, ParamGrid};
use crate::{Error, Result};

/// Points `y'` with `d_E(y, y') <= r` and `d_B(f(y), f(y')) <= s`.
pub fn ball_rs(amb: &AmbientField, y: usize, r: f64, s: f64) -> Result<Vec<usize>> {
    let e = amb.field();
    if y >= e.n() {
        return Err(Error::IndexOutOfRange { index: y, len: e.n() });
    }
    if !(r >= 0.0 && s >= 0.0) {
        return Err(Error::InvalidParameter(format!("ball radii must be >= 0, got r={r}, s={s}")));
    }
    Ok((0..e.n()).filter(|&z| e.dist(y, z) <= r && e.bdist(y, e, z) <= s).collect())
}

/// Per ambient point, the grid cell `(r index, s index)` at which `z` first
/// enters the ball around `y`, or `None` if never within the grid.
fn entry_cell(amb: &AmbientField, r: &ParamGrid, s: &ParamGrid, y: usize, z: usize) -> Option<(usize, usize)> {
    let e = amb.field();
    Some((r.first_at_least(e.dist(y, z))?, s.first_at_least(e.bdist(y, e, z))?))
}

/// Union of `(r, s)`-balls around the points of `xset`.
pub fn nbhd_bifiltration(
    xset: &[usize],
    amb: &AmbientField,
    r_grid: &ParamGrid,
    s_grid: &ParamGrid,
) -> Result<GradedSubsetMask> {
    if xset.is_empty() {
        return Err(Error::Empty("reference set"));
    }
    let n = amb.n();
    if let Some(&bad) = xset.iter().find(|&&x| x >= n) {
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    let (nr, ns) = (r_grid.len(), s_grid.len());
    // per point: membership over the (r, s) grid
    let per_point: Vec<Vec<bool>> = (0..n)
        .into_par_iter()
        .map(|y| {
            // least r index reaching y for each s index
            let mut first_r = vec![usize::MAX; ns];
            for &x in xset {
                if let Some((ri, si)) = entry_cell(amb, r_grid, s_grid, x, y) {
                    first_r[si] = first_r[si].min(ri);
                }
            }
            for l in 1..ns {
                first_r[l] = first_r[l].min(first_r[l - 1]);
            }
            let mut cells = vec![false; nr * ns];
            for k in 0..nr {
                for l in 0..ns {
                    cells[k * ns + l] = first_r[l] <= k;
                }
            }
            cells
        })
        .collect();
    let mut bits = vec![false; nr * ns * n];
    for (y, cells) in per_point.iter().enumerate() {
        for (c, &b) in cells.iter().enumerate() {
            bits[c * n + y] = b;
        }
    }
    Ok(GradedSubsetMask::new(vec![r_grid.clone(), s_grid.clone()], n, bits))
}

/// Measure of every `(r, s)`-ball, laid out as `[(r index * |s| + s index) * n + y]`.
pub fn ball_masses(amb: &AmbientField, r_grid: &ParamGrid, s_grid: &ParamGrid) -> Result<Vec<f64>> {
    let w = amb.weights().ok_or(Error::MissingWeights)?;
    let n = amb.n();
    let (nr, ns) = (r_grid.len(), s_grid.len());
    let support: Vec<usize> = (0..n).filter(|&z| w[z] > 0.0).collect();
    let per_point: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|y| {
            let mut m = vec![0.0; nr * ns];
            for &z in &support {
                if let Some((ri, si)) = entry_cell(amb, r_grid, s_grid, y, z) {
                    m[ri * ns + si] += w[z];
                }
            }
            for k in 0..nr {
                for l in 1..ns {
                    m[k * ns + l] += m[k * ns + l - 1];
                }
            }
            for k in 1..nr {
                for l in 0..ns {
                    m[k * ns + l] += m[(k - 1) * ns + l];
                }
            }
            m
        })
        .collect();
    let mut out = vec![0.0; nr * ns * n];
    for (y, m) in per_point.iter().enumerate() {
        for (c, &v) in m.iter().enumerate() {
            out[c * n + y] = v;
        }
    }
    Ok(out)
}

/// Points whose `(r, s)`-ball carries mass at least `1 - t`.
pub fn nbhd_trifiltration(
    amb: &AmbientField,
    r_grid: &ParamGrid,
    s_grid: &ParamGrid,
    t_grid: &ParamGrid,
) -> Result<GradedSubsetMask> {
    let masses = ball_masses(amb, r_grid, s_grid)?;
    Ok(trifiltration_from_masses(&masses, amb.n(), r_grid, s_grid, t_grid))
}

/// Slack on the mass condition absorbing summation order.
pub const MASS_SLACK: f64 = 1e-12;

pub fn trifiltration_from_masses(
    masses: &[f64],
    n: usize,
    r_grid: &ParamGrid,
    s_grid: &ParamGrid,
    t_grid: &ParamGrid,
) -> GradedSubsetMask {
    let rs = r_grid.len() * s_grid.len();
    let nt = t_grid.len();
    let mut bits = vec![false; rs * nt * n];
    for c in 0..rs {
        for (q, &t) in t_grid.values().iter().enumerate() {
            let base = (c * nt + q) * n;
            for y in 0..n {
                bits[base + y] = masses[c * n + y] >= 1.0 - t - MASS_SLACK;
            }
        }
    }
    GradedSubsetMask::new(vec![r_grid.clone(), s_grid.clone(), t_grid.clone()], n, bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{BPoint, MMField, MetricField, TargetSpace};
    use std::sync::Arc;

    fn line(n: usize) -> MetricField {
        let pts: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64]).collect();
        let vals = (0..n).map(|i| BPoint::Coords(vec![0.5 * i as f64])).collect();
        MetricField::from_points(pts, vals, Arc::new(TargetSpace::euclidean(1))).unwrap()
    }

    #[test]
    fn ball_on_line() {
        let amb = AmbientField::new(line(5));
        assert_eq!(ball_rs(&amb, 2, 2.0, 0.5).unwrap(), vec![1, 2, 3]);
        assert_eq!(ball_rs(&amb, 2, 2.0, 1.0).unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(ball_rs(&amb, 2, 0.0, 0.0).unwrap(), vec![2]);
        assert_eq!(ball_rs(&amb, 0, f64::INFINITY, f64::INFINITY).unwrap().len(), 5);
    }

    #[test]
    fn bifiltration_matches_balls() {
        let amb = AmbientField::new(line(6));
        let r = ParamGrid::range("r", 0.0, 3.0, 0.5).unwrap();
        let s = ParamGrid::new("s", vec![0.0, 0.5, 1.0, f64::INFINITY]).unwrap();
        let x = [1, 4];
        let m = nbhd_bifiltration(&x, &amb, &r, &s).unwrap();
        assert!(m.is_monotone());
        for (k, &rv) in r.values().iter().enumerate() {
            for (l, &sv) in s.values().iter().enumerate() {
                let mut want = vec![false; 6];
                for &xi in &x {
                    for z in ball_rs(&amb, xi, rv, sv).unwrap() {
                        want[z] = true;
                    }
                }
                assert_eq!(m.at(&[k, l]), want.as_slice());
            }
        }
        assert_eq!(m.at(&[0, 0]), &[false, true, false, false, true, false]);
    }

    #[test]
    fn trifiltration_extremes() {
        let amb = AmbientField::with_measure(MMField::uniform(line(4)));
        let r = ParamGrid::range("r", 0.0, 3.0, 1.0).unwrap();
        let s = ParamGrid::new("s", vec![0.0, f64::INFINITY]).unwrap();
        let t = ParamGrid::new("t", vec![0.0, 0.5, 1.0]).unwrap();
        let m = nbhd_trifiltration(&amb, &r, &s, &t).unwrap();
        assert!(m.is_monotone());
        assert!(m.at(&[0, 0, 2]).iter().all(|b| *b));
        assert!(m.at(&[0, 0, 0]).iter().all(|b| !*b));
        // full mass needs radius 3 from an end point, 2 from the middle
        assert_eq!(m.at(&[2, 1, 0]), &[false, true, true, false]);
        assert!(nbhd_trifiltration(&AmbientField::new(line(3)), &r, &s, &t).is_err());
    }
}
