//! Minimum enclosing balls (Welzl) and radii in the target space.

use rand::seq::SliceRandom;

use crate::{seeds, BPoint, Error, Result, TargetSpace};

/// Dimension up to which the point order is shuffled before Welzl's
/// recursion; above it the input order is used.
pub const SHUFFLE_MAX_DIM: usize = 16;

#[derive(Clone, Debug)]
struct Ball {
    center: Vec<f64>,
    r2: f64,
}

impl Ball {
    fn contains(&self, p: &[f64]) -> bool {
        let d2: f64 = self.center.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
        d2 <= self.r2 * (1.0 + 1e-12) + 1e-24
    }
}

/// Smallest ball with every point of `r` on its boundary, centered in their
/// affine hull.
fn circumball(r: &[&[f64]], dim: usize) -> Ball {
    match r.len() {
        0 => Ball {
            center: vec![0.0; dim],
            r2: -1.0,
        },
        1 => Ball {
            center: r[0].to_vec(),
            r2: 0.0,
        },
        _ => {
            let o = r[0];
            let v: Vec<Vec<f64>> = r[1..].iter().map(|p| p.iter().zip(o).map(|(a, b)| a - b).collect()).collect();
            let k = v.len();
            let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
            // 2 (v_i . v_j) lambda_j = |v_i|^2
            let mut a = vec![0.0; k * k];
            let mut rhs = vec![0.0; k];
            for i in 0..k {
                for j in 0..k {
                    a[i * k + j] = 2.0 * dot(&v[i], &v[j]);
                }
                rhs[i] = dot(&v[i], &v[i]);
            }
            let lam = solve(k, &mut a, &mut rhs);
            let mut center = o.to_vec();
            for (l, vi) in lam.iter().zip(&v) {
                for (c, x) in center.iter_mut().zip(vi) {
                    *c += l * x;
                }
            }
            let r2 = r
                .iter()
                .map(|p| p.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
                .fold(0.0, f64::max);
            Ball { center, r2 }
        }
    }
}

/// Gaussian elimination with partial pivoting; degenerate pivots leave the
/// variable at zero.
fn solve(k: usize, a: &mut [f64], b: &mut [f64]) -> Vec<f64> {
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut piv_col = vec![usize::MAX; k];
    let mut row = 0;
    for col in 0..k {
        if row == k {
            break;
        }
        let (best, val) = (row..k)
            .map(|i| (i, a[i * k + col].abs()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= 1e-12 * scale {
            continue;
        }
        for c in 0..k {
            a.swap(row * k + c, best * k + c);
        }
        b.swap(row, best);
        for i in 0..k {
            if i != row {
                let f = a[i * k + col] / a[row * k + col];
                if f != 0.0 {
                    for c in col..k {
                        a[i * k + c] -= f * a[row * k + c];
                    }
                    b[i] -= f * b[row];
                }
            }
        }
        piv_col[row] = col;
        row += 1;
    }
    let mut x = vec![0.0; k];
    for r in 0..row {
        let c = piv_col[r];
        x[c] = b[r] / a[r * k + c];
    }
    x
}

fn welzl<'a>(p: &[&'a [f64]], r: &mut Vec<&'a [f64]>, dim: usize) -> Ball {
    if p.is_empty() || r.len() == dim + 1 {
        return circumball(r, dim);
    }
    let (last, rest) = p.split_last().unwrap();
    let ball = welzl(rest, r, dim);
    if ball.r2 >= 0.0 && ball.contains(last) {
        return ball;
    }
    r.push(last);
    let ball = welzl(rest, r, dim);
    r.pop();
    ball
}

/// Center and radius of the smallest ball containing `pts`.
pub fn min_enclosing_ball(pts: &[Vec<f64>]) -> Result<(Vec<f64>, f64)> {
    let Some(first) = pts.first() else {
        return Err(Error::Empty("point set"));
    };
    let dim = first.len();
    let mut order: Vec<&[f64]> = pts.iter().map(|v| v.as_slice()).collect();
    if dim <= SHUFFLE_MAX_DIM {
        // a fixed stream keeps results reproducible
        order.shuffle(&mut seeds::rng(0, &[pts.len() as u64]));
    }
    let ball = welzl(&order, &mut Vec::new(), dim);
    let r = pts
        .iter()
        .map(|p| p.iter().zip(&ball.center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
        .fold(0.0, f64::max)
        .sqrt();
    Ok((ball.center, r))
}

/// `inf_b sup_c d_B(b, c)` over all of `B`.
pub fn radius_in_b(space: &TargetSpace, pts: &[&BPoint]) -> Result<f64> {
    if pts.is_empty() {
        return Err(Error::Empty("point set"));
    }
    match space {
        TargetSpace::Euclidean { .. } => {
            let coords: Vec<Vec<f64>> = pts
                .iter()
                .map(|p| match p {
                    BPoint::Coords(c) => Ok(c.clone()),
                    BPoint::Index(_) => Err(Error::SpaceMismatch("index point in Euclidean space".into())),
                })
                .collect::<Result<_>>()?;
            if coords.len() == 1 {
                return Ok(0.0);
            }
            if coords[0].len() == 1 {
                let (lo, hi) = coords.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c[0]), hi.max(c[0])));
                return Ok(0.5 * (hi - lo));
            }
            Ok(min_enclosing_ball(&coords)?.1)
        }
        TargetSpace::Explicit { matrix } => Ok((0..matrix.rows())
            .map(|b| pts.iter().map(|c| space.dist(&BPoint::Index(b), c)).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points() {
        let (c, r) = min_enclosing_ball(&[vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        assert!((c[0] - 1.0).abs() < 1e-12 && c[1].abs() < 1e-12);
    }

    #[test]
    fn equilateral_triangle() {
        let h = 3f64.sqrt() / 2.0;
        let (_, r) = min_enclosing_ball(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]]).unwrap();
        assert!((r - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn obtuse_triangle_uses_longest_side() {
        let (_, r) = min_enclosing_ball(&[vec![0.0, 0.0], vec![4.0, 0.0], vec![2.0, 0.5]]).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_duplicates() {
        let pts = vec![vec![1.0], vec![1.0], vec![3.0], vec![2.0]];
        let (_, r) = min_enclosing_ball(&pts).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn explicit_space_radius() {
        let m = crate::Matrix::from_rows(&[vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]]);
        let sp = TargetSpace::explicit(m).unwrap();
        let a = BPoint::Index(0);
        let b = BPoint::Index(2);
        assert_eq!(radius_in_b(&sp, &[&a, &b]).unwrap(), 1.0);
    }
}
