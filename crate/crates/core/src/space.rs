use crate::{Error, Matrix, Result};

/// A point of the target space: coordinates in `R^dim` or an index into an
/// explicit finite metric space.
#[derive(Clone, Debug, PartialEq)]
pub enum BPoint {
    Coords(Vec<f64>),
    Index(usize),
}

/// The codomain `B` of a field.
#[derive(Clone, Debug, PartialEq)]
pub enum TargetSpace {
    Euclidean { dim: usize },
    Explicit { matrix: Matrix },
}

impl TargetSpace {
    pub fn euclidean(dim: usize) -> Self {
        TargetSpace::Euclidean { dim }
    }

    pub fn explicit(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::Shape("explicit target matrix must be square and nonempty".into()));
        }
        Ok(TargetSpace::Explicit { matrix })
    }

    /// Distance between two points. Mixed or malformed points panic; use
    /// [`TargetSpace::check_point`] on untrusted input first.
    #[inline]
    pub fn dist(&self, a: &BPoint, b: &BPoint) -> f64 {
        match (self, a, b) {
            (TargetSpace::Euclidean { .. }, BPoint::Coords(x), BPoint::Coords(y)) => x
                .iter()
                .zip(y)
                .map(|(u, v)| (u - v) * (u - v))
                .sum::<f64>()
                .sqrt(),
            (TargetSpace::Explicit { matrix }, BPoint::Index(i), BPoint::Index(j)) => matrix[(*i, *j)],
            _ => panic!("point kind does not match target space"),
        }
    }

    pub fn check_point(&self, p: &BPoint) -> Result<()> {
        match (self, p) {
            (TargetSpace::Euclidean { dim }, BPoint::Coords(x)) => {
                if x.len() != *dim {
                    return Err(Error::SpaceMismatch(format!(
                        "point has {} coordinates, space dimension is {}",
                        x.len(),
                        dim
                    )));
                }
                if x.iter().any(|v| !v.is_finite()) {
                    return Err(Error::SpaceMismatch("non-finite coordinate".into()));
                }
                Ok(())
            }
            (TargetSpace::Explicit { matrix }, BPoint::Index(i)) => {
                if *i >= matrix.rows() {
                    Err(Error::IndexOutOfRange {
                        index: *i,
                        len: matrix.rows(),
                    })
                } else {
                    Ok(())
                }
            }
            _ => Err(Error::SpaceMismatch("point kind does not match target space".into())),
        }
    }

    /// Number of points of an explicit space; `None` for Euclidean.
    pub fn n_points(&self) -> Option<usize> {
        match self {
            TargetSpace::Euclidean { .. } => None,
            TargetSpace::Explicit { matrix } => Some(matrix.rows()),
        }
    }

    /// Violations of the metric axioms of an explicit matrix:
    /// `(i, j, k, magnitude)`, with `k == usize::MAX` for pairwise defects.
    pub fn metric_defects(&self, tol: f64) -> Vec<(usize, usize, usize, f64)> {
        let mut out = Vec::new();
        let TargetSpace::Explicit { matrix } = self else {
            return out;
        };
        let n = matrix.rows();
        for i in 0..n {
            if matrix[(i, i)].abs() > tol {
                out.push((i, i, usize::MAX, matrix[(i, i)].abs()));
            }
            for j in 0..n {
                let a = matrix[(i, j)];
                if !(a >= -tol) || !a.is_finite() {
                    out.push((i, j, usize::MAX, if a.is_finite() { -a } else { f64::INFINITY }));
                }
                if j > i && (a - matrix[(j, i)]).abs() > tol {
                    out.push((i, j, usize::MAX, (a - matrix[(j, i)]).abs()));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let excess = matrix[(i, k)] - matrix[(i, j)] - matrix[(j, k)];
                    if excess > tol {
                        out.push((i, j, k, excess));
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_distance_is_l2() {
        let s = TargetSpace::euclidean(2);
        let d = s.dist(&BPoint::Coords(vec![0.0, 0.0]), &BPoint::Coords(vec![3.0, 4.0]));
        assert_eq!(d, 5.0);
    }

    #[test]
    fn explicit_metric_defects() {
        let m = Matrix::from_rows(&[vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]]);
        let s = TargetSpace::explicit(m).unwrap();
        let defects = s.metric_defects(1e-9);
        assert!(defects.iter().any(|&(i, j, k, e)| i == 0 && j == 1 && k == 2 && (e - 3.0).abs() < 1e-12));
        assert_eq!(s.dist(&BPoint::Index(0), &BPoint::Index(2)), 5.0);
    }
}
