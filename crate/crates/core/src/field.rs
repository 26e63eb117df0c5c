//! Fields, relations, couplings, validation and the connecting and gluing
//! constructions.

use std::sync::Arc;

use serde::Serialize;

use crate::{BPoint, Error, Matrix, Result, TargetSpace};

/// Absolute tolerances for metric axioms and probability sums.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub metric: f64,
    pub mass: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            metric: 1e-9,
            mass: 1e-9,
        }
    }
}

/// A finite metric space with a 1-Lipschitz map into a target space.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricField {
    d: Matrix,
    values: Vec<BPoint>,
    space: Arc<TargetSpace>,
    labels: Option<Vec<String>>,
    coords: Option<Vec<Vec<f64>>>,
    /// `d` was computed from `coords`.
    euclidean_d: bool,
    pseudo_ok: bool,
}

impl MetricField {
    /// Checks shapes and point kinds only; metric and Lipschitz axioms are
    /// reported by [`validate_field`].
    pub fn new(d: Matrix, values: Vec<BPoint>, space: Arc<TargetSpace>) -> Result<Self> {
        if !d.is_square() {
            return Err(Error::Shape(format!("distance matrix is {}x{}", d.rows(), d.cols())));
        }
        if d.rows() != values.len() {
            return Err(Error::Shape(format!(
                "{} points but {} values",
                d.rows(),
                values.len()
            )));
        }
        if d.rows() == 0 {
            return Err(Error::Empty("field"));
        }
        for v in &values {
            space.check_point(v)?;
        }
        Ok(MetricField {
            d,
            values,
            space,
            labels: None,
            coords: None,
            euclidean_d: false,
            pseudo_ok: false,
        })
    }

    /// Field on points of `R^k` with Euclidean domain distances.
    pub fn from_points(points: Vec<Vec<f64>>, values: Vec<BPoint>, space: Arc<TargetSpace>) -> Result<Self> {
        let n = points.len();
        if let Some(k) = points.first().map(|p| p.len()) {
            if points.iter().any(|p| p.len() != k) {
                return Err(Error::Shape("points have differing dimensions".into()));
            }
        }
        let d = Matrix::from_fn(n, n, |i, j| euclid(&points[i], &points[j]));
        let mut f = MetricField::new(d, values, space)?;
        f.coords = Some(points);
        f.euclidean_d = true;
        Ok(f)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::Shape("label count differs from point count".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Attach domain coordinates (used for drawing); distances are untouched.
    pub fn with_coords(mut self, coords: Vec<Vec<f64>>) -> Result<Self> {
        if coords.len() != self.n() {
            return Err(Error::Shape("coordinate count differs from point count".into()));
        }
        self.coords = Some(coords);
        self.euclidean_d = false;
        Ok(self)
    }

    pub fn with_pseudo_ok(mut self, pseudo_ok: bool) -> Self {
        self.pseudo_ok = pseudo_ok;
        self
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.d.rows()
    }

    pub fn d(&self) -> &Matrix {
        &self.d
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.d[(i, j)]
    }

    pub fn values(&self) -> &[BPoint] {
        &self.values
    }

    #[inline]
    pub fn value(&self, i: usize) -> &BPoint {
        &self.values[i]
    }

    pub fn space(&self) -> &Arc<TargetSpace> {
        &self.space
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    /// Distances were computed from the stored coordinates.
    pub fn distances_from_coords(&self) -> bool {
        self.euclidean_d
    }

    pub fn pseudo_ok(&self) -> bool {
        self.pseudo_ok
    }

    /// Distance in `B` between `self.value(i)` and `other.value(j)`.
    #[inline]
    pub fn bdist(&self, i: usize, other: &MetricField, j: usize) -> f64 {
        self.space.dist(&self.values[i], &other.values[j])
    }

    pub fn diameter(&self) -> f64 {
        self.d.as_slice().iter().cloned().fold(0.0, f64::max)
    }

    /// Subfield on the listed indices (repeats allowed).
    pub fn restrict(&self, idx: &[usize]) -> Result<MetricField> {
        for &i in idx {
            if i >= self.n() {
                return Err(Error::IndexOutOfRange { index: i, len: self.n() });
            }
        }
        let mut f = MetricField::new(
            self.d.select(idx),
            idx.iter().map(|&i| self.values[i].clone()).collect(),
            self.space.clone(),
        )?;
        f.labels = self.labels.as_ref().map(|l| idx.iter().map(|&i| l[i].clone()).collect());
        f.coords = self.coords.as_ref().map(|c| idx.iter().map(|&i| c[i].clone()).collect());
        f.euclidean_d = self.euclidean_d;
        f.pseudo_ok = self.pseudo_ok;
        Ok(f)
    }

    pub(crate) fn same_space(&self, other: &MetricField) -> Result<()> {
        if Arc::ptr_eq(&self.space, &other.space) || *self.space == *other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch("fields map into different target spaces".into()))
        }
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

/// A field with a probability vector on its points.
#[derive(Clone, Debug, PartialEq)]
pub struct MMField {
    base: MetricField,
    weights: Vec<f64>,
}

impl MMField {
    /// Checks lengths only; see [`validate_field`] for the measure axioms.
    pub fn new(base: MetricField, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != base.n() {
            return Err(Error::Shape(format!(
                "{} weights for {} points",
                weights.len(),
                base.n()
            )));
        }
        Ok(MMField { base, weights })
    }

    pub fn uniform(base: MetricField) -> Self {
        let n = base.n();
        MMField {
            base,
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn base(&self) -> &MetricField {
        &self.base
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.weights[i] > 0.0).collect()
    }

    /// The subfield on the support with renormalized weights, and the
    /// original index of every retained point.
    pub fn restrict_to_support(&self) -> Result<(MMField, Vec<usize>)> {
        let idx = self.support();
        if idx.is_empty() {
            return Err(Error::Empty("support"));
        }
        let base = self.base.restrict(&idx)?;
        let total: f64 = idx.iter().map(|&i| self.weights[i]).sum();
        let w = idx.iter().map(|&i| self.weights[i] / total).collect();
        Ok((MMField { base, weights: w }, idx))
    }
}

/// A single violated invariant with its offending indices and magnitude.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NonFinite { i: usize, j: usize },
    Negative { i: usize, j: usize, magnitude: f64 },
    Diagonal { i: usize, magnitude: f64 },
    Asymmetric { i: usize, j: usize, magnitude: f64 },
    Triangle { i: usize, j: usize, k: usize, magnitude: f64 },
    Lipschitz { i: usize, j: usize, magnitude: f64 },
    ZeroDistance { i: usize, j: usize },
    TargetMetric { i: usize, j: usize, k: Option<usize>, magnitude: f64 },
    NegativeWeight { i: usize, magnitude: f64 },
    WeightSum { sum: f64, magnitude: f64 },
    EmptySupport,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Anything [`validate_field`] accepts.
pub trait Validate {
    fn validate(&self, tol: &Tolerances) -> ValidationReport;
}

impl Validate for MetricField {
    fn validate(&self, tol: &Tolerances) -> ValidationReport {
        let mut v = Vec::new();
        for (i, j, k, m) in self.space.metric_defects(tol.metric) {
            v.push(Violation::TargetMetric {
                i,
                j,
                k: (k != usize::MAX).then_some(k),
                magnitude: m,
            });
        }
        let n = self.n();
        let d = &self.d;
        let mut finite = true;
        for i in 0..n {
            for j in 0..n {
                let a = d[(i, j)];
                if !a.is_finite() {
                    v.push(Violation::NonFinite { i, j });
                    finite = false;
                } else if a < -tol.metric {
                    v.push(Violation::Negative { i, j, magnitude: -a });
                }
            }
        }
        for i in 0..n {
            if d[(i, i)].abs() > tol.metric {
                v.push(Violation::Diagonal { i, magnitude: d[(i, i)].abs() });
            }
            for j in i + 1..n {
                let gap = (d[(i, j)] - d[(j, i)]).abs();
                if gap > tol.metric {
                    v.push(Violation::Asymmetric { i, j, magnitude: gap });
                }
                if !self.pseudo_ok && d[(i, j)] <= 0.0 {
                    v.push(Violation::ZeroDistance { i, j });
                }
                let excess = self.space.dist(&self.values[i], &self.values[j]) - d[(i, j)];
                if excess > tol.metric {
                    v.push(Violation::Lipschitz { i, j, magnitude: excess });
                }
            }
        }
        // Distances computed from Euclidean coordinates satisfy the triangle
        // inequality by construction.
        if finite && !self.euclidean_d {
            for i in 0..n {
                for k in i + 1..n {
                    let dik = d[(i, k)];
                    for j in 0..n {
                        let excess = dik - d[(i, j)] - d[(j, k)];
                        if excess > tol.metric {
                            v.push(Violation::Triangle { i, j, k, magnitude: excess });
                        }
                    }
                }
            }
        }
        ValidationReport { violations: v }
    }
}

impl Validate for MMField {
    fn validate(&self, tol: &Tolerances) -> ValidationReport {
        let mut r = self.base.validate(tol);
        for (i, &w) in self.weights.iter().enumerate() {
            if !(w >= 0.0) {
                r.violations.push(Violation::NegativeWeight { i, magnitude: -w });
            }
        }
        let sum: f64 = self.weights.iter().sum();
        if !((sum - 1.0).abs() <= tol.mass) {
            r.violations.push(Violation::WeightSum {
                sum,
                magnitude: (sum - 1.0).abs(),
            });
        }
        if !self.weights.iter().any(|&w| w > 0.0) {
            r.violations.push(Violation::EmptySupport);
        }
        r
    }
}

/// Report every violated invariant of a field or mm-field.
pub fn validate_field<F: Validate>(f: &F, tol: &Tolerances) -> ValidationReport {
    f.validate(tol)
}

/// Smallest uniform factor `c >= 1` such that scaling every domain distance by
/// `c` makes the value map 1-Lipschitz; `None` when two points at distance 0
/// carry different values. Never applied automatically.
pub fn lipschitz_rescale_factor(f: &MetricField) -> Option<f64> {
    let mut c: f64 = 1.0;
    for i in 0..f.n() {
        for j in i + 1..f.n() {
            let db = f.space.dist(&f.values[i], &f.values[j]);
            let dx = f.dist(i, j);
            if dx > 0.0 {
                c = c.max(db / dx);
            } else if db > 0.0 {
                return None;
            }
        }
    }
    Some(c)
}

/// A nonempty set of index pairs between two fields of sizes `n` and `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relation {
    n: usize,
    m: usize,
    pairs: Vec<(usize, usize)>,
}

impl Relation {
    /// Pairs are sorted and deduplicated.
    pub fn new(n: usize, m: usize, mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Empty("relation"));
        }
        for &(i, j) in &pairs {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            if j >= m {
                return Err(Error::IndexOutOfRange { index: j, len: m });
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(Relation { n, m, pairs })
    }

    pub fn identity(n: usize) -> Self {
        Relation {
            n,
            m: n,
            pairs: (0..n).map(|i| (i, i)).collect(),
        }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    pub fn left_surjective(&self) -> bool {
        let mut seen = vec![false; self.n];
        for &(i, _) in &self.pairs {
            seen[i] = true;
        }
        seen.into_iter().all(|s| s)
    }

    pub fn right_surjective(&self) -> bool {
        let mut seen = vec![false; self.m];
        for &(_, j) in &self.pairs {
            seen[j] = true;
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_correspondence(&self) -> bool {
        self.left_surjective() && self.right_surjective()
    }

    pub fn transpose(&self) -> Relation {
        let mut pairs: Vec<_> = self.pairs.iter().map(|&(i, j)| (j, i)).collect();
        pairs.sort_unstable();
        Relation {
            n: self.m,
            m: self.n,
            pairs,
        }
    }
}

/// A nonnegative matrix whose row and column sums match two probability
/// vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    matrix: Matrix,
}

impl Coupling {
    pub fn new(matrix: Matrix, mu: &[f64], nu: &[f64], tol_mass: f64) -> Result<Self> {
        check_marginals(&matrix, mu, nu, tol_mass)?;
        Ok(Coupling { matrix })
    }

    /// Skips marginal checks; for solver outputs that are correct by
    /// construction.
    pub(crate) fn from_matrix_unchecked(matrix: Matrix) -> Self {
        Coupling { matrix }
    }

    pub fn independent(mu: &[f64], nu: &[f64]) -> Self {
        Coupling {
            matrix: Matrix::from_fn(mu.len(), nu.len(), |i, j| mu[i] * nu[j]),
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn transpose(&self) -> Coupling {
        Coupling {
            matrix: self.matrix.transpose(),
        }
    }

    /// Entries with mass above `tau`.
    pub fn support(&self, tau: f64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.matrix.rows() {
            for j in 0..self.matrix.cols() {
                if self.matrix[(i, j)] > tau {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

pub(crate) fn check_marginals(matrix: &Matrix, mu: &[f64], nu: &[f64], tol_mass: f64) -> Result<()> {
    if matrix.rows() != mu.len() || matrix.cols() != nu.len() {
        return Err(Error::Shape(format!(
            "coupling is {}x{}, marginals have lengths {} and {}",
            matrix.rows(),
            matrix.cols(),
            mu.len(),
            nu.len()
        )));
    }
    if matrix.as_slice().iter().any(|&v| !(v >= -tol_mass)) {
        return Err(Error::MarginalMismatch("negative entry".into()));
    }
    for (i, s) in matrix.row_sums().into_iter().enumerate() {
        if (s - mu[i]).abs() > tol_mass {
            return Err(Error::MarginalMismatch(format!("row {i} sums to {s}, expected {}", mu[i])));
        }
    }
    for (j, s) in matrix.col_sums().into_iter().enumerate() {
        if (s - nu[j]).abs() > tol_mass {
            return Err(Error::MarginalMismatch(format!("column {j} sums to {s}, expected {}", nu[j])));
        }
    }
    Ok(())
}

/// Distortion of a relation: the larger of the worst distance discrepancy
/// over pairs of pairs and twice the worst value discrepancy.
pub fn distortion(x: &MetricField, y: &MetricField, r: &Relation) -> Result<f64> {
    if r.shape() != (x.n(), y.n()) {
        return Err(Error::Shape(format!(
            "relation shape {:?} for fields of sizes {} and {}",
            r.shape(),
            x.n(),
            y.n()
        )));
    }
    x.same_space(y)?;
    Ok(distortion_pairs(x, y, r.pairs()))
}

pub(crate) fn distortion_pairs(x: &MetricField, y: &MetricField, pairs: &[(usize, usize)]) -> f64 {
    let mut best: f64 = 0.0;
    for (a, &(i, j)) in pairs.iter().enumerate() {
        best = best.max(2.0 * x.bdist(i, y, j));
        for &(k, l) in &pairs[a + 1..] {
            best = best.max((x.dist(i, k) - y.dist(j, l)).abs());
        }
    }
    best
}

/// The field on the disjoint union of `x` and `y` with cross distances
/// `r + min over (x', y') in R of d_X(x, x') + d_Y(y', y)`.
pub fn coproduct(x: &MetricField, y: &MetricField, rel: &Relation, r: f64) -> Result<MetricField> {
    let dis = distortion(x, y, rel)?;
    let min_r = dis / 2.0;
    if !(r > 0.0) || r < min_r || !r.is_finite() {
        return Err(Error::RadiusTooSmall { r, min_r });
    }
    let (n, m) = (x.n(), y.n());
    let mut d = Matrix::zeros(n + m, n + m);
    for i in 0..n {
        for k in 0..n {
            d[(i, k)] = x.dist(i, k);
        }
    }
    for j in 0..m {
        for l in 0..m {
            d[(n + j, n + l)] = y.dist(j, l);
        }
    }
    for i in 0..n {
        for j in 0..m {
            let inf = rel
                .pairs()
                .iter()
                .map(|&(a, b)| x.dist(i, a) + y.dist(b, j))
                .fold(f64::INFINITY, f64::min);
            d[(i, n + j)] = r + inf;
            d[(n + j, i)] = r + inf;
        }
    }
    let values = x.values().iter().chain(y.values()).cloned().collect();
    let mut z = MetricField::new(d, values, x.space().clone())?;
    z.pseudo_ok = x.pseudo_ok || y.pseudo_ok;
    if let (Some(a), Some(b)) = (&x.labels, &y.labels) {
        z.labels = Some(a.iter().chain(b).cloned().collect());
    }
    Ok(z)
}

/// Result of gluing two fields along a shared subfield.
#[derive(Clone, Debug)]
pub struct Amalgam {
    pub field: MetricField,
    /// Index in `field` of every point of the first field.
    pub left: Vec<usize>,
    /// Index in `field` of every point of the second field.
    pub right: Vec<usize>,
}

fn check_embedding(y: &MetricField, z: &MetricField, map: &[usize], tol: f64, name: &str) -> Result<()> {
    if map.len() != y.n() {
        return Err(Error::NotIsometric(format!("{name} has {} entries for {} points", map.len(), y.n())));
    }
    for &a in map {
        if a >= z.n() {
            return Err(Error::IndexOutOfRange { index: a, len: z.n() });
        }
    }
    for i in 0..y.n() {
        let vd = z.space().dist(y.value(i), z.value(map[i]));
        if vd > tol {
            return Err(Error::NotIsometric(format!("{name} moves the value of point {i} by {vd}")));
        }
        for j in 0..y.n() {
            let gap = (y.dist(i, j) - z.dist(map[i], map[j])).abs();
            if gap > tol {
                return Err(Error::NotIsometric(format!(
                    "{name} distorts the pair ({i}, {j}) by {gap}"
                )));
            }
        }
    }
    Ok(())
}

/// Glue `z1` and `z2` along the images of `y` under `phi` and `psi`.
/// Points `psi(y)` are identified with `phi(y)`; other cross distances are
/// `min over y of d_1(z1, phi(y)) + d_2(psi(y), z2)`.
pub fn amalgamate(
    z1: &MetricField,
    z2: &MetricField,
    y: &MetricField,
    phi: &[usize],
    psi: &[usize],
    tol: &Tolerances,
) -> Result<Amalgam> {
    z1.same_space(y)?;
    z2.same_space(y)?;
    check_embedding(y, z1, phi, tol.metric, "phi")?;
    check_embedding(y, z2, psi, tol.metric, "psi")?;
    let n1 = z1.n();
    let mut right = vec![usize::MAX; z2.n()];
    for (k, &b) in psi.iter().enumerate() {
        right[b] = phi[k];
    }
    let mut next = n1;
    let mut extra = Vec::new();
    for (b, slot) in right.iter_mut().enumerate() {
        if *slot == usize::MAX {
            *slot = next;
            next += 1;
            extra.push(b);
        }
    }
    let total = next;
    let cross = |a: usize, b: usize| -> f64 {
        (0..y.n())
            .map(|k| z1.dist(a, phi[k]) + z2.dist(psi[k], b))
            .fold(f64::INFINITY, f64::min)
    };
    let mut d = Matrix::zeros(total, total);
    for a in 0..n1 {
        for c in 0..n1 {
            d[(a, c)] = z1.dist(a, c);
        }
    }
    for (p, &b) in extra.iter().enumerate() {
        for (q, &c) in extra.iter().enumerate() {
            d[(n1 + p, n1 + q)] = z2.dist(b, c);
        }
        for a in 0..n1 {
            let v = cross(a, b);
            d[(a, n1 + p)] = v;
            d[(n1 + p, a)] = v;
        }
    }
    let values = z1
        .values()
        .iter()
        .cloned()
        .chain(extra.iter().map(|&b| z2.value(b).clone()))
        .collect();
    let mut field = MetricField::new(d, values, z1.space().clone())?;
    field.pseudo_ok = z1.pseudo_ok || z2.pseudo_ok;
    Ok(Amalgam {
        field,
        left: (0..n1).collect(),
        right,
    })
}

/// Hausdorff distance between two nonempty index sets of a field.
pub fn hausdorff(ambient: &MetricField, a: &[usize], b: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("hausdorff subset"));
    }
    for &i in a.iter().chain(b) {
        if i >= ambient.n() {
            return Err(Error::IndexOutOfRange { index: i, len: ambient.n() });
        }
    }
    let directed = |p: &[usize], q: &[usize]| {
        p.iter()
            .map(|&i| q.iter().map(|&j| ambient.dist(i, j)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}

/// Hausdorff distance in `B` between two finite point sets.
pub fn value_hausdorff(space: &TargetSpace, a: &[&BPoint], b: &[&BPoint]) -> f64 {
    let directed = |p: &[&BPoint], q: &[&BPoint]| {
        p.iter()
            .map(|u| q.iter().map(|v| space.dist(u, v)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(ds: &[f64], vals: &[f64]) -> MetricField {
        let n = vals.len();
        let d = Matrix::from_lower_triangle(n, ds).unwrap();
        MetricField::new(
            d,
            vals.iter().map(|&v| BPoint::Coords(vec![v])).collect(),
            Arc::new(TargetSpace::euclidean(1)),
        )
        .unwrap()
    }

    #[test]
    fn lipschitz_slack_is_valid() {
        let f = line(&[1.0], &[0.0, 0.5]);
        assert!(validate_field(&f, &Tolerances::default()).is_valid());
    }

    #[test]
    fn lipschitz_violation_reported_with_excess() {
        let f = line(&[1.0], &[0.0, 1.5]);
        let r = validate_field(&f, &Tolerances::default());
        assert_eq!(r.violations.len(), 1);
        match &r.violations[0] {
            Violation::Lipschitz { i, j, magnitude } => {
                assert_eq!((*i, *j), (0, 1));
                assert!((magnitude - 0.5).abs() < 1e-12);
            }
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn triangle_violation_magnitude() {
        // lower triangle: d10, d20, d21
        let f = line(&[1.0, 5.0, 1.0], &[0.0, 0.0, 0.0]);
        let r = validate_field(&f, &Tolerances::default());
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Triangle { i: 0, j: 1, k: 2, magnitude } if (magnitude - 3.0).abs() < 1e-12)));
    }

    #[test]
    fn pseudo_metric_needs_flag() {
        let f = line(&[0.0], &[0.0, 0.0]);
        assert!(!validate_field(&f, &Tolerances::default()).is_valid());
        let f = f.with_pseudo_ok(true);
        assert!(validate_field(&f, &Tolerances::default()).is_valid());
    }

    #[test]
    fn distortion_examples() {
        let x = line(&[1.0], &[0.0, 0.0]);
        let y = line(&[2.0], &[0.0, 0.0]);
        assert_eq!(distortion(&x, &x, &Relation::identity(2)).unwrap(), 0.0);
        assert_eq!(distortion(&x, &y, &Relation::identity(2)).unwrap(), 1.0);
        let a = line(&[], &[0.0]);
        let b = line(&[], &[0.7]);
        let r = Relation::new(1, 1, vec![(0, 0)]).unwrap();
        assert!((distortion(&a, &b, &r).unwrap() - 1.4).abs() < 1e-15);
    }

    #[test]
    fn coproduct_of_singletons() {
        let a = line(&[], &[0.0]);
        let b = line(&[], &[0.7]);
        let r = Relation::new(1, 1, vec![(0, 0)]).unwrap();
        let z = coproduct(&a, &b, &r, 0.7).unwrap();
        assert_eq!(z.dist(0, 1), 0.7);
        match coproduct(&a, &b, &r, 0.5) {
            Err(Error::RadiusTooSmall { min_r, .. }) => assert!((min_r - 0.7).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn amalgamate_through_shared_point() {
        let z1 = line(&[1.0], &[0.0, 0.5]);
        let z2 = line(&[2.0], &[0.5, 1.0]);
        let y = line(&[], &[0.5]);
        let g = amalgamate(&z1, &z2, &y, &[1], &[0], &Tolerances::default()).unwrap();
        assert_eq!(g.field.n(), 3);
        assert_eq!(g.right, vec![1, 2]);
        assert_eq!(g.field.dist(0, 2), 3.0);
        assert!(validate_field(&g.field, &Tolerances::default()).is_valid());
    }

    #[test]
    fn amalgamate_rejects_non_isometric_map() {
        let z1 = line(&[1.0], &[0.0, 0.5]);
        let y = line(&[2.0], &[0.0, 0.5]);
        assert!(matches!(
            amalgamate(&z1, &z1, &y, &[0, 1], &[0, 1], &Tolerances::default()),
            Err(Error::NotIsometric(_))
        ));
    }

    #[test]
    fn hausdorff_examples() {
        let f = line(&[1.0, 3.0, 2.0], &[0.0, 0.0, 0.0]);
        assert_eq!(hausdorff(&f, &[0, 1], &[0, 1]).unwrap(), 0.0);
        assert_eq!(hausdorff(&f, &[0], &[0, 1, 2]).unwrap(), 3.0);
        assert_eq!(hausdorff(&f, &[0, 1], &[0, 1, 2]).unwrap(), 2.0);
        assert!(hausdorff(&f, &[], &[0]).is_err());
    }

    #[test]
    fn rescale_factor() {
        let f = line(&[1.0], &[0.0, 1.5]);
        assert_eq!(lipschitz_rescale_factor(&f), Some(1.5));
        let g = line(&[0.0], &[0.0, 1.0]);
        assert_eq!(lipschitz_rescale_factor(&g), None);
    }
}
