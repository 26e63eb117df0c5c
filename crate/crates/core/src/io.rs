//! JSON field files.
//!
//! ```json
//! {
//!   "n": 3,
//!   "metric": {"type": "euclidean", "dim": 1},
//!   "points": [[0, 0], [1, 0], [0, 1]],
//!   "values": [[0.0], [0.5], [0.2]],
//!   "weights": [0.5, 0.25, 0.25]
//! }
//! ```
//!
//! `metric` describes the target space: `{"type": "euclidean", "dim": k}` or
//! `{"type": "explicit", "matrix": [[...], ...]}`. Values are coordinate
//! arrays or indices into the explicit matrix. Domain distances come from
//! `d`, the strict lower triangle in row-major order, or from `points`,
//! Euclidean coordinates of the domain. When both are given `d` is used and
//! `points` are kept for drawing. `weights`, `labels` and `pseudo_ok` are
//! optional; unknown keys are rejected.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{BPoint, Error, MMField, Matrix, MetricField, Result, TargetSpace};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum MetricSpec {
    Euclidean { dim: usize },
    Explicit { matrix: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum ValueSpec {
    Index(usize),
    Scalar(f64),
    Coords(Vec<f64>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldSpec {
    n: usize,
    metric: MetricSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d: Option<Vec<f64>>,
    values: Vec<ValueSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pseudo_ok: bool,
}

/// Contents of a field file.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldFile {
    pub field: MetricField,
    pub weights: Option<Vec<f64>>,
}

impl FieldFile {
    pub fn mm(&self) -> Result<MMField> {
        let w = self.weights.clone().ok_or(Error::MissingWeights)?;
        MMField::new(self.field.clone(), w)
    }

    /// The weighted field, or the uniform one when no weights are given.
    pub fn mm_or_uniform(&self) -> Result<MMField> {
        match &self.weights {
            Some(w) => MMField::new(self.field.clone(), w.clone()),
            None => Ok(MMField::uniform(self.field.clone())),
        }
    }
}

pub fn parse_field(text: &str) -> Result<FieldFile> {
    let spec: FieldSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let n = spec.n;
    let space = Arc::new(match spec.metric {
        MetricSpec::Euclidean { dim } => {
            if dim == 0 {
                return Err(Error::Parse("euclidean dim must be positive".into()));
            }
            TargetSpace::euclidean(dim)
        }
        MetricSpec::Explicit { matrix } => TargetSpace::explicit(Matrix::from_rows(&matrix))?,
    });
    if spec.values.len() != n {
        return Err(Error::Shape(format!("n = {n} but {} values", spec.values.len())));
    }
    // a bare number in a Euclidean space is a one-dimensional coordinate
    let euclidean = matches!(&*space, TargetSpace::Euclidean { .. });
    let values: Vec<BPoint> = spec
        .values
        .into_iter()
        .map(|v| match v {
            ValueSpec::Index(i) if euclidean => Ok(BPoint::Coords(vec![i as f64])),
            ValueSpec::Index(i) => Ok(BPoint::Index(i)),
            ValueSpec::Scalar(x) if euclidean => Ok(BPoint::Coords(vec![x])),
            ValueSpec::Scalar(x) => Err(Error::Parse(format!("value {x} is not an index"))),
            ValueSpec::Coords(c) => Ok(BPoint::Coords(c)),
        })
        .collect::<Result<_>>()?;
    if let Some(p) = &spec.points {
        if p.len() != n {
            return Err(Error::Shape(format!("n = {n} but {} points", p.len())));
        }
    }
    let mut field = match (spec.d, spec.points) {
        (Some(d), points) => {
            let m = Matrix::from_lower_triangle(n, &d).ok_or_else(|| {
                Error::Shape(format!("d has {} entries, expected {}", d.len(), n * n.saturating_sub(1) / 2))
            })?;
            let f = MetricField::new(m, values, space)?;
            match points {
                Some(p) => f.with_coords(p)?,
                None => f,
            }
        }
        (None, Some(p)) => MetricField::from_points(p, values, space)?,
        (None, None) => return Err(Error::Parse("one of d or points is required".into())),
    };
    if let Some(l) = spec.labels {
        field = field.with_labels(l)?;
    }
    field = field.with_pseudo_ok(spec.pseudo_ok);
    if let Some(w) = &spec.weights {
        if w.len() != n {
            return Err(Error::Shape(format!("n = {n} but {} weights", w.len())));
        }
    }
    Ok(FieldFile {
        field,
        weights: spec.weights,
    })
}

pub fn read_field(path: &std::path::Path) -> Result<FieldFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_field(&text)
}

pub fn field_to_json(field: &MetricField, weights: Option<&[f64]>) -> serde_json::Value {
    let metric = match &**field.space() {
        TargetSpace::Euclidean { dim } => MetricSpec::Euclidean { dim: *dim },
        TargetSpace::Explicit { matrix } => MetricSpec::Explicit {
            matrix: matrix.to_rows(),
        },
    };
    let values = field
        .values()
        .iter()
        .map(|v| match v {
            BPoint::Index(i) => ValueSpec::Index(*i),
            BPoint::Coords(c) => ValueSpec::Coords(c.clone()),
        })
        .collect();
    let from_coords = field.distances_from_coords();
    let spec = FieldSpec {
        n: field.n(),
        metric,
        points: field.coords().map(|c| c.to_vec()),
        d: (!from_coords).then(|| field.d().lower_triangle()),
        values,
        weights: weights.map(|w| w.to_vec()),
        labels: field.labels().map(|l| l.to_vec()),
        pseudo_ok: field.pseudo_ok(),
    };
    serde_json::to_value(spec).expect("field spec serializes")
}

pub fn mm_to_json(x: &MMField) -> serde_json::Value {
    field_to_json(x.base(), Some(x.weights()))
}
