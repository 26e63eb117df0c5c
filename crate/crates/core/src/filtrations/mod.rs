//! Neighborhood and Vietoris-Rips multifiltrations of fields, on explicit
//! parameter grids, and the inclusion interleaving shift between two
//! filtrations of the same ambient set.
//!
//! All thresholds are closed (`<=`).

mod meb;
mod nbhd;
mod vr;

use std::str::FromStr;

use serde_json::{json, Value};

use crate::{Error, MMField, MetricField, Result};

pub use meb::{min_enclosing_ball, radius_in_b, SHUFFLE_MAX_DIM};
pub use nbhd::{ball_masses, ball_rs, nbhd_bifiltration, nbhd_trifiltration, trifiltration_from_masses, MASS_SLACK};
pub use vr::{
    simplex_grade, vr_bifiltration, vr_identity_inclusion, vr_trifiltration, Cell, GradedComplex, GradedSimplex,
    InclusionReport, TriCaps, DEFAULT_SUBSET_CAP, GRADE_SLACK,
};

/// Values of one filtration parameter, strictly increasing. The last value
/// may be `+inf`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamGrid {
    name: String,
    values: Vec<f64>,
}

fn snap(v: f64) -> f64 {
    let s = (v * 1e12).round() / 1e12;
    if (s - v).abs() <= 1e-9 * v.abs().max(1.0) {
        s
    } else {
        v
    }
}

impl ParamGrid {
    pub fn new(name: &str, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::GridMismatch(format!("grid {name} is empty")));
        }
        if values.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::GridMismatch(format!("grid {name} has negative or NaN values")));
        }
        if values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::GridMismatch(format!("grid {name} is not strictly increasing")));
        }
        if values[..values.len() - 1].iter().any(|v| v.is_infinite()) {
            return Err(Error::GridMismatch(format!("grid {name}: only the last value may be inf")));
        }
        Ok(ParamGrid {
            name: name.to_string(),
            values,
        })
    }

    /// `start, start + step, ...` up to `stop`; values are rounded to 12
    /// decimals so that e.g. `0:1:0.1` contains `0.8` exactly.
    pub fn range(name: &str, start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() || !start.is_finite() || !stop.is_finite() || stop < start {
            return Err(Error::GridMismatch(format!("bad range {start}:{stop}:{step}")));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        let values = (0..count).map(|k| snap(start + k as f64 * step)).collect();
        ParamGrid::new(name, values)
    }

    /// Parse `start:stop:step`, optionally followed by `,inf`; or a comma list.
    pub fn parse(name: &str, spec: &str) -> Result<Self> {
        let (head, tail_inf) = match spec.strip_suffix(",inf") {
            Some(h) => (h, true),
            None => (spec, false),
        };
        let num = |s: &str| -> Result<f64> {
            match s.trim() {
                "inf" => Ok(f64::INFINITY),
                t => t.parse::<f64>().map_err(|e| Error::Parse(format!("grid {name}: {t:?}: {e}"))),
            }
        };
        let mut grid = if head.contains(':') {
            let parts: Vec<&str> = head.split(':').collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!("grid {name}: expected start:stop:step, got {spec:?}")));
            }
            ParamGrid::range(name, num(parts[0])?, num(parts[1])?, num(parts[2])?)?
        } else {
            ParamGrid::new(name, head.split(',').map(num).collect::<Result<_>>()?)?
        };
        if tail_inf {
            grid.values.push(f64::INFINITY);
            grid = ParamGrid::new(name, grid.values)?;
        }
        Ok(grid)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Common spacing if the grid is uniform (within `1e-9` relative).
    pub fn step(&self) -> Option<f64> {
        if self.values.len() < 2 || self.values.iter().any(|v| v.is_infinite()) {
            return None;
        }
        let h = self.values[1] - self.values[0];
        self.values
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
            .then_some(h)
    }

    /// Index of the least grid value `>= x`; `None` if above the grid.
    pub fn first_at_least(&self, x: f64) -> Option<usize> {
        let k = self.values.partition_point(|&v| v < x);
        (k < self.values.len()).then_some(k)
    }

    /// Index of `x` in the grid, if present exactly.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        self.values.iter().position(|&v| v == x)
    }
}

impl FromStr for ParamGrid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ParamGrid::parse("axis", s)
    }
}

pub(crate) fn num_json(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

/// Membership of every ambient point at every cell of a 2- or 3-axis grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedSubsetMask {
    axes: Vec<ParamGrid>,
    n_points: usize,
    /// `bits[cell * n_points + point]`, cells in row-major axis order.
    bits: Vec<bool>,
}

impl GradedSubsetMask {
    pub(crate) fn new(axes: Vec<ParamGrid>, n_points: usize, bits: Vec<bool>) -> Self {
        debug_assert_eq!(bits.len(), axes.iter().map(|a| a.len()).product::<usize>() * n_points);
        GradedSubsetMask { axes, n_points, bits }
    }

    pub fn axes(&self) -> &[ParamGrid] {
        &self.axes
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn n_cells(&self) -> usize {
        self.axes.iter().map(|a| a.len()).product()
    }

    pub fn cell_index(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.axes.len(), "cell index arity");
        idx.iter().zip(&self.axes).fold(0, |acc, (&i, a)| {
            assert!(i < a.len(), "cell index out of range");
            acc * a.len() + i
        })
    }

    pub fn cell_coords(&self, mut cell: usize) -> Vec<usize> {
        let mut out = vec![0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            out[k] = cell % a.len();
            cell /= a.len();
        }
        out
    }

    /// Members at one cell.
    pub fn at(&self, idx: &[usize]) -> &[bool] {
        let c = self.cell_index(idx);
        &self.bits[c * self.n_points..(c + 1) * self.n_points]
    }

    /// Members at the cell whose grid values are exactly `vals`.
    pub fn at_values(&self, vals: &[f64]) -> Result<&[bool]> {
        let idx = vals
            .iter()
            .zip(&self.axes)
            .map(|(&v, a)| {
                a.index_of(v)
                    .ok_or_else(|| Error::GridMismatch(format!("{v} is not on grid {}", a.name())))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.at(&idx))
    }

    fn cell(&self, c: usize) -> &[bool] {
        &self.bits[c * self.n_points..(c + 1) * self.n_points]
    }

    /// Nondecreasing along every axis.
    pub fn is_monotone(&self) -> bool {
        (0..self.n_cells()).all(|c| {
            let co = self.cell_coords(c);
            (0..co.len()).all(|k| {
                if co[k] + 1 == self.axes[k].len() {
                    return true;
                }
                let mut up = co.clone();
                up[k] += 1;
                let next = self.cell(self.cell_index(&up));
                self.cell(c).iter().zip(next).all(|(a, b)| !*a || *b)
            })
        })
    }

    /// JSON with grid axes and run-length encoded members per cell
    /// (`[start, length]` runs of consecutive member indices).
    pub fn to_json(&self) -> Value {
        let axes: Vec<Value> = self
            .axes
            .iter()
            .map(|a| json!({"name": a.name(), "values": a.values().iter().map(|&v| num_json(v)).collect::<Vec<_>>()}))
            .collect();
        let cells: Vec<Value> = (0..self.n_cells())
            .map(|c| {
                let co = self.cell_coords(c);
                let grade: Vec<Value> = co.iter().zip(&self.axes).map(|(&i, a)| num_json(a.values()[i])).collect();
                let bits = self.cell(c);
                let mut runs = Vec::new();
                let mut i = 0;
                while i < bits.len() {
                    if bits[i] {
                        let s = i;
                        while i < bits.len() && bits[i] {
                            i += 1;
                        }
                        runs.push(json!([s, i - s]));
                    } else {
                        i += 1;
                    }
                }
                json!({"index": co, "grade": grade, "count": bits.iter().filter(|b| **b).count(), "runs": runs})
            })
            .collect();
        json!({"n_points": self.n_points, "axes": axes, "cells": cells})
    }
}

/// `A ⊆ B` pointwise.
pub fn subset(a: &[bool], b: &[bool]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| !*x || *y)
}

/// The ambient field of a neighborhood filtration, optionally with a
/// measure.
#[derive(Clone, Debug)]
pub struct AmbientField {
    field: MetricField,
    weights: Option<Vec<f64>>,
}

impl AmbientField {
    pub fn new(field: MetricField) -> Self {
        AmbientField { field, weights: None }
    }

    pub fn with_measure(mm: MMField) -> Self {
        AmbientField {
            weights: Some(mm.weights().to_vec()),
            field: mm.base().clone(),
        }
    }

    pub fn field(&self) -> &MetricField {
        &self.field
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn n(&self) -> usize {
        self.field.n()
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ShiftReport {
    /// Least shift `k * step` found, `+inf` if none fits in the window.
    #[serde(serialize_with = "ser_inf")]
    pub shift: f64,
    pub steps: Option<usize>,
    pub step: f64,
    /// Discretization error of the grid, half a step.
    pub half_step: f64,
}

fn ser_inf<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("inf")
    }
}

/// Least `delta` on the step lattice with `M1(g) ⊆ M2(g + delta)` and
/// `M2(g) ⊆ M1(g + delta)` at every grid cell `g`, shifting every axis by
/// the same amount. Only cells whose shifted cell lies inside the window
/// are checked: the masks say nothing past their last grid value. A shift
/// of at least the shortest axis length checks nothing and is not tried.
pub fn inclusion_interleaving_shift(m1: &GradedSubsetMask, m2: &GradedSubsetMask) -> Result<ShiftReport> {
    if m1.axes != m2.axes || m1.n_points != m2.n_points {
        return Err(Error::GridMismatch("masks differ in grids or ambient size".into()));
    }
    let steps: Vec<f64> = m1
        .axes
        .iter()
        .map(|a| a.step().ok_or_else(|| Error::GridMismatch(format!("grid {} is not uniform", a.name()))))
        .collect::<Result<_>>()?;
    let h = steps[0];
    if steps.iter().any(|s| (s - h).abs() > 1e-9 * h) {
        return Err(Error::GridMismatch("axes have different steps".into()));
    }
    let min_len = m1.axes.iter().map(|a| a.len()).min().unwrap();
    let contained = |a: &GradedSubsetMask, b: &GradedSubsetMask, k: usize| {
        (0..a.n_cells()).all(|c| {
            let co = a.cell_coords(c);
            if co.iter().zip(&a.axes).any(|(&i, ax)| i + k >= ax.len()) {
                return true;
            }
            let up: Vec<usize> = co.iter().map(|&i| i + k).collect();
            subset(a.cell(c), b.cell(b.cell_index(&up)))
        })
    };
    for k in 0..min_len {
        if contained(m1, m2, k) && contained(m2, m1, k) {
            return Ok(ShiftReport {
                shift: k as f64 * h,
                steps: Some(k),
                step: h,
                half_step: 0.5 * h,
            });
        }
    }
    Ok(ShiftReport {
        shift: f64::INFINITY,
        steps: None,
        step: h,
        half_step: 0.5 * h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = ParamGrid::parse("r", "0:1:0.1").unwrap();
        assert_eq!(g.len(), 11);
        assert!(g.index_of(0.8).is_some());
        assert_eq!(g.step(), Some(0.1));
        let g = ParamGrid::parse("s", "0.1,inf").unwrap();
        assert_eq!(g.values(), &[0.1, f64::INFINITY]);
        let g = ParamGrid::parse("s", "0:0.2:0.1,inf").unwrap();
        assert_eq!(g.len(), 4);
        assert!(ParamGrid::parse("s", "1:0:0.1").is_err());
        assert!(ParamGrid::parse("s", "0.3,0.1").is_err());
    }

    #[test]
    fn shift_of_shifted_mask() {
        let r = ParamGrid::range("r", 0.0, 0.4, 0.1).unwrap();
        let s = ParamGrid::range("s", 0.0, 0.4, 0.1).unwrap();
        // one point entering at r index 1 in the first mask, 2 in the second
        let mk = |at: usize| {
            let bits = (0..25).map(|c| c / 5 >= at).collect();
            GradedSubsetMask::new(vec![r.clone(), s.clone()], 1, bits)
        };
        let a = mk(1);
        let b = mk(2);
        assert!(a.is_monotone());
        assert_eq!(inclusion_interleaving_shift(&a, &a).unwrap().steps, Some(0));
        assert_eq!(inclusion_interleaving_shift(&a, &b).unwrap().steps, Some(1));
    }
}
