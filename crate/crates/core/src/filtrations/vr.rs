//! Vietoris-Rips bi- and trifiltrations of finite fields.

use std::collections::HashMap;

use serde_json::{json, Value};

use super::{num_json, radius_in_b};
use crate::{BPoint, Error, MMField, MetricField, Result};

/// Default bound on admissible subset size for the trifiltration.
pub const DEFAULT_SUBSET_CAP: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    /// Sorted vertex set.
    Simplex(Vec<usize>),
    /// Strictly increasing chain of sorted vertex sets.
    Chain(Vec<Vec<usize>>),
}

impl Cell {
    /// Codimension-one faces.
    pub fn faces(&self) -> Vec<Cell> {
        fn drop_each<T: Clone>(v: &[T]) -> Vec<Vec<T>> {
            if v.len() < 2 {
                return Vec::new();
            }
            (0..v.len())
                .map(|k| v.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, x)| x.clone()).collect())
                .collect()
        }
        match self {
            Cell::Simplex(v) => drop_each(v).into_iter().map(Cell::Simplex).collect(),
            Cell::Chain(c) => drop_each(c).into_iter().map(Cell::Chain).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Cell::Simplex(v) => v.len() - 1,
            Cell::Chain(c) => c.len() - 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradedSimplex {
    pub cell: Cell,
    /// Minimal appearance grade.
    pub grade: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct GradedComplex {
    pub axes: Vec<&'static str>,
    pub n_vertices: usize,
    pub simplices: Vec<GradedSimplex>,
    /// A size cap cut the enumeration short.
    pub truncated: bool,
}

fn le_all(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

impl GradedComplex {
    /// Cells present at `grade`.
    pub fn at(&self, grade: &[f64]) -> Vec<&Cell> {
        self.simplices.iter().filter(|s| le_all(&s.grade, grade)).map(|s| &s.cell).collect()
    }

    pub fn grade_of(&self, cell: &Cell) -> Option<&[f64]> {
        self.simplices.iter().find(|s| &s.cell == cell).map(|s| s.grade.as_slice())
    }

    /// Every face of every cell is present with a grade no larger.
    pub fn is_downward_closed(&self) -> bool {
        let index: HashMap<&Cell, &[f64]> = self.simplices.iter().map(|s| (&s.cell, s.grade.as_slice())).collect();
        index.len() == self.simplices.len()
            && self.simplices.iter().all(|s| {
                s.cell
                    .faces()
                    .iter()
                    .all(|f| index.get(f).is_some_and(|g| le_all(g, &s.grade)))
            })
    }

    pub fn to_json(&self) -> Value {
        let cells: Vec<Value> = self
            .simplices
            .iter()
            .map(|s| {
                let grade: Vec<Value> = s.grade.iter().map(|&v| num_json(v)).collect();
                match &s.cell {
                    Cell::Simplex(v) => json!({"vertices": v, "grade": grade}),
                    Cell::Chain(c) => json!({"chain": c, "grade": grade}),
                }
            })
            .collect();
        json!({
            "axes": self.axes,
            "n_vertices": self.n_vertices,
            "truncated": self.truncated,
            "simplices": cells,
        })
    }
}

/// `(diam(A), 2 rad(f(A)))`.
pub fn simplex_grade(x: &MetricField, verts: &[usize]) -> Result<(f64, f64)> {
    if verts.is_empty() {
        return Err(Error::Empty("vertex set"));
    }
    let mut diam: f64 = 0.0;
    for (k, &u) in verts.iter().enumerate() {
        if u >= x.n() {
            return Err(Error::IndexOutOfRange { index: u, len: x.n() });
        }
        for &v in &verts[k + 1..] {
            diam = diam.max(x.dist(u, v));
        }
    }
    let vals: Vec<&BPoint> = verts.iter().map(|&v| x.value(v)).collect();
    let rad = radius_in_b(x.space(), &vals)?;
    Ok((diam, 2.0 * rad))
}

/// Vertex sets of at most `max_size` points with `diam <= r_max` and
/// `2 rad <= s_max`, in lexicographic order, each with its grade. The flag
/// reports whether some set of size `max_size` extends further.
fn admissible_sets(
    x: &MetricField,
    max_size: usize,
    r_max: f64,
    s_max: f64,
) -> Result<(Vec<(Vec<usize>, (f64, f64))>, bool)> {
    let n = x.n();
    let mut out = Vec::new();
    let mut capped = false;
    let mut stack: Vec<(Vec<usize>, f64)> = (0..n).rev().map(|v| (vec![v], 0.0)).collect();
    while let Some((set, diam)) = stack.pop() {
        let (_, s) = if set.len() == 1 { (0.0, 0.0) } else { simplex_grade(x, &set)? };
        if s > s_max {
            continue;
        }
        out.push((set.clone(), (diam, s)));
        let last = *set.last().unwrap();
        let mut next = Vec::new();
        for v in last + 1..n {
            let d = set.iter().map(|&u| x.dist(u, v)).fold(diam, f64::max);
            if d <= r_max {
                next.push((v, d));
            }
        }
        if set.len() == max_size {
            if !next.is_empty() {
                // only a real extension counts
                for &(v, _) in &next {
                    let mut s2 = set.clone();
                    s2.push(v);
                    if simplex_grade(x, &s2)?.1 <= s_max {
                        capped = true;
                        break;
                    }
                }
            }
            continue;
        }
        for (v, d) in next.into_iter().rev() {
            let mut s2 = set.clone();
            s2.push(v);
            stack.push((s2, d));
        }
    }
    Ok((close_grades(out), capped))
}

/// Raise each grade to the maximum over its faces and drop sets that lost a
/// face, so enclosing-ball roundoff cannot break downward closure.
fn close_grades(sets: Vec<(Vec<usize>, (f64, f64))>) -> Vec<(Vec<usize>, (f64, f64))> {
    let mut by_size: Vec<usize> = (0..sets.len()).collect();
    by_size.sort_by_key(|&k| sets[k].0.len());
    let mut kept: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut keep = vec![false; sets.len()];
    let mut s_new: Vec<f64> = sets.iter().map(|e| e.1 .1).collect();
    for k in by_size {
        let verts = &sets[k].0;
        let mut ok = true;
        if verts.len() > 1 {
            for drop in 0..verts.len() {
                let face: Vec<usize> = verts.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, &v)| v).collect();
                match kept.get(&face) {
                    Some(&fs) => s_new[k] = s_new[k].max(fs),
                    None => ok = false,
                }
            }
        }
        if ok {
            keep[k] = true;
            kept.insert(verts.clone(), s_new[k]);
        }
    }
    sets.into_iter()
        .enumerate()
        .filter(|(k, _)| keep[*k])
        .map(|(k, (v, (d, _)))| (v, (d, s_new[k])))
        .collect()
}

/// Simplices up to dimension `dim_cap` whose grade `(diam, 2 rad)` lies in
/// `[0, r_max] x [0, s_max]`.
pub fn vr_bifiltration(x: &MetricField, dim_cap: usize, r_max: f64, s_max: f64) -> Result<GradedComplex> {
    let (sets, _) = admissible_sets(x, dim_cap + 1, r_max, s_max)?;
    let simplices = sets
        .into_iter()
        .map(|(v, (d, s))| GradedSimplex {
            cell: Cell::Simplex(v),
            grade: vec![d, s],
        })
        .collect();
    Ok(GradedComplex {
        axes: vec!["r", "s"],
        n_vertices: x.n(),
        simplices,
        truncated: false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriCaps {
    pub r_max: f64,
    pub s_max: f64,
    pub t_max: f64,
    pub subset_cap: usize,
}

impl Default for TriCaps {
    fn default() -> Self {
        TriCaps {
            r_max: f64::INFINITY,
            s_max: f64::INFINITY,
            t_max: 1.0,
            subset_cap: DEFAULT_SUBSET_CAP,
        }
    }
}

/// Chains `A_0 < ... < A_k` (`k <= dim_cap`) of admissible subsets, graded
/// by `(diam(A_k), 2 rad(A_k), 1 - mu(A_0))`. Admissible subsets have at
/// most `subset_cap` points and grade inside the caps.
pub fn vr_trifiltration(x: &MMField, dim_cap: usize, caps: &TriCaps) -> Result<GradedComplex> {
    let n = x.n();
    if n > 64 {
        return Err(Error::InvalidParameter(format!("trifiltration supports at most 64 points, got {n}")));
    }
    let w = x.weights();
    let (sets, mut truncated) = admissible_sets(x.base(), caps.subset_cap.max(1), caps.r_max, caps.s_max)?;
    struct Sub {
        verts: Vec<usize>,
        bits: u64,
        diam: f64,
        s: f64,
        t: f64,
    }
    let mut subs: Vec<Sub> = sets
        .into_iter()
        .map(|(verts, (diam, s))| {
            let mass: f64 = verts.iter().map(|&v| w[v]).sum();
            let bits = verts.iter().fold(0u64, |b, &v| b | 1 << v);
            Sub {
                verts,
                bits,
                diam,
                s,
                t: (1.0 - mass).max(0.0),
            }
        })
        .filter(|s| s.t <= caps.t_max)
        .collect();
    subs.sort_by(|a, b| a.verts.len().cmp(&b.verts.len()).then_with(|| a.verts.cmp(&b.verts)));
    // strict supersets of each subset, in order
    let ups: Vec<Vec<usize>> = subs
        .iter()
        .map(|a| {
            (0..subs.len())
                .filter(|&j| subs[j].bits != a.bits && subs[j].bits & a.bits == a.bits)
                .collect()
        })
        .collect();
    let mut simplices = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..subs.len()).rev().map(|i| vec![i]).collect();
    while let Some(chain) = stack.pop() {
        let top = &subs[*chain.last().unwrap()];
        let bottom = &subs[chain[0]];
        simplices.push(GradedSimplex {
            cell: Cell::Chain(chain.iter().map(|&i| subs[i].verts.clone()).collect()),
            grade: vec![top.diam, top.s, bottom.t],
        });
        let next = &ups[*chain.last().unwrap()];
        if chain.len() == dim_cap + 1 {
            truncated |= !next.is_empty();
            continue;
        }
        for &j in next.iter().rev() {
            let mut c = chain.clone();
            c.push(j);
            stack.push(c);
        }
    }
    Ok(GradedComplex {
        axes: vec!["r", "s", "t"],
        n_vertices: n,
        simplices,
        truncated,
    })
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct InclusionReport {
    pub checked: usize,
    /// Simplices of the first complex whose grade in the second exceeds the
    /// shifted grade.
    pub violations: Vec<Vec<usize>>,
    pub holds: bool,
}

/// Slack on grade comparisons absorbing enclosing-ball roundoff.
pub const GRADE_SLACK: f64 = 1e-12;

/// For two fields on the same vertex set, checks that every simplex of the
/// first (within the window) is present in the second at its grade shifted
/// by `shift` on both axes.
pub fn vr_identity_inclusion(
    x: &MetricField,
    y: &MetricField,
    shift: f64,
    dim_cap: usize,
    r_max: f64,
    s_max: f64,
) -> Result<InclusionReport> {
    if x.n() != y.n() {
        return Err(Error::Shape(format!("vertex sets differ: {} vs {}", x.n(), y.n())));
    }
    x.same_space(y)?;
    let cx = vr_bifiltration(x, dim_cap, r_max, s_max)?;
    let mut violations = Vec::new();
    for s in &cx.simplices {
        let Cell::Simplex(v) = &s.cell else { unreachable!() };
        let (d, r) = simplex_grade(y, v)?;
        if d > s.grade[0] + shift + GRADE_SLACK || r > s.grade[1] + shift + GRADE_SLACK {
            violations.push(v.clone());
        }
    }
    Ok(InclusionReport {
        checked: cx.simplices.len(),
        holds: violations.is_empty(),
        violations,
    })
}
