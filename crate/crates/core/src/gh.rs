//! Field Gromov-Hausdorff distance: half the least distortion of a
//! correspondence.

use crate::compat::{BitSet, PairGraph, Search, LEVEL_SLACK};
use crate::field::distortion_pairs;
use crate::{value_hausdorff, MetricField, Relation, Result, Status};

/// Search-node budget of [`gh_distance`] when none is given.
pub const DEFAULT_GH_BUDGET: u64 = 20_000_000;

#[derive(Clone, Debug)]
pub struct GHResult {
    /// Exact value, or the upper bound when `status` is `BoundsOnly`.
    pub value: f64,
    pub witness: Option<Relation>,
    pub status: Status,
    pub lower: f64,
    pub upper: f64,
}

struct Cover<'a> {
    g: &'a PairGraph,
    nodes_left: u64,
}

impl Cover<'_> {
    fn search(&mut self, chosen: &mut Vec<usize>, cand: &BitSet, rows: &mut [u32], cols: &mut [u32]) -> Search<()> {
        if self.nodes_left == 0 {
            return Search::Exhausted;
        }
        self.nodes_left -= 1;
        // most constrained uncovered row or column
        let mut best: Option<(usize, &BitSet)> = None;
        for (a, set) in self.g.row_nodes.iter().enumerate() {
            if rows[a] == 0 {
                let c = cand.count_and(set);
                if best.map_or(true, |(k, _)| c < k) {
                    best = Some((c, set));
                }
            }
        }
        for (b, set) in self.g.col_nodes.iter().enumerate() {
            if cols[b] == 0 {
                let c = cand.count_and(set);
                if best.map_or(true, |(k, _)| c < k) {
                    best = Some((c, set));
                }
            }
        }
        let Some((count, set)) = best else {
            return Search::Found(());
        };
        if count == 0 {
            return Search::NotFound;
        }
        let branch = cand.and(set);
        for v in branch.iter() {
            let (a, b) = self.g.nodes[v];
            chosen.push(v);
            rows[a] += 1;
            cols[b] += 1;
            let next = cand.and(&self.g.adj[v]);
            match self.search(chosen, &next, rows, cols) {
                Search::NotFound => {}
                other => return other,
            }
            chosen.pop();
            rows[a] -= 1;
            cols[b] -= 1;
        }
        Search::NotFound
    }
}

fn decide(x: &MetricField, y: &MetricField, eps: f64, budget: &mut u64) -> Search<Relation> {
    let xs: Vec<usize> = (0..x.n()).collect();
    let ys: Vec<usize> = (0..y.n()).collect();
    let g = PairGraph::build(x, y, &xs, &ys, eps);
    let mut cover = Cover {
        g: &g,
        nodes_left: *budget,
    };
    let mut chosen = Vec::new();
    let mut rows = vec![0u32; x.n()];
    let mut cols = vec![0u32; y.n()];
    let out = cover.search(&mut chosen, &BitSet::full(g.len()), &mut rows, &mut cols);
    *budget = cover.nodes_left;
    match out {
        Search::Found(()) => {
            let pairs = chosen.iter().map(|&v| g.nodes[v]).collect();
            Search::Found(Relation::new(x.n(), y.n(), pairs).expect("nonempty cover"))
        }
        Search::NotFound => Search::NotFound,
        Search::Exhausted => Search::Exhausted,
    }
}

/// A correspondence of distortion at most `2 eps`, if one exists.
pub fn gh_feasible(x: &MetricField, y: &MetricField, eps: f64) -> Result<Option<Relation>> {
    x.same_space(y)?;
    let mut budget = u64::MAX;
    Ok(match decide(x, y, eps, &mut budget) {
        Search::Found(r) => Some(r),
        _ => None,
    })
}

/// Sorted critical levels: 0, half distance gaps and value distances,
/// deduplicated with tolerance `1e-12`.
pub(crate) fn critical_levels(x: &MetricField, y: &MetricField, xs: &[usize], ys: &[usize]) -> Vec<f64> {
    let mut c = vec![0.0];
    let xd: Vec<f64> = pairs_dist(x, xs);
    let mut yd: Vec<f64> = pairs_dist(y, ys);
    yd.sort_by(f64::total_cmp);
    yd.dedup();
    let mut xd = xd;
    xd.sort_by(f64::total_cmp);
    xd.dedup();
    for &a in &xd {
        for &b in &yd {
            c.push(0.5 * (a - b).abs());
        }
    }
    for &i in xs {
        for &j in ys {
            c.push(x.bdist(i, y, j));
        }
    }
    dedupe(c)
}

fn pairs_dist(x: &MetricField, xs: &[usize]) -> Vec<f64> {
    let mut v = Vec::with_capacity(xs.len() * xs.len() / 2 + 1);
    v.push(0.0);
    for (k, &i) in xs.iter().enumerate() {
        for &j in &xs[k + 1..] {
            v.push(x.dist(i, j));
        }
    }
    v
}

pub(crate) fn dedupe(mut c: Vec<f64>) -> Vec<f64> {
    c.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(c.len());
    for v in c {
        if out.last().map_or(true, |&l| v > l + LEVEL_SLACK) {
            out.push(v);
        }
    }
    out
}

/// `max(|diam X - diam Y| / 2, d_H of the value images)`.
pub fn gh_lower_bound(x: &MetricField, y: &MetricField) -> f64 {
    let a: Vec<_> = x.values().iter().collect();
    let b: Vec<_> = y.values().iter().collect();
    (0.5 * (x.diameter() - y.diameter()).abs()).max(value_hausdorff(x.space(), &a, &b))
}

/// Greedy value matching in both directions, then local improvement by
/// dropping redundant pairs and reassigning partners.
pub fn heuristic_correspondence(x: &MetricField, y: &MetricField) -> Relation {
    let (n, m) = (x.n(), y.n());
    let mut pairs = Vec::new();
    for i in 0..n {
        let j = (0..m).min_by(|&a, &b| x.bdist(i, y, a).total_cmp(&x.bdist(i, y, b))).unwrap();
        pairs.push((i, j));
    }
    for j in 0..m {
        let i = (0..n).min_by(|&a, &b| x.bdist(a, y, j).total_cmp(&x.bdist(b, y, j))).unwrap();
        pairs.push((i, j));
    }
    pairs.sort_unstable();
    pairs.dedup();
    let is_corr = |p: &[(usize, usize)]| {
        let mut r = vec![false; n];
        let mut c = vec![false; m];
        for &(i, j) in p {
            r[i] = true;
            c[j] = true;
        }
        r.into_iter().all(|v| v) && c.into_iter().all(|v| v)
    };
    let mut cur = distortion_pairs(x, y, &pairs);
    for _round in 0..20 {
        let mut improved = false;
        let mut k = 0;
        while k < pairs.len() {
            let mut trial = pairs.clone();
            trial.remove(k);
            if is_corr(&trial) {
                let d = distortion_pairs(x, y, &trial);
                if d < cur {
                    pairs = trial;
                    cur = d;
                    improved = true;
                    continue;
                }
            }
            k += 1;
        }
        let mut k = 0;
        while k < pairs.len() {
            let (i, _) = pairs[k];
            for j in 0..m {
                let mut trial = pairs.clone();
                trial[k] = (i, j);
                trial.sort_unstable();
                trial.dedup();
                if is_corr(&trial) {
                    let d = distortion_pairs(x, y, &trial);
                    if d < cur {
                        pairs = trial;
                        cur = d;
                        improved = true;
                        break;
                    }
                }
            }
            k += 1;
        }
        if !improved {
            break;
        }
    }
    Relation::new(n, m, pairs).expect("nonempty")
}

/// Exact distance by binary search over critical levels when the search
/// finishes within `budget` nodes; bounds otherwise.
pub fn gh_distance(x: &MetricField, y: &MetricField, budget: u64) -> Result<GHResult> {
    x.same_space(y)?;
    let xs: Vec<usize> = (0..x.n()).collect();
    let ys: Vec<usize> = (0..y.n()).collect();
    let cands = critical_levels(x, y, &xs, &ys);
    let mut left = budget;
    let (mut lo, mut hi) = (0usize, cands.len() - 1);
    let mut witness: Option<Relation> = None;
    let mut exhausted = false;
    // largest level known infeasible / smallest known feasible
    let mut infeasible_below = None;
    while lo < hi {
        let mid = (lo + hi) / 2;
        match decide(x, y, cands[mid], &mut left) {
            Search::Found(r) => {
                hi = mid;
                witness = Some(r);
            }
            Search::NotFound => {
                lo = mid + 1;
                infeasible_below = Some(mid);
            }
            Search::Exhausted => {
                exhausted = true;
                break;
            }
        }
    }
    if !exhausted {
        let r = match witness.clone() {
            Some(r) if lo == hi && distortion_pairs(x, y, r.pairs()) <= 2.0 * cands[lo] + 2.0 * LEVEL_SLACK => r,
            _ => match decide(x, y, cands[lo], &mut left) {
                Search::Found(r) => r,
                Search::NotFound => unreachable!("top level is always feasible"),
                Search::Exhausted => {
                    exhausted = true;
                    Relation::identity(0)
                }
            },
        };
        if !exhausted {
            let v = cands[lo];
            return Ok(GHResult {
                value: v,
                witness: Some(r),
                status: Status::Exact,
                lower: v,
                upper: v,
            });
        }
    }
    let heur = heuristic_correspondence(x, y);
    let mut upper = 0.5 * distortion_pairs(x, y, heur.pairs());
    let mut best = heur;
    if let Some(w) = witness {
        let u = 0.5 * distortion_pairs(x, y, w.pairs());
        if u < upper {
            upper = u;
            best = w;
        }
    }
    let mut lower = gh_lower_bound(x, y);
    if let Some(k) = infeasible_below {
        lower = lower.max(cands[k + 1]);
    }
    Ok(GHResult {
        value: upper,
        witness: Some(best),
        status: Status::BoundsOnly,
        lower: lower.min(upper),
        upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{BPoint, Matrix, TargetSpace};
    use std::sync::Arc;

    fn field(ds: &[f64], vals: &[f64]) -> MetricField {
        MetricField::new(
            Matrix::from_lower_triangle(vals.len(), ds).unwrap(),
            vals.iter().map(|&v| BPoint::Coords(vec![v])).collect(),
            Arc::new(TargetSpace::euclidean(1)),
        )
        .unwrap()
    }

    #[test]
    fn singletons() {
        let a = field(&[], &[0.0]);
        let b = field(&[], &[0.3]);
        assert!(gh_feasible(&a, &b, 0.29).unwrap().is_none());
        assert_eq!(gh_feasible(&a, &b, 0.3).unwrap().unwrap().pairs(), &[(0, 0)]);
        let r = gh_distance(&a, &b, DEFAULT_GH_BUDGET).unwrap();
        assert_eq!(r.value, 0.3);
        assert_eq!(r.status, Status::Exact);
    }

    #[test]
    fn two_point_pair() {
        let x = field(&[1.0], &[0.0, 0.0]);
        let y = field(&[2.0], &[0.0, 0.0]);
        let r = gh_distance(&x, &y, DEFAULT_GH_BUDGET).unwrap();
        assert_eq!(r.value, 0.5);
        let id = gh_distance(&x, &x, DEFAULT_GH_BUDGET).unwrap();
        assert_eq!(id.value, 0.0);
        assert_eq!(id.witness.unwrap(), Relation::identity(2));
    }

    #[test]
    fn zero_budget_gives_bounds() {
        let x = field(&[1.0, 2.0, 1.5], &[0.0, 0.2, 0.4]);
        let y = field(&[1.2, 2.5, 1.0], &[0.1, 0.0, 0.3]);
        let exact = gh_distance(&x, &y, DEFAULT_GH_BUDGET).unwrap();
        let b = gh_distance(&x, &y, 0).unwrap();
        assert_eq!(b.status, Status::BoundsOnly);
        assert!(b.lower <= exact.value + 1e-12 && exact.value <= b.upper + 1e-12);
    }
}
