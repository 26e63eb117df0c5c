//! `p = inf` Gromov-Wasserstein: the least level at which a clique of the
//! pair-compatibility graph carries a full coupling.

use super::finite::profile_costs;
use super::{expand, gw_objective, Exponent, GWResult, GwOptions};
use crate::compat::{greedy_clique, BitSet, MassCliques, PairGraph, Search};
use crate::gh::critical_levels;
use crate::transport::{complete_partial, wasserstein_inf};
use crate::{MMField, Matrix, Result, Status};

/// Support size per side above which `p = inf` only reports bounds.
pub const DEFAULT_GW_INF_SIZE_GATE: usize = 6;

/// Mass a clique must carry to count as a full coupling.
const FULL: f64 = 1.0 - 1e-10;

/// Greedy starts tried per level when bounding from above.
const GREEDY_STARTS: usize = 64;

pub(crate) struct Supports {
    pub x: MMField,
    pub y: MMField,
    pub xs: Vec<usize>,
    pub ys: Vec<usize>,
}

impl Supports {
    pub fn new(x: &MMField, y: &MMField) -> Result<Self> {
        let (xf, xs) = x.restrict_to_support()?;
        let (yf, ys) = y.restrict_to_support()?;
        Ok(Supports { x: xf, y: yf, xs, ys })
    }

    pub fn graph(&self, eps: f64) -> PairGraph {
        let xs: Vec<usize> = (0..self.x.n()).collect();
        let ys: Vec<usize> = (0..self.y.n()).collect();
        PairGraph::build(self.x.base(), self.y.base(), &xs, &ys, eps)
    }

    pub fn levels(&self) -> Vec<f64> {
        let xs: Vec<usize> = (0..self.x.n()).collect();
        let ys: Vec<usize> = (0..self.y.n()).collect();
        critical_levels(self.x.base(), self.y.base(), &xs, &ys)
    }
}

/// Coupling carried by a clique, completed to exact marginals.
pub(crate) fn clique_plan(g: &PairGraph, set: &BitSet, a: &[f64], b: &[f64]) -> Vec<f64> {
    let (_, plan) = g.mass_with_plan(set, a, b);
    complete_partial(a, b, plan)
}

/// Heaviest clique among greedy growths from the lowest-`d_B` nodes.
pub(crate) fn greedy_best(g: &PairGraph, a: &[f64], b: &[f64]) -> (BitSet, f64) {
    let mut best = (BitSet::new(g.len()), 0.0);
    let step = (g.len() / GREEDY_STARTS).max(1);
    for s in (0..g.len()).step_by(step) {
        let c = greedy_clique(g, s);
        let mass = g.mass(&c, a, b);
        if mass > best.1 {
            best = (c, mass);
        }
    }
    best
}

pub(crate) fn solve(x: &MMField, y: &MMField, opts: &GwOptions) -> Result<GWResult> {
    let s = Supports::new(x, y)?;
    let (a, b) = (s.x.weights().to_vec(), s.y.weights().to_vec());
    let cands = s.levels();
    let gate = opts.inf_size_gate;
    let mut infeasible_below: Option<usize> = None;
    if s.x.n() <= gate && s.y.n() <= gate {
        let mut left = opts.budget;
        let (mut lo, mut hi) = (0usize, cands.len() - 1);
        let mut witness: Option<(usize, BitSet)> = None;
        let mut exhausted = false;
        while lo < hi {
            let mid = (lo + hi) / 2;
            let g = s.graph(cands[mid]);
            let mut mc = MassCliques::new(&g, &a, &b, left);
            let out = mc.find_at_least(FULL);
            left = mc.nodes_left;
            match out {
                Search::Found((set, _)) => {
                    hi = mid;
                    witness = Some((mid, set));
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
            let level = lo;
            let g = s.graph(cands[level]);
            let set = match witness {
                Some((k, set)) if k == level => set,
                // the top level admits every pair
                _ => BitSet::full(g.len()),
            };
            let plan = clique_plan(&g, &set, &a, &b);
            let v = cands[level];
            let coupling = expand(x.n(), y.n(), &s.xs, &s.ys, &plan);
            let relax = relaxation_lower(&s)?;
            return Ok(GWResult {
                value: v,
                coupling,
                status: Status::Exact,
                lower: v,
                upper: v,
                relaxation_lower: relax,
                p: Exponent::Infinite,
            });
        }
    }
    bounds(x, y, &s, &cands, infeasible_below)
}

/// `max(TLB_inf / 2, W_inf(d_B))`.
fn relaxation_lower(s: &Supports) -> Result<f64> {
    let (a, b) = (s.x.weights(), s.y.weights());
    let c = profile_costs(&s.x, &s.y, Exponent::Infinite);
    let tlb = wasserstein_inf(a, b, &c, 1e-9)?.value;
    let (bx, by) = (s.x.base(), s.y.base());
    let db = Matrix::from_fn(s.x.n(), s.y.n(), |i, j| bx.bdist(i, by, j));
    let wd = wasserstein_inf(a, b, &db, 1e-9)?.value;
    Ok((0.5 * tlb).max(wd))
}

fn bounds(x: &MMField, y: &MMField, s: &Supports, cands: &[f64], infeasible_below: Option<usize>) -> Result<GWResult> {
    let (a, b) = (s.x.weights().to_vec(), s.y.weights().to_vec());
    let relax = relaxation_lower(s)?;
    let mut lower = relax;
    if let Some(k) = infeasible_below {
        lower = lower.max(cands[k + 1]);
    }
    // greedy feasibility is not monotone in the level, but any success is a
    // valid witness
    let start = cands.partition_point(|&c| c < lower - 1e-12);
    let (mut lo, mut hi) = (start.min(cands.len() - 1), cands.len() - 1);
    let top = s.graph(cands[hi]);
    let mut best_plan = clique_plan(&top, &BitSet::full(top.len()), &a, &b);
    while lo < hi {
        let mid = (lo + hi) / 2;
        let g = s.graph(cands[mid]);
        let (set, mass) = greedy_best(&g, &a, &b);
        if mass >= FULL {
            hi = mid;
            best_plan = clique_plan(&g, &set, &a, &b);
        } else {
            lo = mid + 1;
        }
    }
    let mut coupling = expand(x.n(), y.n(), &s.xs, &s.ys, &best_plan);
    let mut upper = gw_objective(x, y, &coupling, Exponent::Infinite, 1e-6)?.value;
    let (bx, by) = (s.x.base(), s.y.base());
    let db = Matrix::from_fn(s.x.n(), s.y.n(), |i, j| bx.bdist(i, by, j));
    let alt = wasserstein_inf(&a, &b, &db, 1e-9)?.coupling;
    let alt = expand(x.n(), y.n(), &s.xs, &s.ys, alt.matrix().as_slice());
    let v = gw_objective(x, y, &alt, Exponent::Infinite, 1e-6)?.value;
    if v < upper {
        upper = v;
        coupling = alt;
    }
    Ok(GWResult {
        value: upper,
        coupling,
        status: Status::BoundsOnly,
        lower: lower.min(upper),
        upper,
        relaxation_lower: relax,
        p: Exponent::Infinite,
    })
}
