//! Field Gromov-Prokhorov distance.
//!
//! At level `eps` the best an eps-coupling can do is the heaviest clique of
//! the pair-compatibility graph, of mass `M(eps)`. The distance is
//! `min(1, inf_eps max(eps, 1 - M(eps)))`; since `M` is a step function that
//! only jumps at the critical levels the infimum is attained on them or at a
//! crossing `1 - M(c_k)` just before a jump.

use super::infinite::{clique_plan, greedy_best, Supports};
use super::{expand, GwOptions};
use crate::compat::{BitSet, MassCliques};
use crate::transport::max_mass_on;
use crate::{Coupling, MMField, Relation, Result, Status};

#[derive(Clone, Debug)]
pub struct GPResult {
    pub value: f64,
    /// Coupling whose clique part realizes the value.
    pub coupling: Coupling,
    /// Pairs of the clique (absent when the value is the cap 1).
    pub relation: Option<Relation>,
    pub status: Status,
    pub lower: f64,
    pub upper: f64,
    /// Mass resolution of the level search; 0 for the exact crossing.
    pub resolution: f64,
}

enum Mass {
    Exact,
    Relaxed,
    Greedy,
}

struct Levels<'a> {
    s: &'a Supports,
    cands: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
    budget: u64,
}

impl Levels<'_> {
    /// Clique mass at level `k`; `None` when the budget ran out.
    fn mass(&mut self, k: usize, how: &Mass) -> Option<(BitSet, f64)> {
        let g = self.s.graph(self.cands[k]);
        match how {
            Mass::Exact => {
                let mut mc = MassCliques::new(&g, &self.a, &self.b, self.budget);
                let out = mc.max_mass();
                self.budget = mc.nodes_left;
                out.ok()
            }
            Mass::Relaxed => {
                let mut allowed = vec![false; self.a.len() * self.b.len()];
                for &(i, j) in &g.nodes {
                    allowed[i * self.b.len() + j] = true;
                }
                let m = max_mass_on(&self.a, &self.b, &allowed).ok()?;
                Some((BitSet::full(g.len()), m))
            }
            Mass::Greedy => Some(greedy_best(&g, &self.a, &self.b)),
        }
    }

    /// Smallest `k` with `c_k >= 1 - M(c_k)` and the masses either side.
    fn crossing(&mut self, how: &Mass) -> Option<(usize, Option<(BitSet, f64)>, (BitSet, f64))> {
        let (mut lo, mut hi) = (0usize, self.cands.len() - 1);
        let mut at_hi = self.mass(hi, how)?;
        let mut below: Option<(usize, (BitSet, f64))> = None;
        while lo < hi {
            let mid = (lo + hi) / 2;
            let r = self.mass(mid, how)?;
            if self.cands[mid] >= 1.0 - r.1 {
                hi = mid;
                at_hi = r;
            } else {
                below = Some((mid, r));
                lo = mid + 1;
            }
        }
        let prev = if lo == 0 {
            None
        } else {
            match below {
                Some((k, r)) if k == lo - 1 => Some(r),
                _ => Some(self.mass(lo - 1, how)?),
            }
        };
        Some((lo, prev, at_hi))
    }
}

/// `min(c_k, max(c_{k-1}, 1 - M(c_{k-1})))`, and whether the previous level
/// achieves it.
fn evaluate(cands: &[f64], k: usize, prev: &Option<(BitSet, f64)>) -> (f64, bool) {
    let here = cands[k];
    match prev {
        Some(p) if (1.0 - p.1).max(cands[k - 1]) < here => ((1.0 - p.1).max(cands[k - 1]), true),
        _ => (here, false),
    }
}

pub fn gp_distance(x: &MMField, y: &MMField, opts: &GwOptions) -> Result<GPResult> {
    x.base().same_space(y.base())?;
    let s = Supports::new(x, y)?;
    let mut lv = Levels {
        s: &s,
        cands: s.levels(),
        a: s.x.weights().to_vec(),
        b: s.y.weights().to_vec(),
        budget: opts.budget,
    };
    let finish = |lv: &Levels, value: f64, set: &BitSet, k: usize| -> (Coupling, Option<Relation>) {
        let g = s.graph(lv.cands[k]);
        let plan = clique_plan(&g, set, &lv.a, &lv.b);
        let coupling = expand(x.n(), y.n(), &s.xs, &s.ys, &plan);
        let pairs: Vec<(usize, usize)> = set.iter().map(|u| g.nodes[u]).map(|(i, j)| (s.xs[i], s.ys[j])).collect();
        let relation = if value >= 1.0 { None } else { Relation::new(x.n(), y.n(), pairs).ok() };
        (coupling, relation)
    };

    let gate = opts.inf_size_gate;
    if s.x.n() <= gate && s.y.n() <= gate {
        if let Some((k, prev, at)) = lv.crossing(&Mass::Exact) {
            let (v, use_prev) = evaluate(&lv.cands, k, &prev);
            let value = v.min(1.0);
            let (set, kk) = if use_prev { (&prev.as_ref().unwrap().0, k - 1) } else { (&at.0, k) };
            let (coupling, relation) = finish(&lv, value, set, kk);
            return Ok(GPResult {
                value,
                coupling,
                relation,
                status: Status::Exact,
                lower: value,
                upper: value,
                resolution: 0.0,
            });
        }
    }

    lv.budget = u64::MAX;
    let (k, prev, _) = lv.crossing(&Mass::Relaxed).expect("relaxation has no budget");
    let lower = evaluate(&lv.cands, k, &prev).0.min(1.0);
    let (k, prev, at) = lv.crossing(&Mass::Greedy).expect("greedy has no budget");
    let (v, use_prev) = evaluate(&lv.cands, k, &prev);
    let upper = v.min(1.0);
    let (set, kk) = if use_prev { (&prev.as_ref().unwrap().0, k - 1) } else { (&at.0, k) };
    let (coupling, relation) = finish(&lv, upper, set, kk);
    Ok(GPResult {
        value: upper,
        coupling,
        relation,
        status: Status::BoundsOnly,
        lower: lower.min(upper),
        upper,
        resolution: 0.0,
    })
}
