//! Pair-compatibility graphs and the clique searches behind the
//! Gromov-Hausdorff, Gromov-Prokhorov and `p = inf` Gromov-Wasserstein
//! solvers.
//!
//! At level `eps` a pair `(x, y)` is admissible when `d_B(x, y) <= eps`, and
//! two pairs are compatible when `|d_X(x, x') - d_Y(y, y')| <= 2 eps`. A
//! relation has distortion `<= 2 eps` iff it is a clique of admissible pairs.

use crate::transport::bipartite_max_flow;
use crate::MetricField;

/// Slack for comparisons against candidate levels.
pub const LEVEL_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(n: usize) -> Self {
        BitSet {
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut b = BitSet::new(n);
        for i in 0..n {
            b.insert(i);
        }
        b
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn and(&self, o: &BitSet) -> BitSet {
        BitSet {
            words: self.words.iter().zip(&o.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn and_not(&self, o: &BitSet) -> BitSet {
        BitSet {
            words: self.words.iter().zip(&o.words).map(|(a, b)| a & !b).collect(),
        }
    }

    pub fn or(&self, o: &BitSet) -> BitSet {
        BitSet {
            words: self.words.iter().zip(&o.words).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn count_and(&self, o: &BitSet) -> usize {
        self.words.iter().zip(&o.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + t)
                }
            })
        })
    }
}

/// Admissible pairs at one level and their compatibility edges. Rows and
/// columns index the supplied point lists `xs` and `ys`.
pub struct PairGraph {
    pub n: usize,
    pub m: usize,
    /// `(row, col)` of each node, sorted by ascending `d_B` then
    /// lexicographically.
    pub nodes: Vec<(usize, usize)>,
    pub bdist: Vec<f64>,
    pub adj: Vec<BitSet>,
    pub row_nodes: Vec<BitSet>,
    pub col_nodes: Vec<BitSet>,
}

impl PairGraph {
    pub fn build(x: &MetricField, y: &MetricField, xs: &[usize], ys: &[usize], eps: f64) -> PairGraph {
        let (n, m) = (xs.len(), ys.len());
        let mut nodes = Vec::new();
        for a in 0..n {
            for b in 0..m {
                let db = x.bdist(xs[a], y, ys[b]);
                if db <= eps + LEVEL_SLACK {
                    nodes.push((db, a, b));
                }
            }
        }
        nodes.sort_by(|p, q| p.0.total_cmp(&q.0).then((p.1, p.2).cmp(&(q.1, q.2))));
        let k = nodes.len();
        let mut adj = vec![BitSet::new(k); k];
        let bound = 2.0 * eps + LEVEL_SLACK;
        for u in 0..k {
            let (_, a, b) = nodes[u];
            for v in u + 1..k {
                let (_, c, d) = nodes[v];
                if (x.dist(xs[a], xs[c]) - y.dist(ys[b], ys[d])).abs() <= bound {
                    adj[u].insert(v);
                    adj[v].insert(u);
                }
            }
        }
        let mut row_nodes = vec![BitSet::new(k); n];
        let mut col_nodes = vec![BitSet::new(k); m];
        for (u, &(_, a, b)) in nodes.iter().enumerate() {
            row_nodes[a].insert(u);
            col_nodes[b].insert(u);
        }
        PairGraph {
            n,
            m,
            bdist: nodes.iter().map(|t| t.0).collect(),
            nodes: nodes.into_iter().map(|t| (t.1, t.2)).collect(),
            adj,
            row_nodes,
            col_nodes,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Max-flow mass a coupling of `mu`, `nu` can put on the node set.
    pub fn mass(&self, set: &BitSet, mu: &[f64], nu: &[f64]) -> f64 {
        let mut allowed = vec![false; self.n * self.m];
        for u in set.iter() {
            let (a, b) = self.nodes[u];
            allowed[a * self.m + b] = true;
        }
        bipartite_max_flow(mu, nu, |i, j| allowed[i * self.m + j]).0
    }

    pub fn mass_with_plan(&self, set: &BitSet, mu: &[f64], nu: &[f64]) -> (f64, Vec<f64>) {
        let mut allowed = vec![false; self.n * self.m];
        for u in set.iter() {
            let (a, b) = self.nodes[u];
            allowed[a * self.m + b] = true;
        }
        bipartite_max_flow(mu, nu, |i, j| allowed[i * self.m + j])
    }

    /// Rows and columns touched by a node set.
    fn covers_all(&self, set: &BitSet, mu: &[f64], nu: &[f64]) -> bool {
        let mut rows = vec![false; self.n];
        let mut cols = vec![false; self.m];
        for u in set.iter() {
            let (a, b) = self.nodes[u];
            rows[a] = true;
            cols[b] = true;
        }
        (0..self.n).all(|a| rows[a] || mu[a] <= 0.0) && (0..self.m).all(|b| cols[b] || nu[b] <= 0.0)
    }
}

/// Outcome of a budgeted search.
#[derive(Clone, Debug, PartialEq)]
pub enum Search<T> {
    Found(T),
    NotFound,
    Exhausted,
}

/// Clique search weighted by the max-flow mass of the clique.
pub struct MassCliques<'a> {
    pub g: &'a PairGraph,
    pub mu: &'a [f64],
    pub nu: &'a [f64],
    pub nodes_left: u64,
}

impl<'a> MassCliques<'a> {
    pub fn new(g: &'a PairGraph, mu: &'a [f64], nu: &'a [f64], budget: u64) -> Self {
        MassCliques {
            g,
            mu,
            nu,
            nodes_left: budget,
        }
    }

    /// A clique whose mass is at least `target`.
    pub fn find_at_least(&mut self, target: f64) -> Search<(BitSet, f64)> {
        let k = self.g.len();
        if target <= 0.0 {
            return Search::Found((BitSet::new(k), 0.0));
        }
        let full = BitSet::full(k);
        let mut best = None;
        match self.bk(BitSet::new(k), full, BitSet::new(k), target, true, &mut best) {
            Some(true) => Search::Found(best.unwrap()),
            Some(false) => Search::NotFound,
            None => Search::Exhausted,
        }
    }

    /// Largest clique mass; `Err` carries the best found when the budget ran
    /// out.
    pub fn max_mass(&mut self) -> std::result::Result<(BitSet, f64), (BitSet, f64)> {
        let k = self.g.len();
        let mut best = Some((BitSet::new(k), 0.0));
        match self.bk(BitSet::new(k), BitSet::full(k), BitSet::new(k), f64::INFINITY, false, &mut best) {
            None => Err(best.unwrap()),
            Some(_) => Ok(best.unwrap()),
        }
    }

    /// Bron-Kerbosch with pivoting. In decision mode returns `Some(true)` as
    /// soon as a clique of mass `>= target` is seen; in maximize mode keeps
    /// the heaviest clique in `best`. `None` means the budget ran out.
    fn bk(
        &mut self,
        r: BitSet,
        p: BitSet,
        x: BitSet,
        target: f64,
        decide: bool,
        best: &mut Option<(BitSet, f64)>,
    ) -> Option<bool> {
        if self.nodes_left == 0 {
            return None;
        }
        self.nodes_left -= 1;
        let rp = r.or(&p);
        let bar = if decide {
            target
        } else {
            best.as_ref().map_or(0.0, |b| b.1) + 1e-15
        };
        if decide && target >= 1.0 - 1e-9 && !self.g.covers_all(&rp, self.mu, self.nu) {
            return Some(false);
        }
        let upper = self.g.mass(&rp, self.mu, self.nu);
        if upper < bar - 1e-12 {
            return Some(false);
        }
        if p.is_empty() {
            // r is maximal within the remaining candidates, so its mass is the
            // bound just computed
            if decide {
                if upper >= target - 1e-12 {
                    *best = Some((r, upper));
                    return Some(true);
                }
            } else if best.as_ref().map_or(true, |b| upper > b.1) {
                *best = Some((r, upper));
            }
            return Some(false);
        }
        let px = p.or(&x);
        let pivot = px
            .iter()
            .max_by_key(|&u| (p.count_and(&self.g.adj[u]), std::cmp::Reverse(u)))
            .unwrap();
        let branch = p.and_not(&self.g.adj[pivot]);
        let mut p = p;
        let mut x = x;
        for v in branch.iter() {
            let mut r2 = r.clone();
            r2.insert(v);
            let res = self.bk(r2, p.and(&self.g.adj[v]), x.and(&self.g.adj[v]), target, decide, best);
            match res {
                None => return None,
                Some(true) => return Some(true),
                Some(false) => {}
            }
            p.remove(v);
            x.insert(v);
        }
        Some(false)
    }
}

/// Greedy clique growth by ascending `d_B`; used for upper bounds.
pub fn greedy_clique(g: &PairGraph, start: usize) -> BitSet {
    let mut set = BitSet::new(g.len());
    set.insert(start);
    let mut cand = g.adj[start].clone();
    loop {
        let Some(v) = cand.iter().next() else { break };
        set.insert(v);
        cand = cand.and(&g.adj[v]);
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitset_ops() {
        let mut a = BitSet::new(130);
        a.insert(3);
        a.insert(129);
        let mut b = BitSet::new(130);
        b.insert(129);
        assert_eq!(a.and(&b).iter().collect::<Vec<_>>(), vec![129]);
        assert_eq!(a.and_not(&b).iter().collect::<Vec<_>>(), vec![3]);
        assert_eq!(a.or(&b).count(), 2);
        a.remove(3);
        assert!(!a.contains(3));
    }
}
