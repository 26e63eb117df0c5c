//! Dinic max-flow on real capacities.

const EPS: f64 = 1e-15;

pub(crate) struct MaxFlow {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<f64>,
    flow: Vec<f64>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl MaxFlow {
    pub fn new(n: usize) -> Self {
        MaxFlow {
            adj: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
            flow: Vec::new(),
            level: vec![0; n],
            iter: vec![0; n],
        }
    }

    /// Returns the edge id; its reverse is `id ^ 1`.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: f64) -> usize {
        let id = self.to.len();
        self.to.push(v);
        self.cap.push(cap);
        self.flow.push(0.0);
        self.adj[u].push(id);
        self.to.push(u);
        self.cap.push(0.0);
        self.flow.push(0.0);
        self.adj[v].push(id + 1);
        id
    }

    #[inline]
    fn residual(&self, e: usize) -> f64 {
        self.cap[e] - self.flow[e]
    }

    pub fn flow_on(&self, e: usize) -> f64 {
        self.flow[e]
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        let mut queue = std::collections::VecDeque::new();
        self.level[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.to[e];
                if self.level[v] < 0 && self.residual(e) > EPS {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: f64) -> f64 {
        if u == t {
            return pushed;
        }
        while self.iter[u] < self.adj[u].len() {
            let e = self.adj[u][self.iter[u]];
            let v = self.to[e];
            let r = self.residual(e);
            if r > EPS && self.level[v] == self.level[u] + 1 {
                let got = self.dfs(v, t, pushed.min(r));
                if got > 0.0 {
                    self.flow[e] += got;
                    self.flow[e ^ 1] -= got;
                    return got;
                }
            }
            self.iter[u] += 1;
        }
        0.0
    }

    pub fn run(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        while self.bfs(s, t) {
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, f64::INFINITY);
                if f <= 0.0 {
                    break;
                }
                total += f;
            }
        }
        total
    }
}

/// Max flow through the bipartite network `source -> i (a_i) -> j (b_j) ->
/// sink` restricted to allowed cells; returns the total and the flow matrix
/// in row-major order.
pub(crate) fn bipartite_max_flow(a: &[f64], b: &[f64], allowed: impl Fn(usize, usize) -> bool) -> (f64, Vec<f64>) {
    let (n, m) = (a.len(), b.len());
    let s = n + m;
    let t = s + 1;
    let mut g = MaxFlow::new(n + m + 2);
    for (i, &w) in a.iter().enumerate() {
        if w > 0.0 {
            g.add_edge(s, i, w);
        }
    }
    for (j, &w) in b.iter().enumerate() {
        if w > 0.0 {
            g.add_edge(n + j, t, w);
        }
    }
    let mut cells = Vec::new();
    for i in 0..n {
        if a[i] <= 0.0 {
            continue;
        }
        for j in 0..m {
            if b[j] > 0.0 && allowed(i, j) {
                cells.push((i, j, g.add_edge(i, n + j, f64::INFINITY)));
            }
        }
    }
    let total = g.run(s, t);
    let mut mat = vec![0.0; n * m];
    for (i, j, e) in cells {
        mat[i * m + j] = g.flow_on(e).max(0.0);
    }
    (total, mat)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_network() {
        let mut g = MaxFlow::new(4);
        g.add_edge(0, 1, 2.0);
        g.add_edge(0, 2, 1.0);
        g.add_edge(1, 2, 1.0);
        g.add_edge(1, 3, 1.0);
        g.add_edge(2, 3, 2.0);
        assert_eq!(g.run(0, 3), 3.0);
    }

    #[test]
    fn bipartite_missing_row() {
        let (total, _) = bipartite_max_flow(&[0.3, 0.7], &[0.5, 0.5], |i, _| i == 1);
        assert!((total - 0.7).abs() < 1e-15);
    }
}
