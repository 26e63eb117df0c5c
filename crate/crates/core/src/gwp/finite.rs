//! Finite-order Gromov-Wasserstein.
//!
//! With everything scaled into `[0, 1]`, the objective raised to the power
//! `p` is `max(Q(P), L(P))` where `Q(P) = P'KP` is quadratic and
//! `L(P) = <D, P>` is linear in the coupling `P`. Along any direction with
//! zero row and column sums both are polynomials in the step, so line
//! searches are exact. The local search combines 2x2 cycle moves with
//! min-norm subgradient steps on the current face.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{expand, Exponent, GWResult, DEFAULT_BUDGET, DEFAULT_RESTARTS};
use crate::transport::wasserstein_p;
use crate::{seeds, Error, MMField, Matrix, Result, Status};

/// Support size per side up to which finite `p` runs the global search.
pub const EXACT_GATE_FINITE: usize = 4;

/// Grid points evaluated by the global search.
const GRID_POINTS: f64 = 100_000.0;

#[derive(Clone, Debug)]
pub struct GwOptions {
    pub restarts: usize,
    /// Search-node budget (`p = inf`) or polishing sweep budget (`p < inf`).
    pub budget: u64,
    pub seed: u64,
    pub tol_mass: f64,
    /// Support size per side for the `p = inf` combinatorial search.
    pub inf_size_gate: usize,
}

impl Default for GwOptions {
    fn default() -> Self {
        GwOptions {
            restarts: DEFAULT_RESTARTS,
            budget: DEFAULT_BUDGET,
            seed: 0,
            tol_mass: 1e-9,
            inf_size_gate: super::DEFAULT_GW_INF_SIZE_GATE,
        }
    }
}

pub(crate) struct Problem {
    pub n: usize,
    pub m: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// `(gap / (2 scale))^p` indexed by cell pairs.
    pub k: Vec<f64>,
    /// `(d_B / scale)^p` per cell.
    pub d: Vec<f64>,
    pub p: f64,
    pub scale: f64,
}

impl Problem {
    pub fn new(x: &MMField, y: &MMField, p: f64) -> Problem {
        let (n, m) = (x.n(), y.n());
        let (bx, by) = (x.base(), y.base());
        let nm = n * m;
        let mut scale: f64 = 0.0;
        for i in 0..n {
            for j in 0..m {
                scale = scale.max(bx.bdist(i, by, j));
            }
        }
        for i in 0..n {
            for k in 0..n {
                for j in 0..m {
                    for l in 0..m {
                        scale = scale.max(0.5 * (bx.dist(i, k) - by.dist(j, l)).abs());
                    }
                }
            }
        }
        let s = if scale > 0.0 { scale } else { 1.0 };
        let mut kmat = vec![0.0; nm * nm];
        for i in 0..n {
            for j in 0..m {
                let u = i * m + j;
                for k in 0..n {
                    for l in 0..m {
                        let v = k * m + l;
                        kmat[u * nm + v] = (0.5 * (bx.dist(i, k) - by.dist(j, l)).abs() / s).powf(p);
                    }
                }
            }
        }
        let d = (0..nm)
            .map(|u| (bx.bdist(u / m, by, u % m) / s).powf(p))
            .collect();
        Problem {
            n,
            m,
            a: x.weights().to_vec(),
            b: y.weights().to_vec(),
            k: kmat,
            d,
            p,
            scale: s,
        }
    }

    fn nm(&self) -> usize {
        self.n * self.m
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        let nm = self.nm();
        let mut q = 0.0;
        let mut l = 0.0;
        for u in 0..nm {
            if x[u] <= 0.0 {
                continue;
            }
            l += self.d[u] * x[u];
            let row = &self.k[u * nm..(u + 1) * nm];
            let mut s = 0.0;
            for v in 0..nm {
                s += row[v] * x[v];
            }
            q += x[u] * s;
        }
        q.max(l)
    }

    pub fn value_of(&self, f: f64) -> f64 {
        self.scale * f.max(0.0).powf(1.0 / self.p)
    }
}

/// Minimize `max(q0 + q1 t + q2 t^2, l0 + l1 t)` over `[0, tmax]`.
fn line_min(q0: f64, q1: f64, q2: f64, l0: f64, l1: f64, tmax: f64) -> (f64, f64) {
    let f = |t: f64| (q0 + t * (q1 + t * q2)).max(l0 + l1 * t);
    let mut best = (0.0, f(0.0));
    let mut consider = |t: f64| {
        if t > 0.0 && t <= tmax {
            let v = f(t);
            if v < best.1 {
                best = (t, v);
            }
        }
    };
    consider(tmax);
    if q2 > 0.0 {
        consider(-q1 / (2.0 * q2));
    }
    let (aa, bb, cc) = (q2, q1 - l1, q0 - l0);
    if aa.abs() <= 1e-300 {
        if bb != 0.0 {
            consider(-cc / bb);
        }
    } else {
        let disc = bb * bb - 4.0 * aa * cc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            let qq = -0.5 * (bb + bb.signum() * sq);
            if qq != 0.0 {
                consider(qq / aa);
                consider(cc / qq);
            } else {
                consider(-bb / (2.0 * aa));
            }
        }
    }
    best
}

struct State<'a> {
    pb: &'a Problem,
    x: Vec<f64>,
    /// `K x`
    g: Vec<f64>,
    q: f64,
    l: f64,
}

impl<'a> State<'a> {
    fn new(pb: &'a Problem, x: Vec<f64>) -> Self {
        let mut s = State {
            pb,
            x,
            g: vec![0.0; pb.nm()],
            q: 0.0,
            l: 0.0,
        };
        s.refresh();
        s
    }

    fn refresh(&mut self) {
        let nm = self.pb.nm();
        for u in 0..nm {
            let row = &self.pb.k[u * nm..(u + 1) * nm];
            self.g[u] = row.iter().zip(&self.x).map(|(k, x)| k * x).sum();
        }
        self.q = self.x.iter().zip(&self.g).map(|(x, g)| x * g).sum();
        self.l = self.x.iter().zip(&self.pb.d).map(|(x, d)| x * d).sum();
    }

    fn f(&self) -> f64 {
        self.q.max(self.l)
    }

    fn accept(&self, val: f64) -> bool {
        val < self.f() * (1.0 - 1e-15)
    }

    /// Move mass `t` around the cycle `+(i,j) +(i2,j2) -(i,j2) -(i2,j)`,
    /// trying both orientations.
    fn cycle(&mut self, i: usize, i2: usize, j: usize, j2: usize) -> bool {
        let m = self.pb.m;
        let nm = self.pb.nm();
        let c = [i * m + j, i2 * m + j2, i * m + j2, i2 * m + j];
        let s = [1.0, 1.0, -1.0, -1.0];
        let mut q2 = 0.0;
        for (u, su) in c.iter().zip(&s) {
            for (v, sv) in c.iter().zip(&s) {
                q2 += su * sv * self.pb.k[u * nm + v];
            }
        }
        let gd: f64 = c.iter().zip(&s).map(|(u, su)| su * self.g[*u]).sum();
        let ld: f64 = c.iter().zip(&s).map(|(u, su)| su * self.pb.d[*u]).sum();
        let mut moved = false;
        for sign in [1.0, -1.0] {
            let tmax = if sign > 0.0 {
                self.x[c[2]].min(self.x[c[3]])
            } else {
                self.x[c[0]].min(self.x[c[1]])
            };
            if tmax <= 0.0 {
                continue;
            }
            let (t, val) = line_min(self.q, 2.0 * sign * gd, q2, self.l, sign * ld, tmax);
            if t > 0.0 && self.accept(val) {
                let step = sign * t;
                for (u, su) in c.iter().zip(&s) {
                    self.x[*u] += su * step;
                }
                if t == tmax {
                    // the binding cells hit zero exactly; rounding can leave
                    // a negative residue that dominates at large p
                    let (z1, z2) = if sign > 0.0 { (c[2], c[3]) } else { (c[0], c[1]) };
                    for z in [z1, z2] {
                        if self.x[z] < 1e-15 {
                            self.x[z] = 0.0;
                        }
                    }
                }
                for (u, su) in c.iter().zip(&s) {
                    let col = &self.pb.k[u * nm..(u + 1) * nm];
                    for (gv, kv) in self.g.iter_mut().zip(col) {
                        *gv += su * step * kv;
                    }
                }
                self.q += step * 2.0 * gd + step * step * q2;
                self.l += step * ld;
                moved = true;
                break;
            }
        }
        moved
    }

    /// Orthogonal projection onto zero row and column sums supported on
    /// `free` cells: subtract `alpha_i + beta_j` where the potentials solve
    /// the normal equations of the free bipartite graph. A result that does
    /// not meet the constraints to rounding accuracy is discarded.
    fn project(&self, dir: &mut [f64], free: &[bool]) {
        let (n, m) = (self.pb.n, self.pb.m);
        let k = n + m;
        let mut a = vec![0.0; k * k];
        let mut rhs = vec![0.0; k];
        for i in 0..n {
            for j in 0..m {
                let u = i * m + j;
                if !free[u] {
                    dir[u] = 0.0;
                    continue;
                }
                a[i * k + i] += 1.0;
                a[(n + j) * k + n + j] += 1.0;
                a[i * k + n + j] += 1.0;
                a[(n + j) * k + i] += 1.0;
                rhs[i] += dir[u];
                rhs[n + j] += dir[u];
            }
        }
        let sol = solve_singular(k, &mut a, &mut rhs);
        let norm0: f64 = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        for i in 0..n {
            for j in 0..m {
                if free[i * m + j] {
                    dir[i * m + j] -= sol[i] + sol[n + j];
                }
            }
        }
        let mut worst: f64 = 0.0;
        for i in 0..n {
            worst = worst.max(dir[i * m..(i + 1) * m].iter().sum::<f64>().abs());
        }
        for j in 0..m {
            worst = worst.max((0..n).map(|i| dir[i * m + j]).sum::<f64>().abs());
        }
        let norm: f64 = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 1e-10 * norm0 || worst > 1e-13 * norm {
            dir.iter_mut().for_each(|v| *v = 0.0);
        }
    }

    fn dense_step(&mut self, dir: &[f64]) -> bool {
        let nm = self.pb.nm();
        let (n, m) = (self.pb.n, self.pb.m);
        let big = dir.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        if big < 1e-300 {
            return false;
        }
        // directions that are rounding noise would take an unbounded step
        let rows = (0..n).map(|i| dir[i * m..(i + 1) * m].iter().sum::<f64>().abs());
        let cols = (0..m).map(|j| (0..n).map(|i| dir[i * m + j]).sum::<f64>().abs());
        if rows.chain(cols).any(|s| s > 1e-12 * big) {
            return false;
        }
        let mut tmax = f64::INFINITY;
        for u in 0..nm {
            if dir[u] < 0.0 {
                tmax = tmax.min(self.x[u] / -dir[u]);
            }
        }
        if !(tmax > 0.0) || !tmax.is_finite() {
            return false;
        }
        let mut kd = vec![0.0; nm];
        for u in 0..nm {
            let row = &self.pb.k[u * nm..(u + 1) * nm];
            kd[u] = row.iter().zip(dir).map(|(k, d)| k * d).sum();
        }
        let q2: f64 = dir.iter().zip(&kd).map(|(d, k)| d * k).sum();
        let gd: f64 = dir.iter().zip(&self.g).map(|(d, g)| d * g).sum();
        let ld: f64 = dir.iter().zip(&self.pb.d).map(|(d, l)| d * l).sum();
        let (t, val) = line_min(self.q, 2.0 * gd, q2, self.l, ld, tmax);
        if t > 0.0 && self.accept(val) {

            for u in 0..nm {
                self.x[u] += t * dir[u];
                if self.x[u] < 0.0 || (t == tmax && dir[u] < 0.0 && self.x[u] < 1e-15 * self.x.len() as f64 * 1e-3) {
                    self.x[u] = self.x[u].max(0.0);
                }
                self.g[u] += t * kd[u];
            }
            self.q += 2.0 * t * gd + t * t * q2;
            self.l += t * ld;
            true
        } else {
            false
        }
    }

    /// Steps along the projected negative gradients of each term and along
    /// the min-norm element of their convex hull.
    fn subgradient_steps(&mut self) -> bool {
        let nm = self.pb.nm();
        let free: Vec<bool> = self.x.iter().map(|&v| v > 0.0).collect();
        let mut gq: Vec<f64> = self.g.iter().map(|v| -2.0 * v).collect();
        let mut gl: Vec<f64> = self.pb.d.iter().map(|v| -v).collect();
        self.project(&mut gq, &free);
        self.project(&mut gl, &free);
        let diff: Vec<f64> = (0..nm).map(|u| gq[u] - gl[u]).collect();
        let dd: f64 = diff.iter().map(|v| v * v).sum();
        let mut moved = false;
        if dd > 0.0 {
            let lam = (-(0..nm).map(|u| gl[u] * diff[u]).sum::<f64>() / dd).clamp(0.0, 1.0);
            let mix: Vec<f64> = (0..nm).map(|u| gl[u] + lam * diff[u]).collect();
            moved |= self.dense_step(&mix);
        }
        if self.q >= self.l {
            moved |= self.dense_step(&gq);
        }
        if self.l >= self.q {
            moved |= self.dense_step(&gl);
        }
        moved
    }

    fn polish(&mut self, max_sweeps: u64) -> u64 {
        let (n, m) = (self.pb.n, self.pb.m);
        let mut used = 0;
        let mut stale = 0;
        while used < max_sweeps {
            used += 1;
            let f0 = self.f();
            for i in 0..n {
                for i2 in i + 1..n {
                    for j in 0..m {
                        for j2 in j + 1..m {
                            self.cycle(i, i2, j, j2);
                        }
                    }
                }
            }
            self.subgradient_steps();
            self.refresh();
            if self.f() >= f0 - 1e-15 * f0 {
                stale += 1;
                if stale >= 2 {
                    break;
                }
            } else {
                stale = 0;
            }
        }
        used
    }
}

/// Gaussian elimination with full pivoting on a consistent symmetric system;
/// variables whose pivot vanishes are set to zero.
fn solve_singular(k: usize, a: &mut [f64], b: &mut [f64]) -> Vec<f64> {
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1.0);
    let mut colperm: Vec<usize> = (0..k).collect();
    let mut rank = 0;
    for r in 0..k {
        let mut best = (0.0, r, r);
        for i in r..k {
            for j in r..k {
                let v = a[i * k + colperm[j]].abs();
                if v > best.0 {
                    best = (v, i, j);
                }
            }
        }
        if best.0 <= 1e-12 * scale {
            break;
        }
        let (_, pi, pj) = best;
        for c in 0..k {
            a.swap(r * k + c, pi * k + c);
        }
        b.swap(r, pi);
        colperm.swap(r, pj);
        let piv = a[r * k + colperm[r]];
        for i in r + 1..k {
            let f = a[i * k + colperm[r]] / piv;
            if f != 0.0 {
                for c in r..k {
                    let cc = colperm[c];
                    a[i * k + cc] -= f * a[r * k + cc];
                }
                b[i] -= f * b[r];
            }
        }
        rank += 1;
    }
    let mut x = vec![0.0; k];
    for r in (0..rank).rev() {
        let mut s = b[r];
        for c in r + 1..rank {
            s -= a[r * k + colperm[c]] * x[colperm[c]];
        }
        x[colperm[r]] = s / a[r * k + colperm[r]];
    }
    x
}

/// Leaf elimination of a spanning-tree basis; `None` if the cells do not
/// form a spanning tree or the solution is negative.
fn tree_solution(n: usize, m: usize, a: &[f64], b: &[f64], cells: &[usize]) -> Option<Vec<f64>> {
    let mut parent: Vec<usize> = (0..n + m).collect();
    fn find(p: &mut [usize], mut v: usize) -> usize {
        while p[v] != v {
            p[v] = p[p[v]];
            v = p[v];
        }
        v
    }
    for &c in cells {
        let (r, s) = (find(&mut parent, c / m), find(&mut parent, n + c % m));
        if r == s {
            return None;
        }
        parent[r] = s;
    }
    let mut ra = a.to_vec();
    let mut rb = b.to_vec();
    let mut alive: Vec<bool> = vec![true; cells.len()];
    let mut x = vec![0.0; n * m];
    for _ in 0..cells.len() {
        let mut deg = vec![0usize; n + m];
        for (k, &c) in cells.iter().enumerate() {
            if alive[k] {
                deg[c / m] += 1;
                deg[n + c % m] += 1;
            }
        }
        let mut done = false;
        for (k, &c) in cells.iter().enumerate() {
            if !alive[k] {
                continue;
            }
            let (i, j) = (c / m, c % m);
            if deg[i] == 1 {
                x[c] = ra[i];
                rb[j] -= ra[i];
                ra[i] = 0.0;
            } else if deg[n + j] == 1 {
                x[c] = rb[j];
                ra[i] -= rb[j];
                rb[j] = 0.0;
            } else {
                continue;
            }
            alive[k] = false;
            done = true;
            break;
        }
        if !done {
            return None;
        }
    }
    if x.iter().any(|&v| v < -1e-12) {
        return None;
    }
    x.iter_mut().for_each(|v| *v = v.max(0.0));
    Some(x)
}

/// Every vertex of the transportation polytope.
pub(crate) fn all_vertices(n: usize, m: usize, a: &[f64], b: &[f64]) -> Vec<Vec<f64>> {
    let k = n + m - 1;
    let total = n * m;
    let mut out = Vec::new();
    let mut comb: Vec<usize> = (0..k).collect();
    loop {
        if let Some(x) = tree_solution(n, m, a, b, &comb) {
            out.push(x);
        }
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return dedupe_plans(out);
            }
            i -= 1;
            if comb[i] != i + total - k {
                break;
            }
            if i == 0 {
                return dedupe_plans(out);
            }
        }
        comb[i] += 1;
        for j in i + 1..k {
            comb[j] = comb[j - 1] + 1;
        }
    }
}

fn dedupe_plans(mut v: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    v.sort_by(|p, q| {
        p.iter()
            .zip(q)
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    v.dedup_by(|p, q| p.iter().zip(q.iter()).all(|(a, b)| (a - b).abs() < 1e-14));
    v
}

/// Lattice points of the polytope parametrized by its leading
/// `(n-1) x (m-1)` block; keeps the `keep` best by objective.
fn grid_best(pb: &Problem, keep: usize) -> Vec<Vec<f64>> {
    let (n, m) = (pb.n, pb.m);
    let dims = (n - 1) * (m - 1);
    if dims == 0 {
        return Vec::new();
    }
    let mut g = 1usize;
    while ((g + 2) as f64).powi(dims as i32) <= GRID_POINTS && g < 256 {
        g += 1;
    }
    let mut best: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut x = vec![0.0; n * m];
    let mut row_left = pb.a.clone();
    let mut col_left = pb.b.clone();
    fn rec(
        pb: &Problem,
        g: usize,
        pos: usize,
        x: &mut Vec<f64>,
        row_left: &mut Vec<f64>,
        col_left: &mut Vec<f64>,
        best: &mut Vec<(f64, Vec<f64>)>,
        keep: usize,
    ) {
        let (n, m) = (pb.n, pb.m);
        let dims = (n - 1) * (m - 1);
        if pos == dims {
            // complete the last column and row
            let mut y = x.clone();
            for i in 0..n - 1 {
                y[i * m + m - 1] = row_left[i];
            }
            let mut corner = pb.a[n - 1];
            for j in 0..m - 1 {
                y[(n - 1) * m + j] = col_left[j];
                corner -= col_left[j];
            }
            if corner < -1e-12 {
                return;
            }
            y[(n - 1) * m + m - 1] = corner.max(0.0);
            let f = pb.objective(&y);
            if best.len() < keep || f < best.last().unwrap().0 {
                best.push((f, y));
                best.sort_by(|p, q| p.0.total_cmp(&q.0));
                best.truncate(keep);
            }
            return;
        }
        let (i, j) = (pos / (m - 1), pos % (m - 1));
        let h = pb.a[i].min(pb.b[j]) / g as f64;
        for k in 0..=g {
            let v = h * k as f64;
            if v > row_left[i] + 1e-15 || v > col_left[j] + 1e-15 {
                break;
            }
            x[i * m + j] = v;
            row_left[i] -= v;
            col_left[j] -= v;
            rec(pb, g, pos + 1, x, row_left, col_left, best, keep);
            row_left[i] += v;
            col_left[j] += v;
        }
        x[i * m + j] = 0.0;
    }
    rec(pb, g, 0, &mut x, &mut row_left, &mut col_left, &mut best, keep);
    best.into_iter().map(|b| b.1).collect()
}

fn random_vertex(n: usize, m: usize, a: &[f64], b: &[f64], rng: &mut impl Rng) -> Vec<f64> {
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..m).collect();
    rows.shuffle(rng);
    cols.shuffle(rng);
    let mut ra = a.to_vec();
    let mut rb = b.to_vec();
    let mut x = vec![0.0; n * m];
    let (mut r, mut c) = (0, 0);
    while r < n && c < m {
        let (i, j) = (rows[r], cols[c]);
        let t = ra[i].min(rb[j]);
        x[i * m + j] = t;
        ra[i] -= t;
        rb[j] -= t;
        if ra[i] <= rb[j] {
            r += 1;
        } else {
            c += 1;
        }
    }
    x
}

fn random_interior(n: usize, m: usize, a: &[f64], b: &[f64], rng: &mut impl Rng) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n * m).map(|u| a[u / m] * b[u % m] * rng.gen_range(0.05..1.0)).collect();
    for _ in 0..5000 {
        for i in 0..n {
            let s: f64 = x[i * m..(i + 1) * m].iter().sum();
            if s > 0.0 {
                x[i * m..(i + 1) * m].iter_mut().for_each(|v| *v *= a[i] / s);
            }
        }
        let mut worst: f64 = 0.0;
        for j in 0..m {
            let s: f64 = (0..n).map(|i| x[i * m + j]).sum();
            worst = worst.max((s - b[j]).abs());
            if s > 0.0 {
                (0..n).for_each(|i| x[i * m + j] *= b[j] / s);
            }
        }
        if worst < 1e-15 {
            break;
        }
    }
    x
}

/// `W_p^p` between two discrete distributions on the line.
fn line_wasserstein_pp(mut u: Vec<(f64, f64)>, mut v: Vec<(f64, f64)>, p: f64) -> f64 {
    u.sort_by(|a, b| a.0.total_cmp(&b.0));
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut i, mut j) = (0, 0);
    let (mut ru, mut rv) = (u[0].1, v[0].1);
    let mut total = 0.0;
    loop {
        let t = ru.min(rv);
        total += t * (u[i].0 - v[j].0).abs().powf(p);
        ru -= t;
        rv -= t;
        if ru <= 1e-300 {
            i += 1;
            if i == u.len() {
                break;
            }
            ru = u[i].1;
        }
        if rv <= 1e-300 {
            j += 1;
            if j == v.len() {
                break;
            }
            rv = v[j].1;
        }
    }
    total
}

/// Cost matrix of the eccentricity-profile bound: `W_p^p` between the laws of
/// `d_X(x, .)` and `d_Y(y, .)` (`p = inf` gives `W_inf`).
pub(crate) fn profile_costs(x: &MMField, y: &MMField, p: Exponent) -> Matrix {
    let (bx, by) = (x.base(), y.base());
    let prof = |f: &MMField, i: usize| -> Vec<(f64, f64)> {
        (0..f.n())
            .filter(|&k| f.weights()[k] > 0.0)
            .map(|k| (f.base().dist(i, k), f.weights()[k]))
            .collect()
    };
    let _ = (bx, by);
    Matrix::from_fn(x.n(), y.n(), |i, j| match p {
        Exponent::Finite(p) => line_wasserstein_pp(prof(x, i), prof(y, j), p),
        Exponent::Infinite => line_wasserstein_inf(prof(x, i), prof(y, j)),
    })
}

fn line_wasserstein_inf(mut u: Vec<(f64, f64)>, mut v: Vec<(f64, f64)>) -> f64 {
    u.sort_by(|a, b| a.0.total_cmp(&b.0));
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut i, mut j) = (0, 0);
    let (mut ru, mut rv) = (u[0].1, v[0].1);
    let mut worst: f64 = 0.0;
    loop {
        let t = ru.min(rv);
        if t > 1e-15 {
            worst = worst.max((u[i].0 - v[j].0).abs());
        }
        ru -= t;
        rv -= t;
        if ru <= 1e-15 {
            i += 1;
            if i == u.len() {
                break;
            }
            ru = u[i].1;
        }
        if rv <= 1e-15 {
            j += 1;
            if j == v.len() {
                break;
            }
            rv = v[j].1;
        }
    }
    worst
}

/// `max(TLB / 2, W_p(d_B))`: half the eccentricity-profile transport bound on
/// the distance term and the exact minimum of the value term.
pub fn gw_relaxation_lower(x: &MMField, y: &MMField, p: f64) -> Result<f64> {
    let (bx, by) = (x.base(), y.base());
    let c = profile_costs(x, y, Exponent::Finite(p));
    let tlb = wasserstein_p(x.weights(), y.weights(), &c, 1.0)?.value.max(0.0).powf(1.0 / p);
    let db = Matrix::from_fn(x.n(), y.n(), |i, j| bx.bdist(i, by, j));
    let wd = wasserstein_p(x.weights(), y.weights(), &db, p)?.value;
    Ok((0.5 * tlb).max(wd))
}

pub(crate) fn solve(x: &MMField, y: &MMField, p: f64, opts: &GwOptions) -> Result<GWResult> {
    let (xs_f, xs) = x.restrict_to_support()?;
    let (ys_f, ys) = y.restrict_to_support()?;
    let pb = Problem::new(&xs_f, &ys_f, p);
    let (n, m) = (pb.n, pb.m);
    let exact = n <= EXACT_GATE_FINITE && m <= EXACT_GATE_FINITE;
    let relax = gw_relaxation_lower(&xs_f, &ys_f, p)?;

    let mut starts: Vec<Vec<f64>> = Vec::new();
    starts.push((0..n * m).map(|u| pb.a[u / m] * pb.b[u % m]).collect());
    let dcost = Matrix::from_vec(n, m, pb.d.clone());
    starts.push(wasserstein_p(&pb.a, &pb.b, &dcost, 1.0)?.coupling.into_matrix().as_slice().to_vec());
    let prof = profile_costs(&xs_f, &ys_f, Exponent::Finite(p));
    starts.push(wasserstein_p(&pb.a, &pb.b, &prof, 1.0)?.coupling.into_matrix().as_slice().to_vec());
    for r in 0..opts.restarts {
        let mut rng = seeds::rng(opts.seed, &[0x6757, r as u64]);
        if r % 2 == 0 {
            starts.push(random_vertex(n, m, &pb.a, &pb.b, &mut rng));
        } else {
            starts.push(random_interior(n, m, &pb.a, &pb.b, &mut rng));
        }
    }
    if exact {
        starts.extend(grid_best(&pb, 8));
        let mut verts: Vec<(f64, Vec<f64>)> = all_vertices(n, m, &pb.a, &pb.b)
            .into_iter()
            .map(|v| (pb.objective(&v), v))
            .collect();
        verts.sort_by(|p, q| p.0.total_cmp(&q.0));
        starts.extend(verts.into_iter().take(8).map(|v| v.1));
    }

    let mut sweeps_left = opts.budget;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for s in starts {
        let mut st = State::new(&pb, s);
        let cap = sweeps_left.clamp(1, 5000);
        sweeps_left = sweeps_left.saturating_sub(st.polish(cap));
        for v in st.x.iter_mut() {
            if *v < 1e-15 {
                *v = 0.0;
            }
        }
        let f = pb.objective(&st.x);
        let better = match &best {
            None => true,
            Some((bf, bx)) => f < *bf || (f == *bf && lex_less(&st.x, bx)),
        };
        if better {
            best = Some((f, st.x));
        }
    }
    let (f, plan) = best.ok_or_else(|| Error::Empty("starts"))?;
    let value = pb.value_of(f);
    let coupling = expand(x.n(), y.n(), &xs, &ys, &plan);
    let status = if exact { Status::Exact } else { Status::Local };
    Ok(GWResult {
        value,
        coupling,
        status,
        lower: if exact { value } else { relax.min(value) },
        upper: value,
        relaxation_lower: relax,
        p: Exponent::Finite(p),
    })
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .map_or(false, |o| o.is_lt())
}
