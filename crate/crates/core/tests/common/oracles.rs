//! Brute-force reference computations, independent of the library solvers.
//! They only read distances, values and weights off the fields.
#![allow(dead_code)]

use mmfield::{MMField, Matrix, MetricField};

/// All permutations of `0..n`.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// `W_p` between uniform measures on `n` points each: best permutation.
pub fn perm_wasserstein(c: &Matrix, p: f64) -> f64 {
    let n = c.rows();
    permutations(n)
        .iter()
        .map(|s| (0..n).map(|i| c[(i, s[i])].powf(p)).sum::<f64>() / n as f64)
        .fold(f64::INFINITY, f64::min)
        .powf(1.0 / p)
}

/// Bottleneck value: best permutation under the max cost.
pub fn perm_bottleneck(c: &Matrix) -> f64 {
    let n = c.rows();
    permutations(n)
        .iter()
        .map(|s| (0..n).map(|i| c[(i, s[i])]).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

/// Largest mass a coupling of `a`, `b` can put on `cells` (row-major
/// `n x m` flags): `min over row sets A of a(not A) + b(N(A))`.
pub fn max_mass(a: &[f64], b: &[f64], cells: &[bool]) -> f64 {
    let (n, m) = (a.len(), b.len());
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        let mut nb = vec![false; m];
        let mut rest = 0.0;
        for i in 0..n {
            if mask >> i & 1 == 1 {
                for j in 0..m {
                    nb[j] |= cells[i * m + j];
                }
            } else {
                rest += a[i];
            }
        }
        let cover: f64 = (0..m).filter(|&j| nb[j]).map(|j| b[j]).sum();
        best = best.min(rest + cover);
    }
    best
}

fn gap(x: &MetricField, y: &MetricField, c1: (usize, usize), c2: (usize, usize)) -> f64 {
    (x.dist(c1.0, c2.0) - y.dist(c1.1, c2.1)).abs()
}

/// Field distortion of a pair set.
pub fn distortion(x: &MetricField, y: &MetricField, pairs: &[(usize, usize)]) -> f64 {
    let mut d: f64 = 0.0;
    for &p in pairs {
        d = d.max(2.0 * x.bdist(p.0, y, p.1));
        for &q in pairs {
            d = d.max(gap(x, y, p, q));
        }
    }
    d
}

fn cells_of(mask: u64, n: usize, m: usize) -> Vec<(usize, usize)> {
    (0..n * m).filter(|k| mask >> k & 1 == 1).map(|k| (k / m, k % m)).collect()
}

/// Half the least distortion over every correspondence.
pub fn gh_brute(x: &MetricField, y: &MetricField) -> f64 {
    let (n, m) = (x.n(), y.n());
    assert!(n * m <= 16, "brute force only for tiny fields");
    let mut best = f64::INFINITY;
    for mask in 1u64..(1 << (n * m)) {
        let pairs = cells_of(mask, n, m);
        let rows = (0..n).all(|i| pairs.iter().any(|p| p.0 == i));
        let cols = (0..m).all(|j| pairs.iter().any(|p| p.1 == j));
        if rows && cols {
            best = best.min(0.5 * distortion(x, y, &pairs));
        }
    }
    best
}

/// `min over pair sets R of max(dis(R) / 2, 1 - max mass on R)`; the empty
/// set gives the cap 1.
pub fn gp_brute(x: &MMField, y: &MMField) -> f64 {
    let (n, m) = (x.n(), y.n());
    assert!(n * m <= 16, "brute force only for tiny fields");
    let mut best: f64 = 1.0;
    for mask in 1u64..(1 << (n * m)) {
        let pairs = cells_of(mask, n, m);
        let flags: Vec<bool> = (0..n * m).map(|k| mask >> k & 1 == 1).collect();
        let mass = max_mass(x.weights(), y.weights(), &flags);
        let v = (0.5 * distortion(x.base(), y.base(), &pairs)).max(1.0 - mass);
        best = best.min(v);
    }
    best
}

/// `max(sup gap / 2, sup d_B)` over the best support pattern carrying a
/// full coupling.
pub fn gw_inf_brute(x: &MMField, y: &MMField) -> f64 {
    let (n, m) = (x.n(), y.n());
    assert!(n * m <= 16, "brute force only for tiny fields");
    let (a, b) = (x.weights(), y.weights());
    let mut best = f64::INFINITY;
    for mask in 1u64..(1 << (n * m)) {
        let flags: Vec<bool> = (0..n * m).map(|k| mask >> k & 1 == 1).collect();
        if max_mass(a, b, &flags) < 1.0 - 1e-10 {
            continue;
        }
        let pairs = cells_of(mask, n, m);
        let mut v: f64 = 0.0;
        for &p in &pairs {
            v = v.max(x.base().bdist(p.0, y.base(), p.1));
            for &q in &pairs {
                v = v.max(0.5 * gap(x.base(), y.base(), p, q));
            }
        }
        best = best.min(v);
    }
    best
}

/// Finite-`p` objective of a dense coupling `pi` (row-major).
pub fn gw_objective_dense(x: &MMField, y: &MMField, pi: &[f64], p: f64) -> f64 {
    let (n, m) = (x.n(), y.n());
    let (bx, by) = (x.base(), y.base());
    let mut ms = 0.0;
    let mut ds = 0.0;
    for i in 0..n {
        for j in 0..m {
            let w = pi[i * m + j];
            if w <= 0.0 {
                continue;
            }
            ds += w * bx.bdist(i, by, j).powf(p);
            for k in 0..n {
                for l in 0..m {
                    let w2 = pi[k * m + l];
                    if w2 > 0.0 {
                        ms += w * w2 * (bx.dist(i, k) - by.dist(j, l)).abs().powf(p);
                    }
                }
            }
        }
    }
    (0.5 * ms.powf(1.0 / p)).max(ds.powf(1.0 / p))
}

/// Coupling from its free upper-left `(n-1) x (m-1)` block, or `None`
/// when a completed entry is negative.
fn complete(a: &[f64], b: &[f64], free: &[f64]) -> Option<Vec<f64>> {
    let (n, m) = (a.len(), b.len());
    let mut pi = vec![0.0; n * m];
    for i in 0..n - 1 {
        for j in 0..m - 1 {
            pi[i * m + j] = free[i * (m - 1) + j];
        }
    }
    for i in 0..n - 1 {
        let s: f64 = (0..m - 1).map(|j| pi[i * m + j]).sum();
        pi[i * m + m - 1] = a[i] - s;
    }
    for j in 0..m {
        let s: f64 = (0..n - 1).map(|i| pi[i * m + j]).sum();
        pi[(n - 1) * m + j] = b[j] - s;
    }
    if pi.iter().any(|&v| v < -1e-12) {
        return None;
    }
    Some(pi.iter().map(|v| v.max(0.0)).collect())
}

/// Grid search with step `1/steps` over the free block of the coupling
/// polytope, then a shrinking pattern search from the best few points.
pub fn gw_grid_brute(x: &MMField, y: &MMField, p: f64, steps: usize) -> f64 {
    let (a, b) = (x.weights(), y.weights());
    let (n, m) = (a.len(), b.len());
    let k = (n - 1) * (m - 1);
    let eval = |free: &[f64]| complete(a, b, free).map(|pi| gw_objective_dense(x, y, &pi, p));
    if k == 0 {
        return eval(&[]).unwrap();
    }
    let h = 1.0 / steps as f64;
    let caps: Vec<usize> = (0..k)
        .map(|c| {
            let (i, j) = (c / (m - 1), c % (m - 1));
            (a[i].min(b[j]) / h + 1e-9).floor() as usize
        })
        .collect();
    let mut idx = vec![0usize; k];
    let mut top: Vec<(f64, Vec<f64>)> = Vec::new();
    loop {
        let free: Vec<f64> = idx.iter().map(|&t| t as f64 * h).collect();
        if let Some(v) = eval(&free) {
            top.push((v, free));
            if top.len() > 64 {
                top.sort_by(|u, w| u.0.total_cmp(&w.0));
                top.truncate(8);
            }
        }
        let mut c = 0;
        loop {
            if c == k {
                top.sort_by(|u, w| u.0.total_cmp(&w.0));
                top.truncate(8);
                return top.into_iter().map(|(v, f)| polish(&eval, v, f, h)).fold(f64::INFINITY, f64::min);
            }
            idx[c] += 1;
            if idx[c] <= caps[c] {
                break;
            }
            idx[c] = 0;
            c += 1;
        }
    }
}

fn polish(eval: &dyn Fn(&[f64]) -> Option<f64>, mut v: f64, mut free: Vec<f64>, h: f64) -> f64 {
    let mut step = h;
    while step > 1e-10 {
        let mut improved = false;
        for c in 0..free.len() {
            for dir in [1.0, -1.0] {
                let mut f2 = free.clone();
                f2[c] += dir * step;
                if let Some(v2) = eval(&f2) {
                    if v2 < v - 1e-15 {
                        v = v2;
                        free = f2;
                        improved = true;
                    }
                }
            }
            // pairs of coordinates move along cycle directions
            for c2 in c + 1..free.len() {
                for (s1, s2) in [(1.0, -1.0), (-1.0, 1.0), (1.0, 1.0), (-1.0, -1.0)] {
                    let mut f2 = free.clone();
                    f2[c] += s1 * step;
                    f2[c2] += s2 * step;
                    if let Some(v2) = eval(&f2) {
                        if v2 < v - 1e-15 {
                            v = v2;
                            free = f2;
                            improved = true;
                        }
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    v
}

/// Euclidean distance matrix between two point lists.
pub fn cross_dist(a: &[Vec<f64>], b: &[Vec<f64>]) -> Matrix {
    Matrix::from_fn(a.len(), b.len(), |i, j| {
        a[i].iter().zip(&b[j]).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
    })
}

/// Every `n`-tuple of support indices with its product weight.
pub fn tuple_law(x: &MMField, n: usize) -> Vec<(Vec<usize>, f64)> {
    let supp = x.support();
    let mut out = vec![(Vec::new(), 1.0)];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * supp.len());
        for (t, w) in &out {
            for &i in &supp {
                let mut t2 = t.clone();
                t2.push(i);
                next.push((t2, w * x.weights()[i]));
            }
        }
        out = next;
    }
    out
}

/// `rho_n` between the augmented distance matrices of two tuples.
pub fn tuple_rho(x: &MetricField, t: &[usize], y: &MetricField, u: &[usize]) -> f64 {
    let mut v: f64 = 0.0;
    for a in 0..t.len() {
        v = v.max(x.bdist(t[a], y, u[a]));
        for b in 0..t.len() {
            v = v.max(0.5 * (x.dist(t[a], t[b]) - y.dist(u[a], u[b])).abs());
        }
    }
    v
}

/// Exact `W_p` between the `n`-point curvature laws of two fields.
pub fn exact_curvature_distance(x: &MMField, y: &MMField, n: usize, p: f64) -> f64 {
    let lx = tuple_law(x, n);
    let ly = tuple_law(y, n);
    let c = Matrix::from_fn(lx.len(), ly.len(), |i, j| tuple_rho(x.base(), &lx[i].0, y.base(), &ly[j].0));
    let a: Vec<f64> = lx.iter().map(|t| t.1).collect();
    let b: Vec<f64> = ly.iter().map(|t| t.1).collect();
    mmfield::transport::wasserstein_p(&a, &b, &c, p).unwrap().value
}
