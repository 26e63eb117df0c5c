//! Dense min-cost transportation by successive shortest paths with
//! potentials (Dijkstra on reduced costs).

use crate::{Error, Result};

const EPS: f64 = 1e-16;

/// Solves `min <C, P>` over nonnegative `P` with row sums `a` and column sums
/// `b`. Infinite costs are forbidden cells. `b` is rescaled to the mass of
/// `a` before solving. Returns `P` row-major.
pub(crate) fn min_cost_transport(a: &[f64], b: &[f64], cost: &[f64]) -> Result<Vec<f64>> {
    let (n, m) = (a.len(), b.len());
    debug_assert_eq!(cost.len(), n * m);
    let sa: f64 = a.iter().sum();
    let sb: f64 = b.iter().sum();
    let mut supply = a.to_vec();
    let mut demand: Vec<f64> = b.iter().map(|&v| v * sa / sb).collect();
    let mut flow = vec![0.0; n * m];

    let mut pot_r = vec![0.0; n];
    let mut pot_c = vec![f64::INFINITY; m];
    for i in 0..n {
        for j in 0..m {
            pot_c[j] = pot_c[j].min(cost[i * m + j]);
        }
    }
    for (j, p) in pot_c.iter_mut().enumerate() {
        if !p.is_finite() {
            if demand[j] > 0.0 {
                return Err(Error::Infeasible(format!("column {j} has no finite cost")));
            }
            *p = 0.0;
        }
    }
    for i in 0..n {
        if supply[i] > 0.0 && cost[i * m..(i + 1) * m].iter().all(|c| !c.is_finite()) {
            return Err(Error::Infeasible(format!("row {i} has no finite cost")));
        }
    }

    let mut dist_r = vec![0.0; n];
    let mut dist_c = vec![0.0; m];
    let mut done_r = vec![false; n];
    let mut done_c = vec![false; m];
    let mut prev_c = vec![usize::MAX; m];
    let mut prev_r = vec![usize::MAX; n];
    let tol_left = 1e-13 * sa.max(1e-300);

    loop {
        let left: f64 = supply.iter().sum();
        if left <= tol_left {
            break;
        }
        for i in 0..n {
            dist_r[i] = if supply[i] > EPS { 0.0 } else { f64::INFINITY };
            done_r[i] = false;
            prev_r[i] = usize::MAX;
        }
        for j in 0..m {
            dist_c[j] = f64::INFINITY;
            done_c[j] = false;
            prev_c[j] = usize::MAX;
        }
        let mut target = usize::MAX;
        let mut reach = f64::INFINITY;
        loop {
            let mut best = f64::INFINITY;
            let mut pick = usize::MAX;
            for i in 0..n {
                if !done_r[i] && dist_r[i] < best {
                    best = dist_r[i];
                    pick = i;
                }
            }
            for j in 0..m {
                if !done_c[j] && dist_c[j] < best {
                    best = dist_c[j];
                    pick = n + j;
                }
            }
            if pick == usize::MAX {
                break;
            }
            if pick < n {
                let i = pick;
                done_r[i] = true;
                let row = &cost[i * m..(i + 1) * m];
                for j in 0..m {
                    let c = row[j];
                    if done_c[j] || !c.is_finite() {
                        continue;
                    }
                    let nd = best + (c + pot_r[i] - pot_c[j]).max(0.0);
                    if nd < dist_c[j] {
                        dist_c[j] = nd;
                        prev_c[j] = i;
                    }
                }
            } else {
                let j = pick - n;
                done_c[j] = true;
                if demand[j] > EPS {
                    target = j;
                    reach = best;
                    break;
                }
                for i in 0..n {
                    if done_r[i] || flow[i * m + j] <= EPS {
                        continue;
                    }
                    let nd = best + (pot_c[j] - cost[i * m + j] - pot_r[i]).max(0.0);
                    if nd < dist_r[i] {
                        dist_r[i] = nd;
                        prev_r[i] = j;
                    }
                }
            }
        }
        if target == usize::MAX {
            if left <= 1e-9 {
                break;
            }
            return Err(Error::Infeasible("no augmenting path; forbidden cells block all mass".into()));
        }
        for i in 0..n {
            pot_r[i] += dist_r[i].min(reach);
        }
        for j in 0..m {
            pot_c[j] += dist_c[j].min(reach);
        }
        // trace back and find the bottleneck
        let mut bottleneck = demand[target];
        let mut j = target;
        let src;
        loop {
            let i = prev_c[j];
            if prev_r[i] == usize::MAX {
                src = i;
                break;
            }
            let jb = prev_r[i];
            bottleneck = bottleneck.min(flow[i * m + jb]);
            j = jb;
        }
        bottleneck = bottleneck.min(supply[src]);
        let mut j = target;
        loop {
            let i = prev_c[j];
            flow[i * m + j] += bottleneck;
            if prev_r[i] == usize::MAX {
                break;
            }
            let jb = prev_r[i];
            let f = &mut flow[i * m + jb];
            *f -= bottleneck;
            if *f <= EPS {
                *f = 0.0;
            }
            j = jb;
        }
        supply[src] -= bottleneck;
        if supply[src] <= EPS {
            supply[src] = 0.0;
        }
        demand[target] -= bottleneck;
        if demand[target] <= EPS {
            demand[target] = 0.0;
        }
    }
    Ok(flow)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_unbalanced_rows() {
        let a = [0.5, 0.5];
        let b = [0.25, 0.75];
        let c = [0.0, 1.0, 2.0, 0.0];
        let f = min_cost_transport(&a, &b, &c).unwrap();
        let total: f64 = f.iter().zip(&c).map(|(x, y)| x * y).sum();
        assert!((total - 0.25).abs() < 1e-15, "{total}");
    }

    #[test]
    fn forbidden_cells() {
        let inf = f64::INFINITY;
        let f = min_cost_transport(&[0.5, 0.5], &[0.5, 0.5], &[inf, 1.0, 1.0, inf]).unwrap();
        assert_eq!(f, vec![0.0, 0.5, 0.5, 0.0]);
        assert!(min_cost_transport(&[0.5, 0.5], &[0.5, 0.5], &[inf, inf, 1.0, 1.0]).is_err());
    }
}
