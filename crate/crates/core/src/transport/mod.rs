//! Exact discrete optimal transport: `W_p`, bottleneck `W_inf`, Prokhorov
//! distance and the max-flow feasibility kernel shared by the distance
//! solvers.
//!
//! Forbidden pairs are encoded as `f64::INFINITY` costs. Infinite results are
//! written as the string `"inf"` by the JSON layer.

mod assignment;
mod flow;
mod mcf;

use crate::field::Coupling;
use crate::{Error, Matrix, Result};

pub(crate) use flow::bipartite_max_flow;

/// Grid denominator for the Prokhorov candidate lattice.
pub const PROKHOROV_GRID: usize = 10_000;

/// A probability vector.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure(Vec<f64>);

impl DiscreteMeasure {
    pub fn new(weights: Vec<f64>, tol_mass: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty("measure"));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter("measure weights must be finite and nonnegative".into()));
        }
        let s: f64 = weights.iter().sum();
        if (s - 1.0).abs() > tol_mass {
            return Err(Error::InvalidParameter(format!("measure sums to {s}")));
        }
        Ok(DiscreteMeasure(weights))
    }

    pub fn uniform(n: usize) -> Self {
        DiscreteMeasure(vec![1.0 / n as f64; n])
    }

    pub fn dirac(n: usize, at: usize) -> Self {
        let mut w = vec![0.0; n];
        w[at] = 1.0;
        DiscreteMeasure(w)
    }
}

impl std::ops::Deref for DiscreteMeasure {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Clone, Debug)]
pub struct TransportResult {
    pub value: f64,
    pub coupling: Coupling,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProkhorovResult {
    pub value: f64,
    /// Spacing of the grid part of the candidate lattice.
    pub resolution: f64,
}

fn check_shapes(mu: &[f64], nu: &[f64], c: &Matrix) -> Result<()> {
    if c.rows() != mu.len() || c.cols() != nu.len() {
        return Err(Error::Shape(format!(
            "cost is {}x{}, measures have {} and {} atoms",
            c.rows(),
            c.cols(),
            mu.len(),
            nu.len()
        )));
    }
    if c.as_slice().iter().any(|v| v.is_nan() || *v < 0.0) {
        return Err(Error::InvalidParameter("costs must be nonnegative and not NaN".into()));
    }
    Ok(())
}

fn is_uniform(w: &[f64]) -> bool {
    let u = 1.0 / w.len() as f64;
    w.iter().all(|&x| (x - u).abs() <= 1e-12)
}

/// `(sum C^p dP)^(1/p)` minimized over couplings, with an optimal coupling.
pub fn wasserstein_p(mu: &[f64], nu: &[f64], c: &Matrix, p: f64) -> Result<TransportResult> {
    check_shapes(mu, nu, c)?;
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("p = {p} must be finite and >= 1")));
    }
    let (n, m) = (mu.len(), nu.len());
    let cmax = c
        .as_slice()
        .iter()
        .cloned()
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let scale = if cmax > 0.0 { cmax } else { 1.0 };
    // costs scaled into [0, 1] before powering so large p cannot overflow
    let powered: Vec<f64> = c
        .as_slice()
        .iter()
        .map(|&v| if v.is_finite() { (v / scale).powf(p) } else { f64::INFINITY })
        .collect();
    let plan = if n == m && is_uniform(mu) && is_uniform(nu) && powered.iter().all(|v| v.is_finite()) {
        let perm = assignment::hungarian(n, &powered);
        let mut plan = vec![0.0; n * n];
        for (i, j) in perm.into_iter().enumerate() {
            plan[i * n + j] = mu[i];
        }
        plan
    } else {
        mcf::min_cost_transport(mu, nu, &powered)?
    };
    let total: f64 = plan
        .iter()
        .zip(&powered)
        .filter(|(f, _)| **f > 0.0)
        .map(|(f, c)| f * c)
        .sum();
    Ok(TransportResult {
        value: scale * total.max(0.0).powf(1.0 / p),
        coupling: Coupling::from_matrix_unchecked(Matrix::from_vec(n, m, plan)),
    })
}

/// Maximum of `P(allowed)` over couplings `P` of `mu` and `nu`.
pub fn max_mass_on(mu: &[f64], nu: &[f64], allowed: &[bool]) -> Result<f64> {
    if allowed.len() != mu.len() * nu.len() {
        return Err(Error::Shape("mask size differs from n*m".into()));
    }
    let m = nu.len();
    Ok(bipartite_max_flow(mu, nu, |i, j| allowed[i * m + j]).0.min(1.0))
}

/// Complete a partial coupling (a max flow) to a full coupling by spreading
/// the unmatched mass as an independent product.
pub(crate) fn complete_partial(mu: &[f64], nu: &[f64], mut plan: Vec<f64>) -> Vec<f64> {
    let (n, m) = (mu.len(), nu.len());
    let mut ra: Vec<f64> = mu.to_vec();
    let mut rb: Vec<f64> = nu.to_vec();
    for i in 0..n {
        for j in 0..m {
            ra[i] -= plan[i * m + j];
            rb[j] -= plan[i * m + j];
        }
    }
    ra.iter_mut().for_each(|v| *v = v.max(0.0));
    rb.iter_mut().for_each(|v| *v = v.max(0.0));
    let left: f64 = ra.iter().sum();
    if left > 0.0 {
        let lb: f64 = rb.iter().sum();
        if lb > 0.0 {
            for i in 0..n {
                for j in 0..m {
                    plan[i * m + j] += ra[i] * rb[j] / lb;
                }
            }
        }
    }
    plan
}

fn sorted_distinct_finite(c: &Matrix) -> Vec<f64> {
    let mut v: Vec<f64> = c.as_slice().iter().cloned().filter(|x| x.is_finite()).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Least threshold `T` such that some coupling is supported on `C <= T`,
/// with a witness coupling.
pub fn wasserstein_inf(mu: &[f64], nu: &[f64], c: &Matrix, tol_mass: f64) -> Result<TransportResult> {
    check_shapes(mu, nu, c)?;
    let cands = sorted_distinct_finite(c);
    let m = nu.len();
    let feasible = |t: f64| bipartite_max_flow(mu, nu, |i, j| c[(i, j)] <= t);
    if cands.is_empty() || feasible(*cands.last().unwrap()).0 < 1.0 - tol_mass {
        return Err(Error::Infeasible("no coupling avoids forbidden cells".into()));
    }
    let (mut lo, mut hi) = (0usize, cands.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(cands[mid]).0 >= 1.0 - tol_mass {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let t = cands[lo];
    let (_, plan) = feasible(t);
    let plan = complete_partial(mu, nu, plan);
    Ok(TransportResult {
        value: t,
        coupling: Coupling::from_matrix_unchecked(Matrix::from_vec(mu.len(), m, plan)),
    })
}

/// Least `eps` on the candidate lattice (distinct costs `<= 1` and the grid
/// `k / 10^4`) such that a coupling puts mass `>= 1 - eps` on pairs with cost
/// `<= eps`. Never exceeds 1.
pub fn prokhorov(mu: &[f64], nu: &[f64], c: &Matrix, tol_mass: f64) -> Result<ProkhorovResult> {
    check_shapes(mu, nu, c)?;
    let mut cands: Vec<f64> = sorted_distinct_finite(c).into_iter().filter(|&x| x <= 1.0).collect();
    cands.extend((0..=PROKHOROV_GRID).map(|k| k as f64 / PROKHOROV_GRID as f64));
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    let feasible = |e: f64| bipartite_max_flow(mu, nu, |i, j| c[(i, j)] <= e).0 >= 1.0 - e - tol_mass;
    let (mut lo, mut hi) = (0usize, cands.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(cands[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(ProkhorovResult {
        value: cands[lo],
        resolution: 1.0 / PROKHOROV_GRID as f64,
    })
}
