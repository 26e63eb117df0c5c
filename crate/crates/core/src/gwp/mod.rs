//! Measure-aware field distances: Gromov-Prokhorov through eps-couplings and
//! Gromov-Wasserstein of every order `p` through coupling optimization.
//!
//! The Gromov-Wasserstein objective of a coupling is the larger of half the
//! `p`-mean distance gap over pairs of pairs and the `p`-mean value gap; it
//! is not a weighted sum of the two.

mod finite;
mod gp;
mod infinite;

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::field::check_marginals;
use crate::transport::{wasserstein_inf, wasserstein_p};
use crate::{seeds, Coupling, Error, MMField, Matrix, MetricField, Result, Status};

pub use finite::{gw_relaxation_lower, GwOptions};
pub use gp::{gp_distance, GPResult};
pub use infinite::DEFAULT_GW_INF_SIZE_GATE;

/// Coupling mass below which an entry is outside the support when `p = inf`.
pub const SUPPORT_TOL: f64 = 1e-12;

/// Search budget of the combinatorial solvers when none is given.
pub const DEFAULT_BUDGET: u64 = 5_000_000;

/// Default number of random restarts for `p < inf`.
pub const DEFAULT_RESTARTS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn finite(self) -> Option<f64> {
        match self {
            Exponent::Finite(p) => Some(p),
            Exponent::Infinite => None,
        }
    }

    pub fn validate(self) -> Result<Self> {
        match self {
            Exponent::Finite(p) if !(p >= 1.0) || !p.is_finite() => {
                Err(Error::InvalidParameter(format!("p = {p} must be >= 1")))
            }
            e => Ok(e),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

impl serde::Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinite => s.serialize_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "Inf" | "∞" => Ok(Exponent::Infinite),
            t => t
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("p: {e}")))
                .and_then(|p| Exponent::Finite(p).validate()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GWObjectiveTerms {
    pub m_term: f64,
    pub d_term: f64,
    pub value: f64,
    pub p: Exponent,
}

#[derive(Clone, Debug)]
pub struct GWResult {
    /// Best objective found (the exact value when `status` is `Exact`).
    pub value: f64,
    pub coupling: Coupling,
    pub status: Status,
    pub lower: f64,
    pub upper: f64,
    /// Lower bound from the two relaxations, reported in every mode.
    pub relaxation_lower: f64,
    pub p: Exponent,
}

/// Objective terms of a coupling.
pub fn gw_objective(x: &MMField, y: &MMField, mu: &Coupling, p: Exponent, tol_mass: f64) -> Result<GWObjectiveTerms> {
    p.validate()?;
    check_marginals(mu.matrix(), x.weights(), y.weights(), tol_mass)?;
    x.base().same_space(y.base())?;
    let (bx, by) = (x.base(), y.base());
    let pm = mu.matrix();
    let cells: Vec<(usize, usize, f64)> = (0..x.n())
        .flat_map(|i| (0..y.n()).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, pm[(i, j)]))
        .filter(|c| c.2 > 0.0)
        .collect();
    let gap = |a: &(usize, usize, f64), b: &(usize, usize, f64)| (bx.dist(a.0, b.0) - by.dist(a.1, b.1)).abs();
    let (m_term, d_term) = match p {
        Exponent::Infinite => {
            let supp: Vec<_> = cells.iter().filter(|c| c.2 > SUPPORT_TOL).collect();
            let mut mt: f64 = 0.0;
            let mut dt: f64 = 0.0;
            for a in &supp {
                dt = dt.max(bx.bdist(a.0, by, a.1));
                for b in &supp {
                    mt = mt.max(gap(a, b));
                }
            }
            (mt, dt)
        }
        Exponent::Finite(p) => {
            let mut mmax: f64 = 0.0;
            let mut dmax: f64 = 0.0;
            for a in &cells {
                dmax = dmax.max(bx.bdist(a.0, by, a.1));
                for b in &cells {
                    mmax = mmax.max(gap(a, b));
                }
            }
            let mut ms = 0.0;
            let mut ds = 0.0;
            for a in &cells {
                if dmax > 0.0 {
                    ds += a.2 * (bx.bdist(a.0, by, a.1) / dmax).powf(p);
                }
                if mmax > 0.0 {
                    for b in &cells {
                        ms += a.2 * b.2 * (gap(a, b) / mmax).powf(p);
                    }
                }
            }
            (mmax * ms.powf(1.0 / p), dmax * ds.powf(1.0 / p))
        }
    };
    Ok(GWObjectiveTerms {
        m_term,
        d_term,
        value: (0.5 * m_term).max(d_term),
        p,
    })
}

/// Gromov-Wasserstein distance of order `p`.
///
/// Finite `p`: global search when both supports have at most four points
/// (status `Exact`), multi-start local search otherwise (status `Local`).
/// `p = inf`: exact combinatorial search within the size gate and budget,
/// bounds otherwise.
pub fn gw_solve(x: &MMField, y: &MMField, p: Exponent, opts: &GwOptions) -> Result<GWResult> {
    p.validate()?;
    x.base().same_space(y.base())?;
    match p {
        Exponent::Finite(p) => finite::solve(x, y, p, opts),
        Exponent::Infinite => infinite::solve(x, y, opts),
    }
}

/// Sup statistic over `n_seq` pairs drawn i.i.d. from `coupling`:
/// `max(sup_ij gap / 2, sup_i d_B)`.
pub fn gw_inf_from_coupling_samples(x: &MMField, y: &MMField, coupling: &Coupling, n_seq: usize, seed: u64) -> f64 {
    let pm = coupling.matrix();
    let cells: Vec<(usize, usize, f64)> = (0..x.n())
        .flat_map(|i| (0..y.n()).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, pm[(i, j)]))
        .filter(|c| c.2 > 0.0)
        .collect();
    let total: f64 = cells.iter().map(|c| c.2).sum();
    let mut rng = seeds::rng(seed, &[0x5E9]);
    let draws: Vec<(usize, usize)> = (0..n_seq)
        .map(|_| {
            let mut u = rng.gen::<f64>() * total;
            for c in &cells {
                if u < c.2 {
                    return (c.0, c.1);
                }
                u -= c.2;
            }
            let c = cells.last().unwrap();
            (c.0, c.1)
        })
        .collect();
    let (bx, by) = (x.base(), y.base());
    let mut best: f64 = 0.0;
    for (k, &(i, j)) in draws.iter().enumerate() {
        best = best.max(bx.bdist(i, by, j));
        for &(a, b) in &draws[k + 1..] {
            best = best.max(0.5 * (bx.dist(i, a) - by.dist(j, b)).abs());
        }
    }
    best
}

/// Estimate of `d_GW,inf` from coupled i.i.d. sequences driven by the best
/// coupling `gw_solve(inf)` finds.
pub fn gw_inf_from_sequences(x: &MMField, y: &MMField, n_seq: usize, seed: u64) -> Result<f64> {
    let best = gw_solve(x, y, Exponent::Infinite, &GwOptions::default())?;
    Ok(gw_inf_from_coupling_samples(x, y, &best.coupling, n_seq, seed))
}

/// `W_p` (or `W_inf`) between the pushforwards of the two measures into `z`
/// along isometric field embeddings.
pub fn gw_embedding_upper(
    x: &MMField,
    y: &MMField,
    z: &MetricField,
    iota_x: &[usize],
    iota_y: &[usize],
    p: Exponent,
    tol_metric: f64,
) -> Result<f64> {
    p.validate()?;
    check_isometric(x.base(), z, iota_x, tol_metric)?;
    check_isometric(y.base(), z, iota_y, tol_metric)?;
    let mut a = vec![0.0; z.n()];
    let mut b = vec![0.0; z.n()];
    for (i, &k) in iota_x.iter().enumerate() {
        a[k] += x.weights()[i];
    }
    for (j, &k) in iota_y.iter().enumerate() {
        b[k] += y.weights()[j];
    }
    match p {
        Exponent::Finite(p) => Ok(wasserstein_p(&a, &b, z.d(), p)?.value),
        Exponent::Infinite => Ok(wasserstein_inf(&a, &b, z.d(), 1e-9)?.value),
    }
}

fn check_isometric(x: &MetricField, z: &MetricField, map: &[usize], tol: f64) -> Result<()> {
    x.same_space(z)?;
    if map.len() != x.n() {
        return Err(Error::NotIsometric("map length differs from point count".into()));
    }
    for &k in map {
        if k >= z.n() {
            return Err(Error::IndexOutOfRange { index: k, len: z.n() });
        }
    }
    for i in 0..x.n() {
        if x.bdist(i, z, map[i]) > tol {
            return Err(Error::NotIsometric(format!("value of point {i} not preserved")));
        }
        for j in 0..x.n() {
            if (x.dist(i, j) - z.dist(map[i], map[j])).abs() > tol {
                return Err(Error::NotIsometric(format!("distance ({i}, {j}) not preserved")));
            }
        }
    }
    Ok(())
}

/// Embed a coupling of the supports back into the full index sets.
pub(crate) fn expand(n: usize, m: usize, xs: &[usize], ys: &[usize], plan: &[f64]) -> Coupling {
    let mut full = Matrix::zeros(n, m);
    for (a, &i) in xs.iter().enumerate() {
        for (b, &j) in ys.iter().enumerate() {
            full[(i, j)] = plan[a * ys.len() + b];
        }
    }
    Coupling::from_matrix_unchecked(full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{BPoint, TargetSpace};
    use std::sync::Arc;

    fn mm(ds: &[f64], vals: &[f64]) -> MMField {
        MMField::uniform(
            MetricField::new(
                Matrix::from_lower_triangle(vals.len(), ds).unwrap(),
                vals.iter().map(|&v| BPoint::Coords(vec![v])).collect(),
                Arc::new(TargetSpace::euclidean(1)),
            )
            .unwrap(),
        )
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinite);
        assert_eq!("2".parse::<Exponent>().unwrap(), Exponent::Finite(2.0));
        assert!("0.5".parse::<Exponent>().is_err());
    }

    #[test]
    fn objective_examples() {
        let x = mm(&[1.0], &[0.0, 0.0]);
        let y = mm(&[2.0], &[0.0, 0.0]);
        let diag = Coupling::new(Matrix::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]), &[0.5, 0.5], &[0.5, 0.5], 1e-9).unwrap();
        let t = gw_objective(&x, &x, &diag, Exponent::Finite(2.0), 1e-9).unwrap();
        assert_eq!(t.value, 0.0);
        let t = gw_objective(&x, &y, &diag, Exponent::Infinite, 1e-9).unwrap();
        assert_eq!(t.value, 0.5);
        let a = mm(&[], &[0.0]);
        let b = mm(&[], &[0.25]);
        let one = Coupling::new(Matrix::from_rows(&[vec![1.0]]), &[1.0], &[1.0], 1e-9).unwrap();
        for p in [Exponent::Finite(1.0), Exponent::Finite(3.0), Exponent::Infinite] {
            let t = gw_objective(&a, &b, &one, p, 1e-9).unwrap();
            assert_eq!((t.m_term, t.d_term, t.value), (0.0, 0.25, 0.25));
        }
    }

    #[test]
    fn objective_rejects_bad_marginals() {
        let x = mm(&[1.0], &[0.0, 0.0]);
        let bad = Coupling::independent(&[0.7, 0.3], &[0.5, 0.5]);
        assert!(matches!(
            gw_objective(&x, &x, &bad, Exponent::Finite(1.0), 1e-9),
            Err(Error::MarginalMismatch(_))
        ));
    }
}
