//! Augmented distance matrices and their empirical laws.
//!
//! An ADM of size `n` is the distance matrix of an `n`-tuple of points
//! together with the values at those points. Sampling tuples i.i.d. from a
//! field's measure gives an empirical curvature distribution; transport
//! between two such distributions under `rho_n` estimates how far apart the
//! fields are.

use std::sync::Arc;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rayon::prelude::*;
use serde::Serialize;

use crate::gwp::{gw_solve, Exponent, GwOptions};
use crate::transport::{wasserstein_inf, wasserstein_p};
use crate::{seeds, BPoint, Error, MMField, Matrix, MetricField, Result, TargetSpace};

/// Seed replicates per `n` in the convergence experiment.
pub const DEFAULT_REPLICATES: usize = 8;

/// Default sample count per empirical distribution.
pub const DEFAULT_SAMPLES: usize = 200;

/// Default permutation count of the reconstruction test.
pub const DEFAULT_PERMUTATIONS: usize = 19;

#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedDistanceMatrix {
    r: Matrix,
    b: Vec<BPoint>,
}

impl AugmentedDistanceMatrix {
    pub fn new(r: Matrix, b: Vec<BPoint>) -> Result<Self> {
        if !r.is_square() || r.rows() != b.len() {
            return Err(Error::Shape(format!(
                "{}x{} matrix with {} values",
                r.rows(),
                r.cols(),
                b.len()
            )));
        }
        Ok(AugmentedDistanceMatrix { r, b })
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }

    pub fn b(&self) -> &[BPoint] {
        &self.b
    }

    /// Pseudo-metric axioms of the matrix part.
    pub fn check(&self, tol: f64) -> Result<()> {
        let n = self.n();
        for i in 0..n {
            if self.r[(i, i)] != 0.0 {
                return Err(Error::InvalidField(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = self.r[(i, j)];
                if !(v >= 0.0) || v != self.r[(j, i)] {
                    return Err(Error::InvalidField(format!("entry ({i}, {j}) negative or asymmetric")));
                }
                for k in 0..n {
                    if self.r[(i, k)] > v + self.r[(j, k)] + tol {
                        return Err(Error::InvalidField(format!("triangle ({i}, {j}, {k})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// The ADM of the first `k` points of the tuple.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        if k > self.n() {
            return Err(Error::InvalidParameter(format!("cannot truncate size {} to {k}", self.n())));
        }
        Ok(AugmentedDistanceMatrix {
            r: Matrix::from_fn(k, k, |i, j| self.r[(i, j)]),
            b: self.b[..k].to_vec(),
        })
    }
}

/// ADM of the tuple `idx` (repeats allowed).
pub fn adm_of(x: &MetricField, idx: &[usize]) -> Result<AugmentedDistanceMatrix> {
    if let Some(&bad) = idx.iter().find(|&&i| i >= x.n()) {
        return Err(Error::IndexOutOfRange { index: bad, len: x.n() });
    }
    Ok(AugmentedDistanceMatrix {
        r: Matrix::from_fn(idx.len(), idx.len(), |i, j| x.dist(idx[i], idx[j])),
        b: idx.iter().map(|&i| x.value(i).clone()).collect(),
    })
}

/// `max(sup |r - r'| / 2, sup d_B(b, b'))`.
pub fn rho_n(space: &TargetSpace, a: &AugmentedDistanceMatrix, a2: &AugmentedDistanceMatrix) -> Result<f64> {
    if a.n() != a2.n() {
        return Err(Error::Shape(format!("ADM sizes {} and {}", a.n(), a2.n())));
    }
    Ok(rho_unchecked(space, a, a2))
}

fn rho_unchecked(space: &TargetSpace, a: &AugmentedDistanceMatrix, a2: &AugmentedDistanceMatrix) -> f64 {
    let gap = a
        .r
        .as_slice()
        .iter()
        .zip(a2.r.as_slice())
        .fold(0.0f64, |s, (u, v)| s.max((u - v).abs()));
    let vals = a.b.iter().zip(&a2.b).fold(0.0f64, |s, (u, v)| s.max(space.dist(u, v)));
    (0.5 * gap).max(vals)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub field_id: String,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
}

/// Uniformly weighted multiset of same-size ADMs.
#[derive(Clone, Debug)]
pub struct EmpiricalADMDistribution {
    samples: Vec<AugmentedDistanceMatrix>,
    space: Arc<TargetSpace>,
    pub provenance: Provenance,
}

impl EmpiricalADMDistribution {
    pub fn new(samples: Vec<AugmentedDistanceMatrix>, space: Arc<TargetSpace>, provenance: Provenance) -> Result<Self> {
        let Some(first) = samples.first() else {
            return Err(Error::Empty("ADM samples"));
        };
        if samples.iter().any(|s| s.n() != first.n()) {
            return Err(Error::Shape("ADM samples differ in size".into()));
        }
        Ok(EmpiricalADMDistribution {
            samples,
            space,
            provenance,
        })
    }

    pub fn samples(&self) -> &[AugmentedDistanceMatrix] {
        &self.samples
    }

    pub fn space(&self) -> &Arc<TargetSpace> {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.samples[0].n()
    }

    pub fn m(&self) -> usize {
        self.samples.len()
    }

    /// Every sample truncated to its first `k` points.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        let samples = self.samples.iter().map(|s| s.truncate(k)).collect::<Result<Vec<_>>>()?;
        let mut provenance = self.provenance.clone();
        provenance.n = k;
        EmpiricalADMDistribution::new(samples, self.space.clone(), provenance)
    }
}

fn draw_tuples(x: &MMField, n: usize, m: usize, rng: &mut impl Rng) -> Result<Vec<Vec<usize>>> {
    if x.support().is_empty() {
        return Err(Error::Empty("support"));
    }
    let dist = WeightedIndex::new(x.weights()).map_err(|e| Error::InvalidParameter(format!("weights: {e}")))?;
    Ok((0..m).map(|_| (0..n).map(|_| dist.sample(rng)).collect()).collect())
}

/// `m` ADMs of i.i.d. `n`-tuples drawn from the field's measure.
pub fn sample_adm(x: &MMField, n: usize, m: usize, seed: u64) -> Result<EmpiricalADMDistribution> {
    sample_adm_stream(x, n, m, seed, &[])
}

fn sample_adm_stream(x: &MMField, n: usize, m: usize, seed: u64, tags: &[u64]) -> Result<EmpiricalADMDistribution> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("n and m must be at least 1".into()));
    }
    let mut rng = seeds::rng(seed, tags);
    let tuples = draw_tuples(x, n, m, &mut rng)?;
    let samples = tuples.iter().map(|t| adm_of(x.base(), t)).collect::<Result<Vec<_>>>()?;
    EmpiricalADMDistribution::new(
        samples,
        x.base().space().clone(),
        Provenance {
            field_id: String::from("X"),
            n,
            m,
            seed: seeds::derive(seed, tags),
        },
    )
}

/// Cost matrix of `rho_n` between the samples of two distributions.
pub fn adm_cost_matrix(d1: &EmpiricalADMDistribution, d2: &EmpiricalADMDistribution) -> Result<Matrix> {
    if d1.n() != d2.n() {
        return Err(Error::Shape(format!("ADM sizes {} and {}", d1.n(), d2.n())));
    }
    if d1.space != d2.space && *d1.space != *d2.space {
        return Err(Error::SpaceMismatch("ADM distributions over different target spaces".into()));
    }
    let space = &*d1.space;
    let rows: Vec<Vec<f64>> = d1
        .samples
        .par_iter()
        .map(|a| d2.samples.iter().map(|b| rho_unchecked(space, a, b)).collect())
        .collect();
    Ok(Matrix::from_rows(&rows))
}

/// Transport distance of order `p` between two empirical distributions
/// under `rho_n`.
pub fn adm_wasserstein(d1: &EmpiricalADMDistribution, d2: &EmpiricalADMDistribution, p: Exponent) -> Result<f64> {
    let c = adm_cost_matrix(d1, d2)?;
    transport_value(&c, p)
}

fn transport_value(c: &Matrix, p: Exponent) -> Result<f64> {
    let a = vec![1.0 / c.rows() as f64; c.rows()];
    let b = vec![1.0 / c.cols() as f64; c.cols()];
    match p.validate()? {
        Exponent::Finite(p) => Ok(wasserstein_p(&a, &b, c, p)?.value),
        Exponent::Infinite => Ok(wasserstein_inf(&a, &b, c, 1e-9)?.value),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergencePoint {
    pub n: usize,
    pub m: usize,
    pub p: Exponent,
    pub estimate: f64,
    pub stderr: f64,
    pub seed: u64,
    pub reference_lower: f64,
    pub reference_upper: f64,
}

fn mean_stderr(v: &[f64]) -> (f64, f64) {
    let k = v.len() as f64;
    let mean = v.iter().sum::<f64>() / k;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Empirical-vs-empirical estimates of the curvature-distribution distance
/// for every `n` in `n_list`, averaged over [`DEFAULT_REPLICATES`] seeded
/// replicates, with the `p = inf` Gromov-Wasserstein value (or its bounds)
/// as reference.
pub fn gw_convergence_experiment(
    x: &MMField,
    y: &MMField,
    p: Exponent,
    n_list: &[usize],
    m: usize,
    seed: u64,
) -> Result<Vec<ConvergencePoint>> {
    gw_convergence_experiment_with(x, y, p, n_list, m, DEFAULT_REPLICATES, seed)
}

pub fn gw_convergence_experiment_with(
    x: &MMField,
    y: &MMField,
    p: Exponent,
    n_list: &[usize],
    m: usize,
    replicates: usize,
    seed: u64,
) -> Result<Vec<ConvergencePoint>> {
    p.validate()?;
    x.base().same_space(y.base())?;
    if replicates == 0 {
        return Err(Error::InvalidParameter("at least one replicate".into()));
    }
    let reference = gw_solve(x, y, Exponent::Infinite, &GwOptions { seed, ..GwOptions::default() })?;
    let mut out = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let est: Vec<f64> = (0..replicates)
            .into_par_iter()
            .map(|k| {
                let dx = sample_adm_stream(x, n, m, seed, &[n as u64, k as u64, 0])?;
                let dy = sample_adm_stream(y, n, m, seed, &[n as u64, k as u64, 1])?;
                adm_wasserstein(&dx, &dy, p)
            })
            .collect::<Result<Vec<_>>>()?;
        let (estimate, stderr) = mean_stderr(&est);
        out.push(ConvergencePoint {
            n,
            m,
            p,
            estimate,
            stderr,
            seed,
            reference_lower: reference.lower,
            reference_upper: reference.upper,
        });
    }
    Ok(out)
}

/// CSV rendering of a convergence curve.
pub fn convergence_csv(points: &[ConvergencePoint]) -> String {
    let mut s = String::from("n,m,p,estimate,stderr,seed,reference_lower,reference_upper\n");
    for q in points {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            q.n, q.m, q.p, q.estimate, q.stderr, q.seed, q.reference_lower, q.reference_upper
        ));
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReconstructionReport {
    pub n: usize,
    pub m: usize,
    /// `W_1` between the two empirical ADM distributions.
    pub statistic: f64,
    /// `(1 + #{permuted >= observed}) / (1 + permutations)`.
    pub p_value: f64,
    pub permutations: usize,
    pub seed: u64,
}

/// Two-sample comparison of curvature distributions with a permutation
/// p-value on the pooled samples.
pub fn reconstruction_test(x: &MMField, y: &MMField, n: usize, m: usize, seed: u64) -> Result<ReconstructionReport> {
    reconstruction_test_with(x, y, n, m, DEFAULT_PERMUTATIONS, seed)
}

pub fn reconstruction_test_with(
    x: &MMField,
    y: &MMField,
    n: usize,
    m: usize,
    permutations: usize,
    seed: u64,
) -> Result<ReconstructionReport> {
    x.base().same_space(y.base())?;
    let dx = sample_adm_stream(x, n, m, seed, &[0])?;
    let dy = sample_adm_stream(y, n, m, seed, &[1])?;
    let pooled: Vec<&AugmentedDistanceMatrix> = dx.samples.iter().chain(&dy.samples).collect();
    let space = &**x.base().space();
    let full: Vec<Vec<f64>> = pooled
        .par_iter()
        .map(|a| pooled.iter().map(|b| rho_unchecked(space, a, b)).collect())
        .collect();
    let stat_of = |left: &[usize], right: &[usize]| -> Result<f64> {
        let c = Matrix::from_fn(left.len(), right.len(), |i, j| full[left[i]][right[j]]);
        transport_value(&c, Exponent::Finite(1.0))
    };
    let idx: Vec<usize> = (0..2 * m).collect();
    let statistic = stat_of(&idx[..m], &idx[m..])?;
    let perm_stats: Vec<f64> = (0..permutations)
        .into_par_iter()
        .map(|k| {
            let mut order = idx.clone();
            order.shuffle(&mut seeds::rng(seed, &[2, k as u64]));
            stat_of(&order[..m], &order[m..])
        })
        .collect::<Result<Vec<_>>>()?;
    let ge = perm_stats.iter().filter(|&&s| s >= statistic).count();
    Ok(ReconstructionReport {
        n,
        m,
        statistic,
        p_value: (1 + ge) as f64 / (1 + permutations) as f64,
        permutations,
        seed,
    })
}

/// Fraction of `trials` i.i.d. `n`-tuples whose empirical measure lies within
/// `eps` of the field's measure in `W_p` over `d_X`.
pub fn uniformity_mass(x: &MMField, n: usize, eps: f64, p: Exponent, trials: usize, seed: u64) -> Result<f64> {
    p.validate()?;
    if n == 0 || trials == 0 {
        return Err(Error::InvalidParameter("n and trials must be at least 1".into()));
    }
    let hits = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = seeds::rng(seed, &[3, k as u64]);
            let tuple = draw_tuples(x, n, 1, &mut rng)?.pop().unwrap();
            let mut emp = vec![0.0; x.n()];
            for i in tuple {
                emp[i] += 1.0 / n as f64;
            }
            let d = match p {
                Exponent::Finite(p) => wasserstein_p(&emp, x.weights(), x.base().d(), p)?.value,
                Exponent::Infinite => wasserstein_inf(&emp, x.weights(), x.base().d(), 1e-9)?.value,
            };
            Ok(usize::from(d <= eps))
        })
        .collect::<Result<Vec<usize>>>()?
        .into_iter()
        .sum::<usize>();
    Ok(hits as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(vals: &[f64], w: &[f64]) -> MMField {
        let pts: Vec<Vec<f64>> = (0..vals.len()).map(|i| vec![i as f64]).collect();
        let base = MetricField::from_points(
            pts,
            vals.iter().map(|&v| BPoint::Coords(vec![v])).collect(),
            Arc::new(TargetSpace::euclidean(1)),
        )
        .unwrap();
        MMField::new(base, w.to_vec()).unwrap()
    }

    #[test]
    fn rho_examples() {
        let sp = TargetSpace::euclidean(1);
        let a = AugmentedDistanceMatrix::new(
            Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]),
            vec![BPoint::Coords(vec![0.0]), BPoint::Coords(vec![0.0])],
        )
        .unwrap();
        assert_eq!(rho_n(&sp, &a, &a).unwrap(), 0.0);
        let mut moved = a.clone();
        moved.b[1] = BPoint::Coords(vec![0.25]);
        assert_eq!(rho_n(&sp, &a, &moved).unwrap(), 0.25);
        let wide = AugmentedDistanceMatrix::new(Matrix::from_rows(&[vec![0.0, 4.0], vec![4.0, 0.0]]), a.b.clone()).unwrap();
        assert_eq!(rho_n(&sp, &a, &wide).unwrap(), 1.5);
    }

    #[test]
    fn repeated_index_gives_zero_block() {
        let x = line(&[0.0, 0.5], &[0.5, 0.5]);
        let a = adm_of(x.base(), &[1, 1]).unwrap();
        assert_eq!(a.r().as_slice(), &[0.0; 4]);
        assert!(a.check(1e-9).is_ok());
    }

    #[test]
    fn sampling_is_reproducible() {
        let x = line(&[0.0, 0.5, 0.2], &[0.2, 0.3, 0.5]);
        let a = sample_adm(&x, 3, 20, 7).unwrap();
        let b = sample_adm(&x, 3, 20, 7).unwrap();
        assert_eq!(a.samples(), b.samples());
    }

    #[test]
    fn singleton_distributions() {
        let x = line(&[0.0], &[1.0]);
        let y = line(&[0.3], &[1.0]);
        let dx = sample_adm(&x, 4, 5, 0).unwrap();
        let dy = sample_adm(&y, 4, 6, 1).unwrap();
        for p in [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Infinite] {
            assert!((adm_wasserstein(&dx, &dy, p).unwrap() - 0.3).abs() < 1e-12);
        }
        assert_eq!(uniformity_mass(&x, 3, 0.01, Exponent::Finite(1.0), 5, 0).unwrap(), 1.0);
    }
}
