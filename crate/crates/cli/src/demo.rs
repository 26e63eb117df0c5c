//! The two figure scenarios and the perturbations used to exercise the
//! stability bounds on the first.

use rand::Rng;
use serde_json::{json, Value};

use mmfield::filtrations::{
    ball_masses, nbhd_bifiltration, nbhd_trifiltration, simplex_grade, subset, vr_bifiltration, vr_trifiltration,
    AmbientField, Cell, GradedComplex, ParamGrid, TriCaps,
};
use mmfield::generate::{grid_points, plane_field, two_circles, weighted_circle};
use mmfield::svg::render;
use mmfield::{seeds, MMField, MetricField, Result};

use crate::draw::{complex_panel, mask_panel};

/// Figure 1 parameters.
pub const FIG1_R: f64 = 0.8;
pub const FIG1_S: f64 = 0.1;
pub const FIG1_T: f64 = 0.99;
/// Figure 2 parameters.
pub const FIG2_R: f64 = 1.5;
pub const FIG2_S: f64 = 1.0;
pub const FIG2_T: f64 = 0.1;

/// Points per circle in the Figure 1 sample.
pub const FIG1_SAMPLE: usize = 100;

/// Scalar field of the Figure 1 scenario; Lipschitz constant below 0.4.
pub fn fig1_function(x: f64, y: f64) -> f64 {
    0.3 * x.sin() + 0.2 * y
}

/// Ambient field (grid nodes then sample points) with the sample's
/// empirical measure, and the sample indices.
pub fn fig1_ambient(seed: u64, grid_step: f64) -> Result<(MMField, Vec<usize>)> {
    let mut pts = grid_points(-3.0, 3.0, -2.0, 2.0, grid_step);
    let first = pts.len();
    pts.extend(two_circles(FIG1_SAMPLE, 1.0, 1.5, seed));
    let n = pts.len();
    let xs: Vec<usize> = (first..n).collect();
    let field = plane_field(pts, fig1_function)?;
    let mut w = vec![0.0; n];
    for &i in &xs {
        w[i] = 1.0 / xs.len() as f64;
    }
    Ok((MMField::new(field, w)?, xs))
}

fn runs(bits: &[bool]) -> Vec<[usize; 2]> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < bits.len() {
        if bits[i] {
            let s = i;
            while i < bits.len() && bits[i] {
                i += 1;
            }
            out.push([s, i - s]);
        } else {
            i += 1;
        }
    }
    out
}

fn count(bits: &[bool]) -> usize {
    bits.iter().filter(|b| **b).count()
}

fn grid(name: &str, v: &[f64]) -> Result<ParamGrid> {
    ParamGrid::new(name, v.to_vec())
}

pub fn fig1(seed: u64) -> Result<(Value, String)> {
    let (mm, xs) = fig1_ambient(seed, 0.1)?;
    let amb = AmbientField::with_measure(mm.clone());
    let r = ParamGrid::range("r", 0.0, 1.6, 0.1)?;
    let s = grid("s", &[0.0, 0.05, FIG1_S, 0.2, f64::INFINITY])?;
    let t = grid("t", &[0.9, 0.95, FIG1_T, 1.0])?;
    let bi = nbhd_bifiltration(&xs, &amb, &r, &s)?;
    let tri = nbhd_trifiltration(&amb, &r, &s, &t)?;
    let n_r = bi.at_values(&[FIG1_R, f64::INFINITY])?;
    let n_rs = bi.at_values(&[FIG1_R, FIG1_S])?;
    let n_rst = tri.at_values(&[FIG1_R, FIG1_S, FIG1_T])?;
    let ri = r.index_of(FIG1_R).expect("on grid");
    let si = s.index_of(FIG1_S).expect("on grid");
    let sinf = s.len() - 1;
    let masses = ball_masses(&amb, &r, &s)?;
    let n = amb.n();
    let cell_rs = ri * s.len() + si;
    let cell_r = ri * s.len() + sinf;
    let mass_rs = &masses[cell_rs * n..(cell_rs + 1) * n];
    let mass_r = &masses[cell_r * n..(cell_r + 1) * n];
    let min_retained = (0..n)
        .filter(|&y| n_rst[y])
        .map(|y| mass_rs[y])
        .fold(f64::INFINITY, f64::min);
    let meta = json!({
        "figure": "fig1",
        "status": "exact",
        "seed": seed,
        "params": {"r": FIG1_R, "s": FIG1_S, "t": FIG1_T},
        "ambient": {"grid": "[-3,3]x[-2,2] step 0.1", "n": n, "sample": xs.len()},
        "function": "0.3 sin(x) + 0.2 y",
        "counts": {"nbhd_r": count(n_r), "nbhd_rs": count(n_rs), "nbhd_rst": count(n_rst)},
        "inclusions": {
            "nbhd_rst_in_nbhd_rs": subset(n_rst, n_rs),
            "nbhd_rs_in_nbhd_r": subset(n_rs, n_r),
        },
        "strict": {
            "nbhd_rst_in_nbhd_rs": count(n_rst) < count(n_rs),
            "nbhd_rs_in_nbhd_r": count(n_rs) < count(n_r),
        },
        "dense_check": {
            "min_retained_ball_mass": if min_retained.is_finite() { json!(min_retained) } else { json!(null) },
            "required": 1.0 - FIG1_T,
            "pass": min_retained >= 1.0 - FIG1_T - 1e-12 || !min_retained.is_finite(),
        },
        "monotone": {"bifiltration": bi.is_monotone(), "trifiltration": tri.is_monotone()},
        "members": {"nbhd_r": runs(n_r), "nbhd_rs": runs(n_rs), "nbhd_rst": runs(n_rst)},
    });
    let coords = mm.base().coords().expect("plane field has coordinates");
    let svg = render(&[
        mask_panel(&format!("N^r, r = {FIG1_R}"), coords, n_r, Some(mass_r), &xs),
        mask_panel(&format!("N^(r,s), r = {FIG1_R}, s = {FIG1_S}"), coords, n_rs, Some(mass_rs), &xs),
        mask_panel(
            &format!("N^(r,s,t), r = {FIG1_R}, s = {FIG1_S}, t = {FIG1_T}"),
            coords,
            n_rst,
            Some(mass_rs),
            &xs,
        ),
    ]);
    Ok((meta, svg))
}

fn simplex_counts(cells: &[&Cell]) -> Vec<usize> {
    let mut out = Vec::new();
    for c in cells {
        let d = c.dim();
        if out.len() <= d {
            out.resize(d + 1, 0);
        }
        out[d] += 1;
    }
    out
}

pub fn fig2_field() -> Result<MMField> {
    let (pts, w) = weighted_circle(12, 6.0, 0.0);
    let f = plane_field(pts, |x, _| 0.9 * x)?;
    MMField::new(f, w)
}

pub fn fig2(seed: u64) -> Result<(Value, String)> {
    let x = fig2_field()?;
    let bi: GradedComplex = vr_bifiltration(x.base(), 2, FIG2_R, f64::INFINITY)?;
    let vr_r = bi.at(&[FIG2_R, f64::INFINITY]);
    let vr_rs = bi.at(&[FIG2_R, FIG2_S]);
    let in_r: std::collections::HashSet<&Cell> = vr_r.iter().copied().collect();
    let contained = vr_rs.iter().all(|c| in_r.contains(c));
    let caps = TriCaps {
        r_max: FIG2_R,
        s_max: FIG2_S,
        t_max: FIG2_T,
        ..TriCaps::default()
    };
    let tri = vr_trifiltration(&x, 2, &caps)?;
    let vr_rst = tri.at(&[FIG2_R, FIG2_S, FIG2_T]);
    // every subset of every chain is a simplex of the (uncapped) VR^(r,s)
    let mut barycentric = true;
    for c in &vr_rst {
        if let Cell::Chain(ch) = c {
            for a in ch {
                let (d, s2) = simplex_grade(x.base(), a)?;
                barycentric &= d <= FIG2_R && s2 <= FIG2_S;
            }
        }
    }
    let meta = json!({
        "figure": "fig2",
        "status": "exact",
        "seed": seed,
        "params": {"r": FIG2_R, "s": FIG2_S, "t": FIG2_T},
        "field": {"n": x.n(), "points": "unit circle, 12 equally spaced", "weights": "von Mises, kappa 6", "function": "0.9 x"},
        "counts": {
            "vr_r": simplex_counts(&vr_r),
            "vr_rs": simplex_counts(&vr_rs),
            "vr_rst": simplex_counts(&vr_rst),
        },
        "inclusions": {"vr_rs_in_vr_r": contained, "vr_rst_in_subdivision_of_vr_rs": barycentric},
        "strict": {"vr_rs_in_vr_r": vr_rs.len() < vr_r.len()},
        "downward_closed": {"bifiltration": bi.is_downward_closed(), "trifiltration": tri.is_downward_closed()},
        "truncated": tri.truncated,
        "complex_rs": vr_rs.iter().map(|c| match c { Cell::Simplex(v) => json!(v), Cell::Chain(ch) => json!(ch) }).collect::<Vec<_>>(),
    });
    let coords = x.base().coords().expect("plane field has coordinates");
    let svg = render(&[
        complex_panel(&format!("VR^(r,inf), r = {FIG2_R}"), coords, &vr_r),
        complex_panel(&format!("VR^(r,s), r = {FIG2_R}, s = {FIG2_S}"), coords, &vr_rs),
        complex_panel(&format!("VR^(r,s,t), t = {FIG2_T}"), coords, &vr_rst),
    ]);
    Ok((meta, svg))
}

/// One randomized perturbation of the Figure 1 scenario on a shared
/// ambient set: grid nodes, the sample `X` and a jittered copy `Y`, with
/// values `f` and a perturbed `g`, and the empirical measures of `X`, `Y`.
#[derive(Clone, Debug)]
pub struct Perturbation {
    pub f: MetricField,
    pub g: MetricField,
    pub xs: Vec<usize>,
    pub ys: Vec<usize>,
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    /// Largest point displacement.
    pub jitter: f64,
    /// Amplitude of the value perturbation.
    pub amplitude: f64,
}

pub fn fig1_perturbation(seed: u64, trial: u64, grid_step: f64) -> Result<Perturbation> {
    let mut rng = seeds::rng(seed, &[0xF1, trial]);
    let jitter = rng.gen_range(0.01..0.1);
    let amplitude = rng.gen_range(0.0..0.05);
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut pts = grid_points(-3.0, 3.0, -2.0, 2.0, grid_step);
    let sample = two_circles(FIG1_SAMPLE, 1.0, 1.5, seed);
    let moved: Vec<Vec<f64>> = sample
        .iter()
        .map(|p| {
            let a = rng.gen_range(0.0..std::f64::consts::TAU);
            let l = jitter * rng.gen::<f64>().sqrt();
            vec![p[0] + l * a.cos(), p[1] + l * a.sin()]
        })
        .collect();
    let first = pts.len();
    pts.extend(sample);
    let second = pts.len();
    pts.extend(moved);
    let n = pts.len();
    let xs: Vec<usize> = (first..second).collect();
    let ys: Vec<usize> = (second..n).collect();
    let f = plane_field(pts.clone(), fig1_function)?;
    let g = plane_field(pts, |x, y| fig1_function(x, y) + amplitude * (2.0 * x + phase).sin())?;
    let mut mu = vec![0.0; n];
    let mut nu = vec![0.0; n];
    for (&i, &j) in xs.iter().zip(&ys) {
        mu[i] = 1.0 / xs.len() as f64;
        nu[j] = 1.0 / ys.len() as f64;
    }
    Ok(Perturbation {
        f,
        g,
        xs,
        ys,
        mu,
        nu,
        jitter,
        amplitude,
    })
}

/// Vertex-identified pair for the Rips inclusion check: `k` points of the
/// Figure 1 sample under `f`, and the same points jittered under a
/// perturbed `g`.
pub fn vr_identity_pair(seed: u64, trial: u64, k: usize) -> Result<(MetricField, MetricField)> {
    let p = fig1_perturbation(seed, trial, 1.0)?;
    let step = (p.xs.len() / k).max(1);
    let idx: Vec<usize> = (0..k).map(|i| i * step).collect();
    let xi: Vec<usize> = idx.iter().map(|&i| p.xs[i]).collect();
    let yi: Vec<usize> = idx.iter().map(|&i| p.ys[i]).collect();
    let coords = p.f.coords().expect("plane field");
    let x = plane_field(xi.iter().map(|&i| coords[i].clone()).collect(), fig1_function)?;
    let vals: Vec<f64> = yi.iter().map(|&i| match p.g.value(i) {
        mmfield::BPoint::Coords(c) => c[0],
        mmfield::BPoint::Index(_) => unreachable!(),
    }).collect();
    let ypts: Vec<Vec<f64>> = yi.iter().map(|&i| coords[i].clone()).collect();
    let y = MetricField::from_points(
        ypts,
        vals.into_iter().map(|v| mmfield::BPoint::Coords(vec![v])).collect(),
        x.space().clone(),
    )?;
    Ok((x, y))
}
