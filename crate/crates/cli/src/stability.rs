//! Measured interleaving shifts against the stability bounds.

use serde_json::{json, Value};

use mmfield::filtrations::{
    inclusion_interleaving_shift, nbhd_bifiltration, nbhd_trifiltration, vr_identity_inclusion, AmbientField,
    ParamGrid, ShiftReport,
};
use mmfield::transport::prokhorov;
use mmfield::{hausdorff, Error, MMField, Matrix, MetricField, Result};

use crate::finite_or_str;

#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub kind: &'static str,
    pub shift: ShiftReport,
    /// Right-hand side of the inequality, before grid slack.
    pub theorem_bound: f64,
    /// Slack allowed for discretization.
    pub slack: f64,
    pub pass: bool,
    pub terms: Value,
}

impl StabilityReport {
    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind,
            "status": "exact",
            "measured_shift": finite_or_str(self.shift.shift),
            "shift_steps": self.shift.steps,
            "grid_step": self.shift.step,
            "half_step_error": self.shift.half_step,
            "theorem_bound": self.theorem_bound,
            "slack": self.slack,
            "pass": self.pass,
            "terms": self.terms,
        })
    }
}

fn same_ambient(f: &MetricField, g: &MetricField, tol: f64) -> Result<()> {
    if f.n() != g.n() {
        return Err(Error::Shape(format!("ambient sizes differ: {} vs {}", f.n(), g.n())));
    }
    let gap = f
        .d()
        .as_slice()
        .iter()
        .zip(g.d().as_slice())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if gap > tol {
        return Err(Error::Shape(format!("ambient distances differ by {gap}")));
    }
    Ok(())
}

/// `sup_y d_B(f(y), g(y))`.
pub fn sup_value_gap(f: &MetricField, g: &MetricField) -> f64 {
    (0..f.n()).map(|i| f.bdist(i, g, i)).fold(0.0, f64::max)
}

/// Neighborhood bifiltrations of `xs` under `f` and `ys` under `g`, on one
/// ambient set: shift `<= d_H(X, Y) + 2 sup d_B(f, g)` up to one grid step.
pub fn nbhd2(
    f: &MetricField,
    g: &MetricField,
    xs: &[usize],
    ys: &[usize],
    r: &ParamGrid,
    s: &ParamGrid,
    tol_metric: f64,
) -> Result<StabilityReport> {
    same_ambient(f, g, tol_metric)?;
    let m1 = nbhd_bifiltration(xs, &AmbientField::new(f.clone()), r, s)?;
    let m2 = nbhd_bifiltration(ys, &AmbientField::new(g.clone()), r, s)?;
    let shift = inclusion_interleaving_shift(&m1, &m2)?;
    let dh = hausdorff(f, xs, ys)?;
    let sup = sup_value_gap(f, g);
    let bound = dh + 2.0 * sup;
    let slack = shift.step + 1e-9;
    Ok(StabilityReport {
        kind: "nbhd2",
        pass: shift.shift <= bound + slack,
        theorem_bound: bound,
        slack,
        shift,
        terms: json!({"hausdorff": dh, "sup_value_gap": sup}),
    })
}

/// Neighborhood trifiltrations of two weighted fields on one ambient set:
/// shift `<= d_P(mu, nu) + 2 sup d_B(f, g)` up to one grid step.
pub fn nbhd3(
    f: &MMField,
    g: &MMField,
    r: &ParamGrid,
    s: &ParamGrid,
    t: &ParamGrid,
    tol_metric: f64,
    tol_mass: f64,
) -> Result<StabilityReport> {
    same_ambient(f.base(), g.base(), tol_metric)?;
    let m1 = nbhd_trifiltration(&AmbientField::with_measure(f.clone()), r, s, t)?;
    let m2 = nbhd_trifiltration(&AmbientField::with_measure(g.clone()), r, s, t)?;
    let shift = inclusion_interleaving_shift(&m1, &m2)?;
    let (sf, sg) = (f.support(), g.support());
    let c = Matrix::from_fn(sf.len(), sg.len(), |i, j| f.base().dist(sf[i], sg[j]));
    let mu: Vec<f64> = sf.iter().map(|&i| f.weights()[i]).collect();
    let nu: Vec<f64> = sg.iter().map(|&j| g.weights()[j]).collect();
    let dp = prokhorov(&mu, &nu, &c, tol_mass)?;
    let sup = sup_value_gap(f.base(), g.base());
    let bound = dp.value + 2.0 * sup;
    let slack = shift.step + 1e-9;
    Ok(StabilityReport {
        kind: "nbhd3",
        pass: shift.shift <= bound + slack,
        theorem_bound: bound,
        slack,
        shift,
        terms: json!({"prokhorov": dp.value, "prokhorov_resolution": dp.resolution, "sup_value_gap": sup}),
    })
}

#[derive(Clone, Debug)]
pub struct VrIdentityReport {
    pub eps: f64,
    pub checked: usize,
    pub violations: Vec<Vec<usize>>,
    pub pass: bool,
}

impl VrIdentityReport {
    pub fn to_json(&self) -> Value {
        json!({
            "kind": "vr-identity",
            "status": "exact",
            "eps": self.eps,
            "measured_shift": 2.0 * self.eps,
            "theorem_bound": 2.0 * self.eps,
            "checked": self.checked,
            "violations": self.violations,
            "pass": self.pass,
        })
    }
}

/// Fields on one vertex set with `|d_X - d_Y| <= 2 eps` and value gaps
/// `<= eps`, for the least such `eps`: every simplex of the first
/// bifiltration is in the second at grade shifted by `2 eps`.
pub fn vr_identity(x: &MetricField, y: &MetricField, dim_cap: usize, r_max: f64, s_max: f64) -> Result<VrIdentityReport> {
    if x.n() != y.n() {
        return Err(Error::Shape(format!("vertex sets differ: {} vs {}", x.n(), y.n())));
    }
    let dgap = x
        .d()
        .as_slice()
        .iter()
        .zip(y.d().as_slice())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let eps = (0.5 * dgap).max(sup_value_gap(x, y));
    let r = vr_identity_inclusion(x, y, 2.0 * eps, dim_cap, r_max, s_max)?;
    Ok(VrIdentityReport {
        eps,
        checked: r.checked,
        pass: r.holds,
        violations: r.violations,
    })
}
