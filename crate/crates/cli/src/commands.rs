use serde_json::{json, Value};

use mmfield::curvature::{
    adm_wasserstein, convergence_csv, gw_convergence_experiment_with, reconstruction_test_with, sample_adm,
    uniformity_mass,
};
use mmfield::filtrations::{
    ball_masses, nbhd_bifiltration, nbhd_trifiltration, vr_bifiltration, vr_trifiltration, AmbientField, ParamGrid,
    TriCaps,
};
use mmfield::gh::{gh_distance, DEFAULT_GH_BUDGET};
use mmfield::gwp::{gp_distance, gw_solve, GwOptions, DEFAULT_BUDGET};
use mmfield::io::read_field;
use mmfield::svg::render;
use mmfield::{validate_field, BPoint, MMField, Matrix, Status};

use crate::args::{Cli, Command, CurvatureCmd, DistKind, Figure, FiltrationCmd, Global, StabilityCmd, VrCaps};
use crate::draw::{complex_panel, mask_panel};
use crate::{
    demo, load, num, parse_at, parse_bound, parse_exponent, parse_grids, parse_index_set, stability,
    tolerances, usage, CliError, CliResult, Outcome,
};

pub(crate) fn dispatch(cli: &Cli) -> CliResult<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Validate { file } => validate(g, file),
        Command::Dist { kind, x, y, p } => dist(g, *kind, x, y, p),
        Command::Curvature { cmd } => curvature(g, cmd),
        Command::Filtration { cmd } => filtration(g, cmd),
        Command::Stability { cmd } => stability_cmd(g, cmd),
        Command::Demo { figure } => {
            let (json, svg) = match figure {
                Figure::Fig1 => demo::fig1(g.seed)?,
                Figure::Fig2 => demo::fig2(g.seed)?,
            };
            Ok(Outcome {
                code: crate::EXIT_OK,
                json,
                svg: Some(svg),
            })
        }
    }
}

fn validate(g: &Global, file: &std::path::Path) -> CliResult<Outcome> {
    let f = read_field(file).map_err(|e| {
        CliError::Invalid(json!({"error": "invalid_input", "file": file.display().to_string(), "message": e.to_string()}))
    })?;
    let tol = tolerances(g);
    let report = match &f.weights {
        Some(w) => validate_field(&MMField::new(f.field.clone(), w.clone())?, &tol),
        None => validate_field(&f.field, &tol),
    };
    let valid = report.is_valid();
    let json = json!({
        "file": file.display().to_string(),
        "n": f.field.n(),
        "weighted": f.weights.is_some(),
        "valid": valid,
        "status": Status::Exact.as_str(),
        "report": report,
    });
    Ok(Outcome {
        code: if valid { crate::EXIT_OK } else { crate::EXIT_INVALID },
        json,
        svg: None,
    })
}

fn gw_options(g: &Global) -> GwOptions {
    GwOptions {
        budget: g.budget.unwrap_or(DEFAULT_BUDGET),
        seed: g.seed,
        tol_mass: g.tol_mass,
        ..GwOptions::default()
    }
}

fn matrix_json(m: &Matrix) -> Value {
    json!(m.to_rows())
}

fn dist(g: &Global, kind: DistKind, xp: &std::path::Path, yp: &std::path::Path, p: &str) -> CliResult<Outcome> {
    let tol = tolerances(g);
    let (xf, yf) = (load(xp, &tol)?, load(yp, &tol)?);
    match kind {
        DistKind::Gh => {
            let r = gh_distance(&xf.field, &yf.field, g.budget.unwrap_or(DEFAULT_GH_BUDGET))?;
            let json = json!({
                "kind": "gh",
                "value": r.value,
                "status": r.status.as_str(),
                "lower": num(r.lower, r.status),
                "upper": num(r.upper, r.status),
                "witness": r.witness.as_ref().map(|w| w.pairs().to_vec()),
            });
            Ok(Outcome::with_status(json, &[r.status]))
        }
        DistKind::Gp => {
            let (x, y) = (xf.mm_or_uniform()?, yf.mm_or_uniform()?);
            let mut opts = gw_options(g);
            opts.budget = g.budget.unwrap_or(DEFAULT_GH_BUDGET);
            let r = gp_distance(&x, &y, &opts)?;
            let json = json!({
                "kind": "gp",
                "value": r.value,
                "status": r.status.as_str(),
                "resolution": r.resolution,
                "lower": num(r.lower, r.status),
                "upper": num(r.upper, r.status),
                "relation": r.relation.as_ref().map(|w| w.pairs().to_vec()),
                "coupling": matrix_json(r.coupling.matrix()),
            });
            Ok(Outcome::with_status(json, &[r.status]))
        }
        DistKind::Gw => {
            let (x, y) = (xf.mm_or_uniform()?, yf.mm_or_uniform()?);
            let p = parse_exponent(p)?;
            let r = gw_solve(&x, &y, p, &gw_options(g))?;
            let json = json!({
                "kind": "gw",
                "p": p,
                "value": r.value,
                "status": r.status.as_str(),
                "lower": num(r.lower, r.status),
                "upper": num(r.upper, r.status),
                "relaxation_lower": num(r.relaxation_lower, Status::Exact),
                "coupling": matrix_json(r.coupling.matrix()),
            });
            Ok(Outcome::with_status(json, &[r.status]))
        }
    }
}

fn bpoint_json(b: &BPoint) -> Value {
    match b {
        BPoint::Coords(c) => json!(c),
        BPoint::Index(i) => json!(i),
    }
}

fn curvature(g: &Global, cmd: &CurvatureCmd) -> CliResult<Outcome> {
    let tol = tolerances(g);
    match cmd {
        CurvatureCmd::Sample { x, n, m } => {
            let xf = load(x, &tol)?.mm_or_uniform()?;
            let d = sample_adm(&xf, *n, *m, g.seed)?;
            let samples: Vec<Value> = d
                .samples()
                .iter()
                .map(|a| json!({"r": a.r().lower_triangle(), "b": a.b().iter().map(bpoint_json).collect::<Vec<_>>()}))
                .collect();
            Ok(Outcome::ok(json!({
                "kind": "curvature_sample",
                "status": Status::Exact.as_str(),
                "provenance": d.provenance,
                "samples": samples,
            })))
        }
        CurvatureCmd::Dist { x, y, n, m, p } => {
            let p = parse_exponent(p)?;
            let (xf, yf) = (load(x, &tol)?.mm_or_uniform()?, load(y, &tol)?.mm_or_uniform()?);
            let dx = sample_adm(&xf, *n, *m, mmfield::seeds::derive(g.seed, &[0]))?;
            let dy = sample_adm(&yf, *n, *m, mmfield::seeds::derive(g.seed, &[1]))?;
            let v = adm_wasserstein(&dx, &dy, p)?;
            Ok(Outcome::ok(json!({
                "kind": "curvature_dist",
                "n": n,
                "m": m,
                "p": p,
                "seed": g.seed,
                "estimate": num(v, Status::Exact),
            })))
        }
        CurvatureCmd::Converge {
            x,
            y,
            n_list,
            m,
            p,
            replicates,
            csv,
        } => {
            let p = parse_exponent(p)?;
            let ns: Vec<usize> = n_list
                .split(',')
                .map(|s| s.trim().parse::<usize>().map_err(|_| usage(format!("bad tuple size {s:?}"))))
                .collect::<CliResult<_>>()?;
            let (xf, yf) = (load(x, &tol)?.mm_or_uniform()?, load(y, &tol)?.mm_or_uniform()?);
            let pts = gw_convergence_experiment_with(&xf, &yf, p, &ns, *m, *replicates, g.seed)?;
            let mut json = json!({
                "kind": "curvature_converge",
                "status": Status::Exact.as_str(),
                "points": pts,
            });
            if *csv {
                json["csv"] = json!(convergence_csv(&pts));
            }
            Ok(Outcome::ok(json))
        }
        CurvatureCmd::Reconstruct {
            x,
            y,
            n,
            m,
            permutations,
        } => {
            let (xf, yf) = (load(x, &tol)?.mm_or_uniform()?, load(y, &tol)?.mm_or_uniform()?);
            let r = reconstruction_test_with(&xf, &yf, *n, *m, *permutations, g.seed)?;
            Ok(Outcome::ok(json!({
                "kind": "curvature_reconstruct",
                "status": Status::Exact.as_str(),
                "report": r,
            })))
        }
        CurvatureCmd::Uniformity { x, n, eps, p, trials } => {
            let p = parse_exponent(p)?;
            let xf = load(x, &tol)?.mm_or_uniform()?;
            let v = uniformity_mass(&xf, *n, *eps, p, *trials, g.seed)?;
            Ok(Outcome::ok(json!({
                "kind": "curvature_uniformity",
                "n": n,
                "eps": eps,
                "p": p,
                "trials": trials,
                "mass": num(v, Status::Exact),
            })))
        }
    }
}

fn resolution(grids: &[ParamGrid]) -> Value {
    grids
        .iter()
        .map(|a| (a.name().to_string(), a.step().map_or(Value::Null, |h| json!(h))))
        .collect::<serde_json::Map<_, _>>()
        .into()
}

fn caps(c: &VrCaps) -> CliResult<(f64, f64)> {
    Ok((parse_bound(&c.r_max)?, parse_bound(&c.s_max)?))
}

/// Default drawing grade: the middle of every axis.
fn mid_grade(grids: &[ParamGrid]) -> Vec<f64> {
    grids.iter().map(|a| a.values()[(a.len() - 1) / 2]).collect()
}

fn on_grid(grids: &[ParamGrid], at: &[f64]) -> CliResult<Vec<usize>> {
    grids
        .iter()
        .zip(at)
        .map(|(a, &v)| a.index_of(v).ok_or_else(|| usage(format!("{v} is not on grid {}", a.name()))))
        .collect()
}

fn title(names: &[&str], at: &[f64]) -> String {
    names
        .iter()
        .zip(at)
        .map(|(n, v)| format!("{n} = {v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn filtration(g: &Global, cmd: &FiltrationCmd) -> CliResult<Outcome> {
    let tol = tolerances(g);
    match cmd {
        FiltrationCmd::Nbhd2 { ambient, x_set, at } => {
            let grids = parse_grids(&g.grids, &["r", "s"])?;
            let ff = load(ambient, &tol)?;
            let n = ff.field.n();
            let xs = match (x_set, &ff.weights) {
                (Some(s), _) => parse_index_set(s, n)?,
                (None, Some(w)) => (0..n).filter(|&i| w[i] > 0.0).collect(),
                (None, None) => (0..n).collect(),
            };
            let amb = AmbientField::new(ff.field.clone());
            let mask = nbhd_bifiltration(&xs, &amb, &grids[0], &grids[1])?;
            let mut out = Outcome::ok(json!({
                "kind": "nbhd2",
                "status": Status::Exact.as_str(),
                "resolution": resolution(&grids),
                "x_set": xs,
                "monotone": mask.is_monotone(),
                "mask": mask.to_json(),
            }));
            if g.emit_svg {
                let grade = match at {
                    Some(s) => parse_at(s, 2)?,
                    None => mid_grade(&grids),
                };
                let idx = on_grid(&grids, &grade)?;
                let coords = ff.field.coords().ok_or_else(|| usage("drawing needs ambient coordinates"))?;
                out.svg = Some(render(&[mask_panel(
                    &format!("N^(r,s), {}", title(&["r", "s"], &grade)),
                    coords,
                    mask.at(&idx),
                    None,
                    &xs,
                )]));
            }
            Ok(out)
        }
        FiltrationCmd::Nbhd3 { ambient, at } => {
            let grids = parse_grids(&g.grids, &["r", "s", "t"])?;
            let ff = load(ambient, &tol)?;
            let amb = AmbientField::with_measure(ff.mm()?);
            let mask = nbhd_trifiltration(&amb, &grids[0], &grids[1], &grids[2])?;
            let mut out = Outcome::ok(json!({
                "kind": "nbhd3",
                "status": Status::Exact.as_str(),
                "resolution": resolution(&grids),
                "monotone": mask.is_monotone(),
                "mask": mask.to_json(),
            }));
            if g.emit_svg {
                let grade = match at {
                    Some(s) => parse_at(s, 3)?,
                    None => mid_grade(&grids),
                };
                let idx = on_grid(&grids, &grade)?;
                let coords = ff.field.coords().ok_or_else(|| usage("drawing needs ambient coordinates"))?;
                let masses = ball_masses(&amb, &grids[0], &grids[1])?;
                let n = amb.n();
                let c = idx[0] * grids[1].len() + idx[1];
                let support: Vec<usize> = (0..n).filter(|&i| amb.weights().unwrap()[i] > 0.0).collect();
                out.svg = Some(render(&[mask_panel(
                    &format!("N^(r,s,t), {}", title(&["r", "s", "t"], &grade)),
                    coords,
                    mask.at(&idx),
                    Some(&masses[c * n..(c + 1) * n]),
                    &support,
                )]));
            }
            Ok(out)
        }
        FiltrationCmd::Vr2 { x, caps: c, at } => {
            let (r_max, s_max) = caps(c)?;
            let ff = load(x, &tol)?;
            let cx = vr_bifiltration(&ff.field, c.dim_cap, r_max, s_max)?;
            let mut out = Outcome::ok(json!({
                "kind": "vr2",
                "status": Status::Exact.as_str(),
                "downward_closed": cx.is_downward_closed(),
                "complex": cx.to_json(),
            }));
            if g.emit_svg {
                let grade = match at {
                    Some(s) => parse_at(s, 2)?,
                    None => vec![r_max, s_max],
                };
                let coords = ff.field.coords().ok_or_else(|| usage("drawing needs point coordinates"))?;
                out.svg = Some(render(&[complex_panel(
                    &format!("VR^(r,s), {}", title(&["r", "s"], &grade)),
                    coords,
                    &cx.at(&grade),
                )]));
            }
            Ok(out)
        }
        FiltrationCmd::Vr3 {
            x,
            caps: c,
            t_max,
            subset_cap,
            at,
        } => {
            let (r_max, s_max) = caps(c)?;
            let ff = load(x, &tol)?;
            let mm = ff.mm_or_uniform()?;
            let tc = TriCaps {
                r_max,
                s_max,
                t_max: *t_max,
                subset_cap: *subset_cap,
            };
            let cx = vr_trifiltration(&mm, c.dim_cap, &tc)?;
            let mut out = Outcome::ok(json!({
                "kind": "vr3",
                "status": Status::Exact.as_str(),
                "downward_closed": cx.is_downward_closed(),
                "truncated": cx.truncated,
                "complex": cx.to_json(),
            }));
            if g.emit_svg {
                let grade = match at {
                    Some(s) => parse_at(s, 3)?,
                    None => vec![r_max, s_max, *t_max],
                };
                let coords = ff.field.coords().ok_or_else(|| usage("drawing needs point coordinates"))?;
                out.svg = Some(render(&[complex_panel(
                    &format!("VR^(r,s,t), {}", title(&["r", "s", "t"], &grade)),
                    coords,
                    &cx.at(&grade),
                )]));
            }
            Ok(out)
        }
    }
}

fn stability_cmd(g: &Global, cmd: &StabilityCmd) -> CliResult<Outcome> {
    let tol = tolerances(g);
    let report = match cmd {
        StabilityCmd::Nbhd2 { f, g: gp, x_set, y_set } => {
            let grids = parse_grids(&g.grids, &["r", "s"])?;
            let (ff, gf) = (load(f, &tol)?, load(gp, &tol)?);
            let n = ff.field.n();
            let xs = parse_index_set(x_set, n)?;
            let ys = parse_index_set(y_set, n)?;
            stability::nbhd2(&ff.field, &gf.field, &xs, &ys, &grids[0], &grids[1], g.tol_metric)?.to_json()
        }
        StabilityCmd::Nbhd3 { f, g: gp } => {
            let grids = parse_grids(&g.grids, &["r", "s", "t"])?;
            let (ff, gf) = (load(f, &tol)?.mm()?, load(gp, &tol)?.mm()?);
            stability::nbhd3(&ff, &gf, &grids[0], &grids[1], &grids[2], g.tol_metric, g.tol_mass)?.to_json()
        }
        StabilityCmd::VrIdentity { x, y, caps: c } => {
            let (r_max, s_max) = caps(c)?;
            let (xf, yf) = (load(x, &tol)?, load(y, &tol)?);
            stability::vr_identity(&xf.field, &yf.field, c.dim_cap, r_max, s_max)?.to_json()
        }
    };
    Ok(Outcome::ok(report))
}
