//! Command-line front end: one JSON document per invocation.

pub mod args;
mod commands;
pub mod demo;
pub mod draw;
pub mod stability;

use std::path::Path;

use clap::Parser;
use serde_json::{json, Value};

use mmfield::filtrations::ParamGrid;
use mmfield::gwp::Exponent;
use mmfield::io::{read_field, FieldFile};
use mmfield::{validate_field, MMField, Status, Tolerances};

pub use args::Cli;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// What a command produced.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub json: Value,
    pub svg: Option<String>,
}

impl Outcome {
    fn ok(json: Value) -> Self {
        Outcome {
            code: EXIT_OK,
            json,
            svg: None,
        }
    }

    fn with_status(json: Value, statuses: &[Status]) -> Self {
        let code = if statuses.contains(&Status::BoundsOnly) { EXIT_BUDGET } else { EXIT_OK };
        Outcome { code, json, svg: None }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Invalid(Value),
}

impl CliError {
    pub fn into_outcome(self) -> Outcome {
        match self {
            CliError::Usage(m) => Outcome {
                code: EXIT_USAGE,
                json: json!({"error": "usage", "message": m}),
                svg: None,
            },
            CliError::Invalid(v) => Outcome {
                code: EXIT_INVALID,
                json: v,
                svg: None,
            },
        }
    }
}

impl From<mmfield::Error> for CliError {
    fn from(e: mmfield::Error) -> Self {
        CliError::Invalid(json!({"error": "invalid_input", "message": e.to_string()}))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn tolerances(g: &args::Global) -> Tolerances {
    Tolerances {
        metric: g.tol_metric,
        mass: g.tol_mass,
    }
}

/// Read a field file and check its invariants.
pub(crate) fn load(path: &Path, tol: &Tolerances) -> CliResult<FieldFile> {
    let f = read_field(path).map_err(|e| {
        CliError::Invalid(json!({"error": "invalid_input", "file": path.display().to_string(), "message": e.to_string()}))
    })?;
    let report = match &f.weights {
        Some(w) => validate_field(&MMField::new(f.field.clone(), w.clone())?, tol),
        None => validate_field(&f.field, tol),
    };
    if !report.is_valid() {
        return Err(CliError::Invalid(json!({
            "error": "validation",
            "file": path.display().to_string(),
            "report": report,
        })));
    }
    Ok(f)
}

pub(crate) fn parse_exponent(s: &str) -> CliResult<Exponent> {
    let p: Exponent = s.parse().map_err(|e: mmfield::Error| usage(e.to_string()))?;
    p.validate().map_err(|e| usage(e.to_string()))?;
    Ok(p)
}

pub(crate) fn parse_bound(s: &str) -> CliResult<f64> {
    match s {
        "inf" => Ok(f64::INFINITY),
        t => t
            .parse::<f64>()
            .ok()
            .filter(|v| *v >= 0.0)
            .ok_or_else(|| usage(format!("expected a nonnegative number or inf, got {t:?}"))),
    }
}

/// `--grid` flags as named axes, in order.
pub(crate) fn parse_grids(specs: &[String], names: &[&str]) -> CliResult<Vec<ParamGrid>> {
    if specs.len() != names.len() {
        return Err(usage(format!(
            "expected {} --grid flags ({}), got {}",
            names.len(),
            names.join(", "),
            specs.len()
        )));
    }
    specs
        .iter()
        .zip(names)
        .map(|(s, &name)| {
            let body = match s.split_once('=') {
                Some((n, b)) if n == name => b,
                Some((n, _)) => return Err(usage(format!("grid for axis {name} given as {n}"))),
                None => s.as_str(),
            };
            ParamGrid::parse(name, body).map_err(|e| usage(e.to_string()))
        })
        .collect()
}

/// `0..200,205` style index lists.
pub fn parse_index_set(s: &str, n: usize) -> CliResult<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || usage(format!("bad index list entry {part:?}"));
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
                out.extend(a..b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        return Err(usage("empty index list"));
    }
    if let Some(&i) = out.iter().find(|&&i| i >= n) {
        return Err(usage(format!("index {i} out of range for {n} points")));
    }
    Ok(out)
}

pub(crate) fn parse_at(s: &str, k: usize) -> CliResult<Vec<f64>> {
    let v: Vec<f64> = s.split(',').map(parse_bound).collect::<CliResult<_>>()?;
    if v.len() != k {
        return Err(usage(format!("--at needs {k} values")));
    }
    Ok(v)
}

/// Parse and execute. Help and version requests are reported through the
/// error branch with exit code 0.
pub fn run_args<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            Outcome {
                code,
                json: json!({"error": if code == 0 { "help" } else { "usage" }, "message": e.to_string()}),
                svg: None,
            }
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    commands::dispatch(cli).unwrap_or_else(CliError::into_outcome)
}

/// `{"value": v, "status": s}`, with `inf` written as a string.
pub fn num(v: f64, status: Status) -> Value {
    json!({"value": finite_or_str(v), "status": status.as_str()})
}

pub fn finite_or_str(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        json!("nan")
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

/// Configure the global thread pool from `MMFIELD_THREADS`.
pub fn init_threads() {
    if let Some(n) = std::env::var("MMFIELD_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}
