use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "mmfield", version, about = "Distances, curvature sets and filtrations of fields")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Absolute tolerance for metric axioms and Lipschitz checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_metric: f64,
    /// Absolute tolerance for probability sums.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_mass: f64,
    /// Search budget for the combinatorial solvers (nodes or sweeps).
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Write the JSON document here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write an SVG drawing next to the output.
    #[arg(long, global = true)]
    pub emit_svg: bool,
    /// Parameter grid `start:stop:step` (optionally `name=` prefixed, or a
    /// comma list; append `,inf` for an infinite last value). Repeat per axis
    /// in the order r, s, t.
    #[arg(long = "grid", global = true)]
    pub grids: Vec<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the invariants of a field file.
    Validate { file: PathBuf },
    /// Distance between two fields.
    Dist {
        kind: DistKind,
        x: PathBuf,
        y: PathBuf,
        /// Exponent for gw: a number >= 1 or `inf`.
        #[arg(long, default_value = "2")]
        p: String,
    },
    /// Curvature-set experiments.
    Curvature {
        #[command(subcommand)]
        cmd: CurvatureCmd,
    },
    /// Build a filtration.
    Filtration {
        #[command(subcommand)]
        cmd: FiltrationCmd,
    },
    /// Measure an interleaving shift against its stability bound.
    Stability {
        #[command(subcommand)]
        cmd: StabilityCmd,
    },
    /// Regenerate a figure scenario.
    Demo { figure: Figure },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistKind {
    Gh,
    Gp,
    Gw,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    Fig1,
    Fig2,
}

#[derive(Subcommand, Debug)]
pub enum CurvatureCmd {
    /// Draw augmented distance matrices.
    Sample {
        x: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        m: usize,
    },
    /// Distance between two empirical curvature distributions.
    Dist {
        x: PathBuf,
        y: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        m: usize,
        #[arg(long, default_value = "1")]
        p: String,
    },
    /// Estimates over a list of tuple sizes.
    Converge {
        x: PathBuf,
        y: PathBuf,
        /// Comma separated tuple sizes.
        #[arg(long, default_value = "2,4,8")]
        n_list: String,
        #[arg(long, default_value_t = 200)]
        m: usize,
        #[arg(long, default_value = "1")]
        p: String,
        #[arg(long, default_value_t = mmfield::curvature::DEFAULT_REPLICATES)]
        replicates: usize,
        /// Embed the CSV table in the output.
        #[arg(long)]
        csv: bool,
    },
    /// Two-sample test of curvature distributions.
    Reconstruct {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 500)]
        m: usize,
        #[arg(long, default_value_t = mmfield::curvature::DEFAULT_PERMUTATIONS)]
        permutations: usize,
    },
    /// Mass of tuples whose empirical measure is close to the field's.
    Uniformity {
        x: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value = "1")]
        p: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct VrCaps {
    #[arg(long, default_value_t = 2)]
    pub dim_cap: usize,
    #[arg(long, default_value = "inf")]
    pub r_max: String,
    #[arg(long, default_value = "inf")]
    pub s_max: String,
}

#[derive(Subcommand, Debug)]
pub enum FiltrationCmd {
    /// Neighborhood bifiltration of a subset of an ambient field.
    Nbhd2 {
        ambient: PathBuf,
        /// Reference indices, e.g. `0..200,205`; defaults to the support of
        /// the weights, or every point.
        #[arg(long)]
        x_set: Option<String>,
        /// Grade to draw, e.g. `0.8,0.1`.
        #[arg(long)]
        at: Option<String>,
    },
    /// Neighborhood trifiltration of a weighted ambient field.
    Nbhd3 {
        ambient: PathBuf,
        #[arg(long)]
        at: Option<String>,
    },
    /// Vietoris-Rips bifiltration.
    Vr2 {
        x: PathBuf,
        #[command(flatten)]
        caps: VrCaps,
        #[arg(long)]
        at: Option<String>,
    },
    /// Vietoris-Rips trifiltration of an mm-field.
    Vr3 {
        x: PathBuf,
        #[command(flatten)]
        caps: VrCaps,
        #[arg(long, default_value_t = 1.0)]
        t_max: f64,
        #[arg(long, default_value_t = mmfield::filtrations::DEFAULT_SUBSET_CAP)]
        subset_cap: usize,
        #[arg(long)]
        at: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum StabilityCmd {
    /// Two fields on one ambient set with reference subsets.
    Nbhd2 {
        f: PathBuf,
        g: PathBuf,
        #[arg(long)]
        x_set: String,
        #[arg(long)]
        y_set: String,
    },
    /// Two weighted fields on one ambient set.
    Nbhd3 { f: PathBuf, g: PathBuf },
    /// Two fields on one vertex set.
    VrIdentity {
        x: PathBuf,
        y: PathBuf,
        #[command(flatten)]
        caps: VrCaps,
    },
}
