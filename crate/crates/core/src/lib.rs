//! Distances, curvature sets and multiparameter filtrations for fields:
//! 1-Lipschitz maps from finite metric (measure) spaces into a target
//! metric space `B`.
//!
//! Everything here works on finite instances with dense storage. Solvers
//! are exact where the instance is small enough and report bounds
//! otherwise; every result carries its status.

pub mod compat;
pub mod curvature;
pub mod error;
pub mod field;
pub mod filtrations;
pub mod generate;
pub mod gh;
pub mod gwp;
pub mod io;
pub mod matrix;
pub mod seeds;
pub mod space;
pub mod svg;
pub mod transport;

pub use error::{Error, Result};
pub use field::{
    amalgamate, coproduct, distortion, hausdorff, lipschitz_rescale_factor, validate_field,
    value_hausdorff, Coupling, MMField, MetricField, Relation, Tolerances, ValidationReport,
    Violation,
};
pub use matrix::Matrix;
pub use space::{BPoint, TargetSpace};

/// Result status shared by all distance solvers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Exact,
    Local,
    BoundsOnly,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Exact => "exact",
            Status::Local => "local",
            Status::BoundsOnly => "bounds_only",
        }
    }
}
