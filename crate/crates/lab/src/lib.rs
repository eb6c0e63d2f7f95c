//! Experiment harness for the covert secrecy rate solvers: single-point
//! metrics and solves, sweeps, figure recipes, Monte Carlo validation, and
//! CSV/SVG output.

use std::path::PathBuf;

use covert_core::{McError, MetricsError, ScenarioId, SolverError};
use thiserror::Error;

pub mod cli;
pub mod config;
pub mod csv;
pub mod recipes;
pub mod svg;
pub mod sweep;

pub use cli::run;

/// Exit status for a configuration or usage error.
pub const EXIT_CONFIG: i32 = 1;
/// Exit status when a Monte Carlo check disagrees with the analytic value.
pub const EXIT_VALIDATION: i32 = 2;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unknown figure recipe `{0}`")]
    UnknownRecipe(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{scenario} at axis point {point}: {source}")]
    Solve {
        scenario: ScenarioId,
        point: usize,
        #[source]
        source: SolverError,
    },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    MonteCarlo(#[from] McError),
    #[error("no rows to write")]
    EmptyRows,
    #[error("rows sweep different parameters")]
    MixedAxes,
    #[error("row {row} violates its constraints: {detail}")]
    ConstraintViolation { row: usize, detail: String },
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::MonteCarlo(McError::Starvation { .. }) => EXIT_VALIDATION,
            _ => EXIT_CONFIG,
        }
    }
}
