//! The pipeline behind the `delaywave` binary: each `cmd_*` function turns
//! a [`RunConfig`] into a set of in-memory artifacts, which are written
//! only once everything has succeeded.

mod commands;
mod config;
mod output;

pub use commands::{
    cmd_compare, cmd_diagnose, cmd_oracle, cmd_probe, cmd_solve, read_run, CompareOptions,
    RunOptions,
};
pub use config::{
    preset_names, DiagnosticsSection, Formulation, Number, OracleSection, OutputSection,
    Overrides, ProblemSection, RunConfig, SolverSection, PRESETS,
};
pub use output::Artifacts;

use thiserror::Error;

use crate::exprlang::ParseError;
use crate::oracle::OracleError;
use crate::problem::{CompatibilityReport, ProblemError};
use crate::spectral::SpectralError;
use crate::stability::StabilityError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{field}: {source}")]
    Expression { field: String, source: ParseError },
    #[error(
        "history does not match the boundary data (left {:e}, right {:e}, tolerance {:e}); \
         pass --allow-incompatible to proceed",
        .0.max_violation_left, .0.max_violation_right, .0.tol
    )]
    Incompatible(CompatibilityReport),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error("comparison: l_inf = {l_inf:e} exceeds tolerance {tol:e}")]
    Tolerance { l_inf: f64, tol: f64 },
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Output(String),
}

impl CliError {
    /// 2 for invalid input, 3 for incompatible data, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Expression { .. } => 2,
            CliError::Incompatible(_) => 3,
            CliError::Problem(e) | CliError::Spectral(SpectralError::Problem(e)) => match e {
                ProblemError::InvalidParameter { .. } | ProblemError::OscillationViolated { .. } => 2,
                _ => 1,
            },
            CliError::Oracle(e) => match e {
                OracleError::Incompatible { .. } => 3,
                OracleError::Data(_) | OracleError::Field(_) => 1,
                _ => 2,
            },
            _ => 1,
        }
    }
}
