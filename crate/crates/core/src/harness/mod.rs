//! Test problems, monitor recipes, reference solutions and output.

pub mod exact;
pub mod monitors;
pub mod output;
pub mod problems;

use thiserror::Error;

use crate::error::{MeshError, ModelError, SolverError};

pub use monitors::{DerivativeMonitor, MonitorId, RandomMonitor};
pub use problems::{convergence_table, run_problem, ConvergenceRow, ProblemId, ProblemSpec, RunOptions, RunOutcome};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("exact solution has no unique root at x = {x}, t = {t}")]
    NoConvergence { x: f64, t: f64 },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}
