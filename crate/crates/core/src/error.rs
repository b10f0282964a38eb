//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("mesh needs at least {min} cells, got {got}")]
    TooFewCells { min: usize, got: usize },
    #[error("beta must lie in (0, 1), got {0}")]
    InvalidBeta(f64),
    #[error("invalid monitor settings: {0}")]
    InvalidSettings(String),
    #[error("time step must be positive, got {0}")]
    NonPositiveDt(f64),
    #[error("nodes are not strictly increasing at node {index}")]
    NotMonotone { index: usize },
    #[error("cell {cell} has non-positive size {size} after a stage")]
    NonPositiveSize { cell: usize, size: f64 },
    #[error("monitor value at cell {cell} is negative or not finite: {value}")]
    InvalidMonitor { cell: usize, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WenoError {
    #[error("degenerate stencil geometry (singular 3x3 system)")]
    SingularSystem,
    #[error("characteristic basis is ill-conditioned (estimate {0:e})")]
    IllConditioned(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("state is outside the admissible set: {0}")]
    Inadmissible(String),
    #[error("invalid model parameters: {0}")]
    InvalidParameters(String),
    #[error("star-state velocity {u_star} exceeds the wave-speed bound {alpha}")]
    StarVelocity { u_star: f64, alpha: f64 },
    #[error(transparent)]
    Weno(#[from] WenoError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LimiterError {
    #[error("low-order value breaks constraint `{constraint}` (value {value:e})")]
    LowOrderViolation { constraint: &'static str, value: f64 },
}

/// Failure of a time step or a whole run.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    /// A first-order sub-cell state left the admissible set, i.e. the
    /// bound-preserving CFL condition is broken.
    #[error("bound-preserving CFL violated at step {step}, stage {stage}, cell {cell}: {detail}")]
    BoundPreservation {
        step: usize,
        stage: usize,
        cell: usize,
        detail: String,
    },
    /// An updated cell average is not admissible.
    #[error("inadmissible cell average at step {step}, stage {stage}, cell {cell}: {detail}")]
    Inadmissible {
        step: usize,
        stage: usize,
        cell: usize,
        detail: String,
    },
    #[error("step {step} still violates the accuracy CFL after {halvings} halvings")]
    MaxHalvings { step: usize, halvings: usize },
    #[error("run did not reach t = {t_final} within {max_steps} steps")]
    MaxSteps { max_steps: usize, t_final: f64 },
    #[error("model failure at step {step}: {source}")]
    Model {
        step: usize,
        #[source]
        source: ModelError,
    },
    #[error("mesh failure at step {step}: {source}")]
    Mesh {
        step: usize,
        #[source]
        source: MeshError,
    },
}

impl SolverError {
    /// True for failures caused by the solution leaving the admissible set,
    /// as opposed to configuration or resource limits.
    pub fn is_admissibility_failure(&self) -> bool {
        match self {
            SolverError::BoundPreservation { .. } | SolverError::Inadmissible { .. } => true,
            SolverError::Model { source, .. } => !matches!(source, ModelError::InvalidParameters(_)),
            _ => false,
        }
    }
}
