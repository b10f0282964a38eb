//! Bound-preserving finite-volume schemes on adaptive moving meshes in one
//! space dimension.
//!
//! Cell averages are advanced with third-order WENO reconstruction,
//! Lax-Friedrichs fluxes and SSP-RK3 while the mesh follows a monitor
//! function. Each stage is written as a convex combination of sub-cell
//! updates; blending high-order fluxes with first-order ones keeps every
//! sub-cell state inside the admissible set of the model.

pub mod error;
pub mod harness;
pub mod limiter;
pub mod mesh;
pub mod state;
pub mod systems;
pub mod timestepper;
pub mod weno;

pub use error::{LimiterError, MeshError, ModelError, SolverError, WenoError};
pub use mesh::{MeshMotion, MeshState, MonitorSettings};
pub use state::{Matrix, State};
pub use systems::{EulerModel, FiveEqModel, ScalarFlux, ScalarModel, StiffenedGas, SystemModel};
pub use timestepper::{Boundary, CflPolicy, Solver, SolverOptions, StepDiagnostics};
