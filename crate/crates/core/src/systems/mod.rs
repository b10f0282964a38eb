//! Hyperbolic models and the interface fluxes built from them.

pub mod euler;
pub mod five_eq;
pub mod scalar;

use crate::error::ModelError;
use crate::limiter::ConstraintSet;
use crate::state::State;
use crate::weno::{CharacteristicBasis, StateReconstruction};

pub use euler::EulerModel;
pub use five_eq::{FiveEqModel, StiffenedGas};
pub use scalar::{ScalarFlux, ScalarModel};

/// Floor substituted for a vanishing wave-speed bound.
pub const ALPHA_FLOOR: f64 = 1e-12;

/// Scalar fields a mesh monitor can be built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonitorQuantity {
    /// The unknown itself for scalar laws, density for systems.
    Primary,
    Density,
    Velocity,
    VolumeFraction,
}

/// How a diagnostic quantity is aggregated over cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportKind {
    Min,
    Max,
}

/// Interface flux as seen from the cell on each side.
///
/// For conservative models both views coincide. Models with
/// non-conservative products express the flux in the frame of the
/// respective cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FacePair<const D: usize> {
    pub from_left: State<D>,
    pub from_right: State<D>,
}

impl<const D: usize> FacePair<D> {
    pub fn shared(f: State<D>) -> Self {
        Self {
            from_left: f,
            from_right: f,
        }
    }
}

/// Number of ghost cells padded on each side of the averages.
pub const GHOSTS: usize = 3;

/// Data needed to evaluate all interface fluxes of one stage.
pub struct FluxInput<'a, const D: usize> {
    /// Cell averages padded with [`GHOSTS`] ghost cells per side.
    pub averages: &'a [State<D>],
    /// Reconstructions of cells `-1..=N`; entry `j + 1` belongs to cell `j`.
    pub recon: &'a [StateReconstruction<D>],
    /// Interface velocities, `N + 1` values.
    pub omega: &'a [f64],
    pub alpha: f64,
    pub periodic: bool,
}

impl<'a, const D: usize> FluxInput<'a, D> {
    pub fn n_cells(&self) -> usize {
        self.omega.len() - 1
    }

    /// Average of cell `j`, `-GHOSTS <= j < N + GHOSTS`.
    pub fn average(&self, j: isize) -> State<D> {
        self.averages[(j + GHOSTS as isize) as usize]
    }

    /// `(U^-, U^+)` at interface `i`.
    pub fn interface_values(&self, i: usize) -> (State<D>, State<D>) {
        (self.recon[i].right, self.recon[i + 1].left)
    }
}

/// High- and first-order fluxes of one stage plus the per-cell reference
/// flux `F(u_j) - R_j` used by the consistency term of the sub-cell states.
#[derive(Clone, Debug, PartialEq)]
pub struct StageFluxes<const D: usize> {
    pub high: Vec<FacePair<D>>,
    pub low: Vec<FacePair<D>>,
    pub reference: Vec<State<D>>,
}

/// A hyperbolic system `U_t + F(U)_x = B(U) U_x` in one dimension.
pub trait SystemModel<const D: usize>: ConstraintSet<D> + Send + Sync {
    fn name(&self) -> &'static str;

    fn component_names(&self) -> [&'static str; D];

    fn flux(&self, u: &State<D>) -> State<D>;

    /// Membership in the set the bound-preserving scheme must stay in.
    fn is_admissible(&self, u: &State<D>) -> bool;

    /// Whether derived quantities (wave speeds, eigenvectors) can be
    /// evaluated at `u`. An unlimited run stops once this fails.
    fn is_physical(&self, u: &State<D>) -> bool {
        self.is_admissible(u)
    }

    /// Bound on the characteristic speeds of `u` relative to a grid moving
    /// with velocity `omega`; `None` when it cannot be evaluated.
    fn local_speed(&self, u: &State<D>, omega: f64) -> Option<f64>;

    /// Post-processing of the stage wave-speed bound.
    fn finalize_alpha(&self, alpha: f64, _omega: &[f64]) -> f64 {
        alpha
    }

    /// Speed entering the accuracy CFL check `lambda * speed <= 1/6`.
    fn cfl_speed(&self, alpha: f64, _omega_l: f64, _omega_r: f64) -> f64 {
        alpha
    }

    /// Restrict grid velocities after redistribution to `[-alpha, alpha]`,
    /// where `alpha` is the wave-speed bound on the static grid.
    fn clamp_velocities(&self, omega: &mut [f64], alpha: f64) {
        for w in omega.iter_mut() {
            *w = w.clamp(-alpha, alpha);
        }
    }

    /// Eigenvector basis for characteristic reconstruction; `None` means
    /// componentwise reconstruction.
    fn characteristic_basis(&self, _u: &State<D>) -> Result<Option<CharacteristicBasis<D>>, ModelError> {
        Ok(None)
    }

    fn monitor_quantity(&self, u: &State<D>, q: MonitorQuantity) -> Option<f64>;

    fn report_names(&self) -> Vec<(&'static str, ReportKind)>;

    fn report_value(&self, k: usize, u: &State<D>) -> f64;

    /// Whether the model can run with periodic boundaries.
    fn supports_periodic(&self) -> bool {
        true
    }

    /// All interface fluxes of one stage.
    fn stage_fluxes(&self, input: &FluxInput<'_, D>) -> Result<StageFluxes<D>, ModelError> {
        Ok(conservative_stage_fluxes(self, input))
    }
}

/// `H(omega, U) = F(U) - omega U`.
pub fn moving_flux<M: SystemModel<D> + ?Sized, const D: usize>(model: &M, omega: f64, u: &State<D>) -> State<D> {
    model.flux(u) - *u * omega
}

/// Lax-Friedrichs flux on a moving interface.
pub fn lf_flux<M: SystemModel<D> + ?Sized, const D: usize>(
    model: &M,
    omega: f64,
    um: &State<D>,
    up: &State<D>,
    alpha: f64,
) -> State<D> {
    (moving_flux(model, omega, um) + moving_flux(model, omega, up)) * 0.5 - (*up - *um) * (0.5 * alpha)
}

/// Lax-Friedrichs fluxes for a conservative model.
pub fn conservative_stage_fluxes<M: SystemModel<D> + ?Sized, const D: usize>(
    model: &M,
    input: &FluxInput<'_, D>,
) -> StageFluxes<D> {
    let n = input.n_cells();
    let mut high = Vec::with_capacity(n + 1);
    let mut low = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let w = input.omega[i];
        let (um, up) = input.interface_values(i);
        high.push(FacePair::shared(lf_flux(model, w, &um, &up, input.alpha)));
        let (am, ap) = (input.average(i as isize - 1), input.average(i as isize));
        low.push(FacePair::shared(lf_flux(model, w, &am, &ap, input.alpha)));
    }
    let reference = (0..n).map(|j| model.flux(&input.average(j as isize))).collect();
    StageFluxes { high, low, reference }
}

/// Wave-speed bound: the largest local speed over cell averages, relative
/// to both adjacent interface velocities.
pub fn average_alpha<M: SystemModel<D> + ?Sized, const D: usize>(
    model: &M,
    averages: &[State<D>],
    omega: &[f64],
) -> Result<f64, ModelError> {
    let mut alpha = 0.0f64;
    for (j, u) in averages.iter().enumerate() {
        for w in [omega[j], omega[j + 1]] {
            let s = model.local_speed(u, w).ok_or_else(|| {
                ModelError::Inadmissible(format!("wave speed undefined in cell {j}: {:?}", u.0))
            })?;
            alpha = alpha.max(s);
        }
    }
    Ok(model.finalize_alpha(alpha, omega).max(ALPHA_FLOOR))
}
