//! Moving-mesh SSP-RK3 time stepping with sub-cell flux limiting.
//!
//! One step: redistribute the mesh once and freeze the node velocities,
//! then run the three stages. Every stage reconstructs, checks the accuracy
//! CFL condition `lambda_j * alpha <= 1/6`, limits the interface fluxes and
//! applies the length-weighted update. A failed check halves `dt` and
//! restarts the step with the same velocities.

use crate::error::{MeshError, ModelError, SolverError};
use crate::limiter::{blend_flux, limit_interface, SubCellPair};
use crate::mesh::{
    advance_cell_sizes, equidistribute, grid_velocities, limit_mesh, monitor_function, smooth_monitor,
    stage_node_positions, MeshMotion, MeshState, MonitorSettings,
};
use crate::state::State;
use crate::systems::{average_alpha, FacePair, FluxInput, ReportKind, SystemModel, GHOSTS};
use crate::weno::{reconstruct_characteristic, reconstruct_components, StateReconstruction};

/// Convex weights `xi` of the three SSP-RK3 stages.
pub const SSP_XI: [f64; 3] = [0.0, 0.75, 1.0 / 3.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CflPolicy {
    pub cfl: f64,
    pub bp_limit: f64,
    pub ap_limit: f64,
    pub max_halvings: usize,
    pub max_steps: usize,
}

impl Default for CflPolicy {
    fn default() -> Self {
        Self {
            cfl: 0.16,
            bp_limit: 0.5,
            ap_limit: 1.0 / 6.0,
            max_halvings: 30,
            max_steps: 1_000_000,
        }
    }
}

impl CflPolicy {
    pub fn with_cfl(cfl: f64) -> Self {
        Self { cfl, ..Self::default() }
    }
}

/// `dt = cfl * min_j dx_j / alpha`.
pub fn nominal_dt(min_dx: f64, alpha: f64, cfl: f64) -> f64 {
    cfl * min_dx / alpha.max(crate::systems::ALPHA_FLOOR)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    /// Zero-gradient extrapolation.
    Free,
}

/// Pad averages and sizes with [`GHOSTS`] cells per side. Free boundaries
/// replicate the end value and mirror the sizes.
pub fn pad_cells<const D: usize>(
    values: &[State<D>],
    sizes: &[f64],
    boundary: Boundary,
) -> (Vec<State<D>>, Vec<f64>) {
    let n = values.len();
    let mut u = Vec::with_capacity(n + 2 * GHOSTS);
    let mut h = Vec::with_capacity(n + 2 * GHOSTS);
    for k in (1..=GHOSTS).rev() {
        match boundary {
            Boundary::Periodic => {
                u.push(values[n - k]);
                h.push(sizes[n - k]);
            }
            Boundary::Free => {
                u.push(values[0]);
                h.push(sizes[k - 1]);
            }
        }
    }
    u.extend_from_slice(values);
    h.extend_from_slice(sizes);
    for k in 0..GHOSTS {
        match boundary {
            Boundary::Periodic => {
                u.push(values[k]);
                h.push(sizes[k]);
            }
            Boundary::Free => {
                u.push(values[n - 1]);
                h.push(sizes[n - 1 - k]);
            }
        }
    }
    (u, h)
}

/// Reconstruct cells `-1..=N` from padded data.
pub fn reconstruct_field<M, const D: usize>(
    model: &M,
    averages: &[State<D>],
    sizes: &[f64],
) -> Result<Vec<StateReconstruction<D>>, ModelError>
where
    M: SystemModel<D> + ?Sized,
{
    let n = averages.len() - 2 * GHOSTS;
    (GHOSTS - 1..=GHOSTS + n)
        .map(|c| {
            let states: [State<D>; 5] = std::array::from_fn(|k| averages[c + k - 2]);
            let h: [f64; 5] = std::array::from_fn(|k| sizes[c + k - 2]);
            Ok(match model.characteristic_basis(&averages[c])? {
                Some(basis) => reconstruct_characteristic(&states, &h, &basis)?,
                None => reconstruct_components(&states, &h)?,
            })
        })
        .collect()
}

/// Sub-cell states of every cell:
/// `u^- = u + 2 lambda (H_{j-1/2} - (G_j - omega_{j-1/2} u))` and
/// `u^+ = u - 2 lambda (H_{j+1/2} - (G_j - omega_{j+1/2} u))`,
/// with `G_j` the reference flux of the cell. Their mean is the flux-form
/// stage increment.
pub fn sub_cell_states<const D: usize>(
    averages: &[State<D>],
    faces: &[FacePair<D>],
    reference: &[State<D>],
    omega: &[f64],
    lambda: &[f64],
) -> (Vec<State<D>>, Vec<State<D>>) {
    let mut minus = Vec::with_capacity(averages.len());
    let mut plus = Vec::with_capacity(averages.len());
    for (j, u) in averages.iter().enumerate() {
        let l2 = 2.0 * lambda[j];
        minus.push(*u + (faces[j].from_right - (reference[j] - *u * omega[j])) * l2);
        plus.push(*u - (faces[j + 1].from_left - (reference[j] - *u * omega[j + 1])) * l2);
    }
    (minus, plus)
}

/// Length-weighted stage update
/// `dx^(l) u^(l) = xi dx^n u^n + (1 - xi) (dx^(l-1) u^(l-1) - dt (H_R - H_L))`.
#[allow(clippy::too_many_arguments)]
pub fn stage_update<const D: usize>(
    u_prev: &[State<D>],
    dx_prev: &[f64],
    u_n: &[State<D>],
    dx_n: &[f64],
    faces: &[FacePair<D>],
    dt: f64,
    xi: f64,
    dx_new: &[f64],
) -> Vec<State<D>> {
    (0..u_prev.len())
        .map(|j| {
            let flux = faces[j + 1].from_left - faces[j].from_right;
            let step = (u_prev[j] * dx_prev[j] - flux * dt) * (1.0 - xi);
            let total = if xi == 0.0 { step } else { u_n[j] * (xi * dx_n[j]) + step };
            total * (1.0 / dx_new[j])
        })
        .collect()
}

/// Interface blending factors and the blended faces of one stage.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitedFaces<const D: usize> {
    pub faces: Vec<FacePair<D>>,
    pub theta: Vec<f64>,
}

/// Where a limiting failure happened.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitFailure {
    pub cell: usize,
    pub detail: String,
}

/// Blend high- and first-order faces so that every sub-cell state stays
/// admissible.
pub fn limit_faces<M, const D: usize>(
    model: &M,
    averages: &[State<D>],
    high: &[FacePair<D>],
    low: &[FacePair<D>],
    reference: &[State<D>],
    omega: &[f64],
    lambda: &[f64],
    periodic: bool,
) -> Result<LimitedFaces<D>, LimitFailure>
where
    M: SystemModel<D> + ?Sized,
{
    let n = averages.len();
    let (h_minus, h_plus) = sub_cell_states(averages, high, reference, omega, lambda);
    let (l_minus, l_plus) = sub_cell_states(averages, low, reference, omega, lambda);
    let mut theta = vec![1.0; n + 1];
    for i in 0..=n {
        if periodic && i == n {
            theta[n] = theta[0];
            continue;
        }
        let mut sides = Vec::with_capacity(2);
        let left = if i > 0 {
            Some(i - 1)
        } else if periodic {
            Some(n - 1)
        } else {
            None
        };
        if let Some(l) = left {
            sides.push(SubCellPair {
                high: h_plus[l],
                low: l_plus[l],
            });
        }
        if i < n {
            sides.push(SubCellPair {
                high: h_minus[i],
                low: l_minus[i],
            });
        }
        theta[i] = limit_interface(model, &sides).map_err(|e| LimitFailure {
            cell: if i < n { i } else { n - 1 },
            detail: e.to_string(),
        })?;
    }
    let faces = high
        .iter()
        .zip(low)
        .zip(&theta)
        .map(|((h, l), &t)| FacePair {
            from_left: blend_flux(&h.from_left, &l.from_left, t),
            from_right: blend_flux(&h.from_right, &l.from_right, t),
        })
        .collect();
    Ok(LimitedFaces { faces, theta })
}

/// Raw (unsmoothed, non-negative) monitor values `phi^0` per cell.
pub trait MonitorSource<const D: usize>: Send + Sync {
    fn raw_monitor(&self, field: &[State<D>], mesh: &MeshState, step: usize) -> Result<Vec<f64>, MeshError>;
}

/// Monitor settings plus the source of the raw monitor.
#[derive(Clone, Copy)]
pub struct Redistribution<'a, const D: usize> {
    pub settings: MonitorSettings,
    pub source: &'a dyn MonitorSource<D>,
}

/// Target nodes for the next step and the cells whose monitor must be
/// zeroed at the following redistribution.
pub fn redistribute<const D: usize>(
    field: &[State<D>],
    mesh: &MeshState,
    redistribution: &Redistribution<'_, D>,
    zero_flags: &[bool],
    step: usize,
) -> Result<(Vec<f64>, Vec<bool>), MeshError> {
    let settings = &redistribution.settings;
    let mut phi0 = redistribution.source.raw_monitor(field, mesh, step)?;
    for (p, &f) in phi0.iter_mut().zip(zero_flags) {
        if f {
            *p = 0.0;
        }
    }
    let phi = smooth_monitor(&phi0, settings.smoothing_steps);
    let sigma = monitor_function(&phi, mesh, settings.beta)?;
    let candidate = equidistribute(mesh, &sigma, settings.jacobi_steps);
    limit_mesh(&candidate, mesh, settings.dx_min(mesh))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub policy: CflPolicy,
    /// Bound-preserving flux limiting.
    pub limiter: bool,
    pub boundary: Boundary,
    /// Keep the node positions of every accepted step.
    pub record_mesh: bool,
}

impl SolverOptions {
    pub fn new(boundary: Boundary) -> Self {
        Self {
            policy: CflPolicy::default(),
            limiter: true,
            boundary,
            record_mesh: false,
        }
    }
}

/// Per-step record.
#[derive(Clone, Debug, PartialEq)]
pub struct StepDiagnostics {
    pub step: usize,
    /// Time at the end of the step.
    pub t: f64,
    pub dt: f64,
    pub halvings: usize,
    /// Smallest blending factor over all stages.
    pub theta_min: f64,
    /// Interfaces limited in at least one stage.
    pub active_interfaces: usize,
    /// Minimum of every constraint over cells and stages.
    pub constraint_mins: Vec<f64>,
    /// Model report values aggregated over cells and stages.
    pub reports: Vec<f64>,
}

enum Attempt {
    Halve,
    Fatal(SolverError),
}

struct StepOutcome<const D: usize> {
    field: Vec<State<D>>,
    theta_min: f64,
    active: Vec<bool>,
    constraint_mins: Vec<f64>,
    reports: Vec<f64>,
}

/// Time integrator for one simulation.
pub struct Solver<'a, M: SystemModel<D> + ?Sized, const D: usize> {
    model: &'a M,
    options: SolverOptions,
    redistribution: Option<Redistribution<'a, D>>,
    mesh: MeshState,
    field: Vec<State<D>>,
    t: f64,
    steps: usize,
    zero_flags: Vec<bool>,
    diagnostics: Vec<StepDiagnostics>,
    mesh_history: Vec<(f64, Vec<f64>)>,
}

impl<'a, M: SystemModel<D> + ?Sized, const D: usize> Solver<'a, M, D> {
    /// `redistribution = None` keeps the mesh fixed.
    pub fn new(
        model: &'a M,
        mesh: MeshState,
        field: Vec<State<D>>,
        options: SolverOptions,
        redistribution: Option<Redistribution<'a, D>>,
    ) -> Result<Self, SolverError> {
        let n = mesh.n_cells();
        if field.len() != n {
            return Err(SolverError::Model {
                step: 0,
                source: ModelError::InvalidParameters(format!("{} averages for {n} cells", field.len())),
            });
        }
        if options.boundary == Boundary::Periodic && !model.supports_periodic() {
            return Err(SolverError::Model {
                step: 0,
                source: ModelError::InvalidParameters(format!("{} does not support periodic boundaries", model.name())),
            });
        }
        if let Some(r) = &redistribution {
            r.settings.validate().map_err(|source| SolverError::Mesh { step: 0, source })?;
        }
        for (cell, u) in field.iter().enumerate() {
            let ok = if options.limiter {
                model.is_admissible(u)
            } else {
                model.is_physical(u)
            };
            if !ok {
                return Err(SolverError::Inadmissible {
                    step: 0,
                    stage: 0,
                    cell,
                    detail: format!("initial state {:?}", u.0),
                });
            }
        }
        let mesh_history = if options.record_mesh {
            vec![(0.0, mesh.nodes.clone())]
        } else {
            Vec::new()
        };
        Ok(Self {
            model,
            options,
            redistribution,
            mesh,
            field,
            t: 0.0,
            steps: 0,
            zero_flags: vec![false; n],
            diagnostics: Vec::new(),
            mesh_history,
        })
    }

    pub fn field(&self) -> &[State<D>] {
        &self.field
    }

    pub fn mesh(&self) -> &MeshState {
        &self.mesh
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn diagnostics(&self) -> &[StepDiagnostics] {
        &self.diagnostics
    }

    pub fn mesh_history(&self) -> &[(f64, Vec<f64>)] {
        &self.mesh_history
    }

    /// `sum_j dx_j u_j`.
    pub fn total(&self) -> State<D> {
        self.field
            .iter()
            .zip(&self.mesh.cell_sizes)
            .fold(State::zero(), |acc, (u, h)| acc + *u * *h)
    }

    /// Advance until `t_final`, clipping the last step.
    pub fn run(&mut self, t_final: f64) -> Result<(), SolverError> {
        while self.t < t_final {
            if self.steps >= self.options.policy.max_steps {
                return Err(SolverError::MaxSteps {
                    max_steps: self.options.policy.max_steps,
                    t_final,
                });
            }
            self.step(t_final)?;
        }
        Ok(())
    }

    /// One accepted time step, never past `t_final`.
    pub fn step(&mut self, t_final: f64) -> Result<&StepDiagnostics, SolverError> {
        let step = self.steps + 1;
        let n = self.mesh.n_cells();
        let model_err = |source| SolverError::Model { step, source };
        let mesh_err = |source| SolverError::Mesh { step, source };

        let alpha_n = average_alpha(self.model, &self.field, &vec![0.0; n + 1]).map_err(model_err)?;
        let dt_nominal = nominal_dt(self.mesh.min_size(), alpha_n, self.options.policy.cfl);
        let (omega, flags) = match &self.redistribution {
            Some(r) => {
                let (nodes, flags) = redistribute(&self.field, &self.mesh, r, &self.zero_flags, step).map_err(mesh_err)?;
                let mut w = grid_velocities(&self.mesh.nodes, &nodes, dt_nominal).map_err(mesh_err)?.velocities;
                self.model.clamp_velocities(&mut w, alpha_n);
                (w, flags)
            }
            None => (vec![0.0; n + 1], vec![false; n]),
        };

        let remaining = t_final - self.t;
        let clipped = dt_nominal >= remaining;
        let mut dt = if clipped { remaining } else { dt_nominal };
        for halvings in 0..=self.options.policy.max_halvings {
            match self.attempt(step, dt, &omega) {
                Ok(out) => {
                    let motion = MeshMotion {
                        velocities: omega.clone(),
                        dt,
                    };
                    let nodes = stage_node_positions(&self.mesh.nodes, &motion, 3);
                    self.mesh = MeshState::from_nodes(nodes).map_err(mesh_err)?;
                    self.field = out.field;
                    self.t = if clipped && halvings == 0 { t_final } else { self.t + dt };
                    self.steps = step;
                    self.zero_flags = flags;
                    if self.options.record_mesh {
                        self.mesh_history.push((self.t, self.mesh.nodes.clone()));
                    }
                    self.diagnostics.push(StepDiagnostics {
                        step,
                        t: self.t,
                        dt,
                        halvings,
                        theta_min: out.theta_min,
                        active_interfaces: out.active.iter().filter(|&&a| a).count(),
                        constraint_mins: out.constraint_mins,
                        reports: out.reports,
                    });
                    return Ok(self.diagnostics.last().expect("just pushed"));
                }
                Err(Attempt::Halve) => dt *= 0.5,
                Err(Attempt::Fatal(e)) => return Err(e),
            }
        }
        Err(SolverError::MaxHalvings {
            step,
            halvings: self.options.policy.max_halvings,
        })
    }

    fn attempt(&self, step: usize, dt: f64, omega: &[f64]) -> Result<StepOutcome<D>, Attempt> {
        let model = self.model;
        let n = self.mesh.n_cells();
        let periodic = self.options.boundary == Boundary::Periodic;
        let fatal_model = |source| Attempt::Fatal(SolverError::Model { step, source });
        let motion = MeshMotion {
            velocities: omega.to_vec(),
            dt,
        };
        let specs = model.specs();
        let report_kinds = model.report_names();

        let dx_n = &self.mesh.cell_sizes;
        let u_n = &self.field;
        let mut dx_prev = dx_n.clone();
        let mut u_prev = u_n.clone();
        let mut theta_min = 1.0f64;
        let mut active = vec![false; n + 1];
        let mut constraint_mins = vec![f64::INFINITY; specs.len()];
        let mut reports: Vec<f64> = report_kinds
            .iter()
            .map(|(_, k)| match k {
                ReportKind::Min => f64::INFINITY,
                ReportKind::Max => f64::NEG_INFINITY,
            })
            .collect();

        for (s, &xi) in SSP_XI.iter().enumerate() {
            let stage = s + 1;
            let mut lambda = Vec::with_capacity(n);
            for j in 0..n {
                let den = dx_prev[j] + dt * (omega[j + 1] - omega[j]);
                if !(den > 0.0) {
                    return Err(Attempt::Halve);
                }
                lambda.push(dt / den);
            }

            let alpha = average_alpha(model, &u_prev, omega).map_err(fatal_model)?;
            for j in 0..n {
                if lambda[j] * model.cfl_speed(alpha, omega[j], omega[j + 1]) > self.options.policy.ap_limit {
                    return Err(Attempt::Halve);
                }
            }
            let (avg, sizes) = pad_cells(&u_prev, &dx_prev, self.options.boundary);
            let recon = reconstruct_field(model, &avg, &sizes).map_err(fatal_model)?;

            let input = FluxInput {
                averages: &avg,
                recon: &recon,
                omega,
                alpha,
                periodic,
            };
            let fluxes = model.stage_fluxes(&input).map_err(fatal_model)?;
            let faces = if self.options.limiter {
                let limited = limit_faces(
                    model,
                    &u_prev,
                    &fluxes.high,
                    &fluxes.low,
                    &fluxes.reference,
                    omega,
                    &lambda,
                    periodic,
                )
                .map_err(|f| {
                    Attempt::Fatal(SolverError::BoundPreservation {
                        step,
                        stage,
                        cell: f.cell,
                        detail: f.detail,
                    })
                })?;
                for (i, &t) in limited.theta.iter().enumerate() {
                    theta_min = theta_min.min(t);
                    active[i] |= t < 1.0;
                }
                limited.faces
            } else {
                fluxes.high
            };

            let dx_new = advance_cell_sizes(dx_n, &dx_prev, &motion, xi)
                .map_err(|source| Attempt::Fatal(SolverError::Mesh { step, source }))?;
            let u_new = stage_update(&u_prev, &dx_prev, u_n, dx_n, &faces, dt, xi, &dx_new);

            for (cell, u) in u_new.iter().enumerate() {
                let ok = if self.options.limiter {
                    model.is_admissible(u)
                } else {
                    model.is_physical(u)
                };
                if !ok {
                    return Err(Attempt::Fatal(SolverError::Inadmissible {
                        step,
                        stage,
                        cell,
                        detail: format!("{:?}", u.0),
                    }));
                }
                for (k, m) in constraint_mins.iter_mut().enumerate() {
                    *m = m.min(model.constraint_value(k, u));
                }
                for (k, (r, (_, kind))) in reports.iter_mut().zip(&report_kinds).enumerate() {
                    let v = model.report_value(k, u);
                    *r = match kind {
                        ReportKind::Min => r.min(v),
                        ReportKind::Max => r.max(v),
                    };
                }
            }
            u_prev = u_new;
            dx_prev = dx_new;
        }
        Ok(StepOutcome {
            field: u_prev,
            theta_min,
            active,
            constraint_mins,
            reports,
        })
    }
}
