//! Registered test problems and the generic run driver.

use std::fmt;
use std::str::FromStr;

use super::exact::{burgers_exact_averages, convergence_rate, gauss_legendre_mean, l1_error, sin4};
use super::monitors::{DerivativeMonitor, MonitorId, RandomMonitor};
use super::HarnessError;
use crate::error::SolverError;
use crate::limiter::Bounds;
use crate::mesh::{MeshState, MonitorSettings};
use crate::state::State;
use crate::systems::{EulerModel, FiveEqModel, ReportKind, ScalarModel, StiffenedGas, SystemModel};
use crate::timestepper::{Boundary, CflPolicy, MonitorSource, Redistribution, Solver, SolverOptions, StepDiagnostics};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemId {
    /// `u_t + a u_x = 0`, `u = 1`, periodic on `[0, 2 pi]`.
    Advection,
    /// Burgers with `u0 = sin^4 x`, periodic on `[0, 2 pi]`.
    Burgers,
    /// Euler Riemann problem with a `10^6` pressure ratio on `[-1, 1]`.
    EulerStrongShock,
    /// Air-water shock tube on `[-5, 5]`.
    FiveqShockTube,
    /// Gas-water Riemann problem on `[0, 1]`.
    FiveqGasWater,
}

impl ProblemId {
    pub const ALL: [ProblemId; 5] = [
        ProblemId::Advection,
        ProblemId::Burgers,
        ProblemId::EulerStrongShock,
        ProblemId::FiveqShockTube,
        ProblemId::FiveqGasWater,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemId::Advection => "advection",
            ProblemId::Burgers => "burgers",
            ProblemId::EulerStrongShock => "euler-strong-shock",
            ProblemId::FiveqShockTube => "fiveq-shock-tube",
            ProblemId::FiveqGasWater => "fiveq-gas-water",
        }
    }

    pub fn spec(&self) -> ProblemSpec {
        let tau = std::f64::consts::TAU;
        let (domain, boundary, t_final, monitor, beta, default_n) = match self {
            ProblemId::Advection => ((0.0, tau), Boundary::Periodic, 2.0, MonitorId::AdvectRandom, 0.6, 80),
            ProblemId::Burgers => ((0.0, tau), Boundary::Periodic, 0.4, MonitorId::Burgers, 0.6, 80),
            ProblemId::EulerStrongShock => ((-1.0, 1.0), Boundary::Free, 8e-4, MonitorId::EulerRho, 0.3, 100),
            ProblemId::FiveqShockTube => ((-5.0, 5.0), Boundary::Free, 1.0, MonitorId::FiveqV1, 0.3, 100),
            ProblemId::FiveqGasWater => ((0.0, 1.0), Boundary::Free, 2.4e-4, MonitorId::FiveqRp2, 0.4, 200),
        };
        ProblemSpec {
            id: *self,
            domain,
            boundary,
            t_final,
            monitor,
            beta,
            default_n,
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProblemId::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown problem `{s}`"))
    }
}

/// Fixed data of a registered problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProblemSpec {
    pub id: ProblemId,
    pub domain: (f64, f64),
    pub boundary: Boundary,
    pub t_final: f64,
    pub monitor: MonitorId,
    pub beta: f64,
    pub default_n: usize,
}

/// Seed of the random monitor unless overridden.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Everything that can be varied for a run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub problem: ProblemId,
    pub n: usize,
    pub cfl: f64,
    pub limiter: bool,
    pub moving: bool,
    pub beta: Option<f64>,
    pub smoothing_steps: Option<usize>,
    pub jacobi_steps: Option<usize>,
    pub monitor: Option<MonitorId>,
    pub seed: u64,
    pub t_final: Option<f64>,
    /// Speed `a` of the advection problem.
    pub advection_speed: f64,
    pub record_mesh: bool,
    pub max_halvings: usize,
    pub max_steps: usize,
}

impl RunOptions {
    pub fn new(problem: ProblemId) -> Self {
        let policy = CflPolicy::default();
        Self {
            problem,
            n: problem.spec().default_n,
            cfl: policy.cfl,
            limiter: true,
            moving: true,
            beta: None,
            smoothing_steps: None,
            jacobi_steps: None,
            monitor: None,
            seed: DEFAULT_SEED,
            t_final: None,
            advection_speed: 5.0,
            record_mesh: true,
            max_halvings: policy.max_halvings,
            max_steps: policy.max_steps,
        }
    }

    pub fn t_final(&self) -> f64 {
        self.t_final.unwrap_or(self.problem.spec().t_final)
    }

    pub fn monitor_settings(&self) -> Result<MonitorSettings, HarnessError> {
        let mut s = MonitorSettings::new(self.beta.unwrap_or(self.problem.spec().beta))?;
        if let Some(m) = self.smoothing_steps {
            s.smoothing_steps = m;
        }
        if let Some(m) = self.jacobi_steps {
            s.jacobi_steps = m;
        }
        Ok(s)
    }
}

/// Result of one run; `failure` is set when the run stopped early.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub problem: ProblemId,
    pub model_name: &'static str,
    pub t: f64,
    pub t_final: f64,
    pub steps: usize,
    pub component_names: Vec<&'static str>,
    pub constraint_names: Vec<&'static str>,
    pub report_names: Vec<(&'static str, ReportKind)>,
    pub mesh: MeshState,
    /// Cell averages, one vector of components per cell.
    pub values: Vec<Vec<f64>>,
    pub mesh_history: Vec<(f64, Vec<f64>)>,
    pub diagnostics: Vec<StepDiagnostics>,
    pub failure: Option<SolverError>,
}

impl RunOutcome {
    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn total_halvings(&self) -> usize {
        self.diagnostics.iter().map(|d| d.halvings).sum()
    }

    /// A model report aggregated over every accepted stage of the run.
    pub fn report(&self, name: &str) -> Option<f64> {
        let k = self.report_names.iter().position(|(n, _)| *n == name)?;
        let kind = self.report_names[k].1;
        let values = self.diagnostics.iter().map(|d| d.reports[k]);
        Some(match kind {
            ReportKind::Min => values.fold(f64::INFINITY, f64::min),
            ReportKind::Max => values.fold(f64::NEG_INFINITY, f64::max),
        })
    }

    /// Minimum of a constraint over every accepted stage of the run.
    pub fn constraint_min(&self, name: &str) -> Option<f64> {
        let k = self.constraint_names.iter().position(|n| *n == name)?;
        Some(self.diagnostics.iter().map(|d| d.constraint_mins[k]).fold(f64::INFINITY, f64::min))
    }

    pub fn theta_min(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.theta_min).fold(1.0, f64::min)
    }

    /// One component over all cells.
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[k]).collect()
    }
}

fn simulate<M, const D: usize>(
    model: &M,
    opts: &RunOptions,
    init: impl Fn(f64) -> State<D>,
) -> Result<RunOutcome, HarnessError>
where
    M: SystemModel<D>,
{
    let spec = opts.problem.spec();
    let (a, b) = spec.domain;
    let mesh = MeshState::uniform(a, b, opts.n)?;
    let field: Vec<State<D>> = mesh
        .nodes
        .windows(2)
        .map(|w| gauss_legendre_mean(&init, w[0], w[1], 1))
        .collect();
    let periodic = spec.boundary == Boundary::Periodic;
    let monitor = opts.monitor.unwrap_or(spec.monitor);
    for (q, _, _) in monitor.terms() {
        if model.monitor_quantity(&field[0], q).is_none() {
            return Err(HarnessError::Config(format!(
                "monitor `{monitor}` needs {q:?}, which the {} model does not provide",
                model.name()
            )));
        }
    }
    let random = RandomMonitor { seed: opts.seed };
    let derivative = DerivativeMonitor::new(model, monitor.terms(), periodic);
    let source: &dyn MonitorSource<D> = if monitor == MonitorId::AdvectRandom {
        &random
    } else {
        &derivative
    };
    let redistribution = if opts.moving {
        Some(Redistribution {
            settings: opts.monitor_settings()?,
            source,
        })
    } else {
        None
    };
    if !(opts.cfl > 0.0) {
        return Err(HarnessError::Config(format!("CFL must be positive, got {}", opts.cfl)));
    }
    let options = SolverOptions {
        policy: CflPolicy {
            cfl: opts.cfl,
            max_halvings: opts.max_halvings,
            max_steps: opts.max_steps,
            ..CflPolicy::default()
        },
        limiter: opts.limiter,
        boundary: spec.boundary,
        record_mesh: opts.record_mesh,
    };
    let t_final = opts.t_final();
    if !(t_final > 0.0) {
        return Err(HarnessError::Config(format!("t_final must be positive, got {t_final}")));
    }
    let mut solver = Solver::new(model, mesh, field, options, redistribution)?;
    let failure = solver.run(t_final).err();
    Ok(RunOutcome {
        problem: opts.problem,
        model_name: model.name(),
        t: solver.time(),
        t_final,
        steps: solver.steps(),
        component_names: model.component_names().to_vec(),
        constraint_names: model.specs().iter().map(|s| s.name).collect(),
        report_names: model.report_names(),
        mesh: solver.mesh().clone(),
        values: solver.field().iter().map(|u| u.0.to_vec()).collect(),
        mesh_history: solver.mesh_history().to_vec(),
        diagnostics: solver.diagnostics().to_vec(),
        failure,
    })
}

/// Euler model of the strong-shock problem.
pub fn euler_model() -> EulerModel {
    EulerModel::default()
}

/// Phases of the air-water shock tube.
pub fn shock_tube_model() -> FiveEqModel {
    FiveEqModel::new(
        StiffenedGas { gamma: 1.4, pinf: 0.0 },
        StiffenedGas {
            gamma: 5.5,
            pinf: 1.505,
        },
    )
    .expect("valid phases")
}

/// Phases of the gas-water Riemann problem.
pub fn gas_water_model() -> FiveEqModel {
    FiveEqModel::new(
        StiffenedGas { gamma: 1.4, pinf: 0.0 },
        StiffenedGas {
            gamma: 4.4,
            pinf: 6e8,
        },
    )
    .expect("valid phases")
}

/// Initial state of a problem at `x` (for the scalar problems, `advection`
/// speed is irrelevant).
pub fn burgers_initial(x: f64) -> State<1> {
    State([sin4(x)])
}

pub fn euler_initial(model: &EulerModel, x: f64) -> State<3> {
    if x < 0.0 {
        model.conserved(2.0, 0.0, 1e6)
    } else {
        model.conserved(1.0, 0.0, 1.0)
    }
}

pub fn shock_tube_initial(model: &FiveEqModel, x: f64) -> State<5> {
    if x < 0.0 {
        model.conserved(1.241, 0.991, 0.0, 2.753, 1.0 - 1e-13)
    } else {
        model.conserved(1.241, 0.991, 0.0, 3.059e-4, 1e-13)
    }
}

pub fn gas_water_initial(model: &FiveEqModel, x: f64) -> State<5> {
    if x < 0.3 {
        model.conserved(5.0, 1e3, 0.0, 1e5, 1.0 - 1e-13)
    } else {
        model.conserved(5.0, 1e3, 0.0, 1e9, 1e-13)
    }
}

/// Run a registered problem. Setup problems are errors; a run that stops
/// early is reported through [`RunOutcome::failure`].
pub fn run_problem(opts: &RunOptions) -> Result<RunOutcome, HarnessError> {
    match opts.problem {
        ProblemId::Advection => {
            let model = ScalarModel::advection(opts.advection_speed, Bounds::new(Some(0.0), None));
            simulate(&model, opts, |_| State([1.0]))
        }
        ProblemId::Burgers => {
            let model = ScalarModel::burgers(Bounds::new(Some(0.0), Some(1.0)));
            simulate(&model, opts, burgers_initial)
        }
        ProblemId::EulerStrongShock => {
            let model = euler_model();
            simulate(&model, opts, |x| euler_initial(&model, x))
        }
        ProblemId::FiveqShockTube => {
            let model = shock_tube_model();
            simulate(&model, opts, |x| shock_tube_initial(&model, x))
        }
        ProblemId::FiveqGasWater => {
            let model = gas_water_model();
            simulate(&model, opts, |x| gas_water_initial(&model, x))
        }
    }
}

/// One row of a convergence study.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub l1_error: f64,
    pub dx_max: f64,
    /// Rate against the previous row.
    pub rate: Option<f64>,
    pub u_min: f64,
    pub u_max: f64,
    pub steps: usize,
    pub halvings: usize,
    pub failure: Option<String>,
}

/// L1 error of a finished Burgers run against the exact averages on its
/// final mesh.
pub fn burgers_error(outcome: &RunOutcome) -> Result<f64, HarnessError> {
    let exact = burgers_exact_averages(&outcome.mesh, outcome.t)?;
    l1_error(&outcome.component(0), &exact, &outcome.mesh.cell_sizes)
}

/// Convergence study of the Burgers problem; rows run concurrently and are
/// returned in the order of `ns`.
pub fn convergence_table(base: &RunOptions, ns: &[usize]) -> Result<Vec<ConvergenceRow>, HarnessError> {
    if base.problem != ProblemId::Burgers {
        return Err(HarnessError::Config(format!(
            "convergence studies need an exact solution; `{}` has none",
            base.problem
        )));
    }
    let results: Vec<Result<ConvergenceRow, HarnessError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ns
            .iter()
            .map(|&n| {
                scope.spawn(move || {
                    let opts = RunOptions {
                        n,
                        record_mesh: false,
                        ..base.clone()
                    };
                    let out = run_problem(&opts)?;
                    let failure = out.failure.as_ref().map(|e| e.to_string());
                    let l1 = if out.completed() {
                        burgers_error(&out)?
                    } else {
                        f64::NAN
                    };
                    Ok(ConvergenceRow {
                        n,
                        l1_error: l1,
                        dx_max: out.mesh.max_size(),
                        rate: None,
                        u_min: out.report("min_u").unwrap_or(f64::NAN),
                        u_max: out.report("max_u").unwrap_or(f64::NAN),
                        steps: out.steps,
                        halvings: out.total_halvings(),
                        failure,
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("convergence worker panicked"))
            .collect()
    });
    let mut rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    for k in 1..rows.len() {
        let (prev, cur) = (&rows[k - 1], &rows[k]);
        if prev.failure.is_none() && cur.failure.is_none() {
            rows[k].rate = Some(convergence_rate(prev.l1_error, cur.l1_error, prev.dx_max, cur.dx_max));
        }
    }
    Ok(rows)
}
