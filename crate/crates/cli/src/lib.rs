//! Configuration and artifact writing for the `amm-bp` binary.

use std::fs;
use std::path::{Path, PathBuf};

use amm_core::harness::output::{bounds_csv, diagnostics_csv, mesh_csv, solution_csv, table_csv, table_md};
use amm_core::harness::problems::DEFAULT_SEED;
use amm_core::harness::{convergence_table, run_problem, ConvergenceRow, HarnessError, MonitorId, ProblemId, RunOptions, RunOutcome};
use amm_core::{CflPolicy, SolverError};
use serde::Deserialize;
use thiserror::Error;

/// Largest CFL number for which the limiter leaves smooth solutions at full
/// accuracy.
pub const ACCURACY_CFL: f64 = 1.0 / 6.0;

/// A run described by a JSON document. Only `problem` is required.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: String,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "yes")]
    pub limiter: bool,
    #[serde(default = "yes")]
    pub moving: bool,
    pub beta: Option<f64>,
    /// Smoothing passes of the monitor.
    pub m: Option<usize>,
    /// Jacobi sweeps of the equidistribution.
    pub s: Option<usize>,
    pub monitor: Option<String>,
    pub out: Option<PathBuf>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub t_final: Option<f64>,
    /// Speed of the advection problem.
    pub a: Option<f64>,
    pub max_halvings: Option<usize>,
    pub max_steps: Option<usize>,
}

fn default_cfl() -> f64 {
    CflPolicy::default().cfl
}

fn yes() -> bool {
    true
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// Help text listing every key and its default.
pub const CONFIG_HELP: &str = "\
Configuration keys (JSON object; unknown keys are rejected):
  problem       advection | burgers | euler-strong-shock | fiveq-shock-tube | fiveq-gas-water (required)
  N             number of cells (default: per problem)
  cfl           CFL number (default 0.16)
  limiter       bound-preserving limiter (default true)
  moving        adaptive mesh motion (default true)
  beta          monitor intensity in (0, 1) (default: per problem)
  m             monitor smoothing passes (default 8)
  s             equidistribution sweeps (default 8)
  monitor       advect-random | burgers | euler-rho | fiveq-v1 | fiveq-v2 | fiveq-rp2 (default: per problem)
  out           output directory (default ./amm-out)
  seed          random monitor seed (default 20240601)
  t_final       final time (default: per problem)
  a             advection speed (default 5)
  max_halvings  step halvings before aborting (default 30)
  max_steps     steps before aborting (default 1000000)";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("run stopped at t = {t}: {source}")]
    Run {
        t: f64,
        #[source]
        source: SolverError,
    },
    #[error("convergence row N = {n} failed: {detail}")]
    Row { n: usize, detail: String },
}

impl CliError {
    /// 2 for configuration errors, 3 for runs that stopped early, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run { .. } | CliError::Row { .. } => 3,
            CliError::Io { .. } => 1,
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        CliError::Config(e.to_string())
    }
}

/// Parse and validate a configuration. Returns warnings alongside.
pub fn parse_config(text: &str) -> Result<(RunConfig, Vec<String>), CliError> {
    let config: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let warnings = config.validate()?;
    Ok((config, warnings))
}

impl RunConfig {
    fn validate(&self) -> Result<Vec<String>, CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let problem = self.problem_id()?;
        if let Some(b) = self.beta {
            if !(b > 0.0 && b < 1.0) {
                return bad(format!("beta must lie in (0, 1), got {b}"));
            }
        }
        if !(self.cfl > 0.0) {
            return bad(format!("cfl must be positive, got {}", self.cfl));
        }
        if self.n == Some(0) {
            return bad("N must be positive".into());
        }
        if let Some(t) = self.t_final {
            if !(t > 0.0) {
                return bad(format!("t_final must be positive, got {t}"));
            }
        }
        if self.max_steps == Some(0) {
            return bad("max_steps must be positive".into());
        }
        if let Some(m) = &self.monitor {
            m.parse::<MonitorId>().map_err(CliError::Config)?;
        }
        if self.a.is_some() && problem != ProblemId::Advection {
            return bad(format!("`a` only applies to the advection problem, not `{problem}`"));
        }
        let mut warnings = Vec::new();
        if self.limiter && self.cfl > ACCURACY_CFL {
            warnings.push(format!(
                "cfl {} exceeds {ACCURACY_CFL:.4}; steps will be halved until the limiter keeps full accuracy",
                self.cfl
            ));
        }
        Ok(warnings)
    }

    pub fn problem_id(&self) -> Result<ProblemId, CliError> {
        self.problem.parse().map_err(CliError::Config)
    }

    pub fn options(&self) -> Result<RunOptions, CliError> {
        let mut o = RunOptions::new(self.problem_id()?);
        if let Some(n) = self.n {
            o.n = n;
        }
        o.cfl = self.cfl;
        o.limiter = self.limiter;
        o.moving = self.moving;
        o.beta = self.beta;
        o.smoothing_steps = self.m;
        o.jacobi_steps = self.s;
        o.monitor = self.monitor.as_deref().map(str::parse).transpose().map_err(CliError::Config)?;
        o.seed = self.seed;
        o.t_final = self.t_final;
        if let Some(a) = self.a {
            o.advection_speed = a;
        }
        if let Some(h) = self.max_halvings {
            o.max_halvings = h;
        }
        if let Some(s) = self.max_steps {
            o.max_steps = s;
        }
        Ok(o)
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Io { path, source })
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Run once and write `solution.csv`, `mesh.csv`, `bounds.csv` and
/// `diagnostics.csv`. Files are written even when the run stops early; the
/// stop is then returned as [`CliError::Run`].
pub fn run(options: &RunOptions, dir: &Path) -> Result<RunOutcome, CliError> {
    let outcome = run_problem(options)?;
    ensure_dir(dir)?;
    write(dir, "solution.csv", &solution_csv(&outcome))?;
    write(dir, "mesh.csv", &mesh_csv(&outcome))?;
    write(dir, "bounds.csv", &bounds_csv(&outcome))?;
    write(dir, "diagnostics.csv", &diagnostics_csv(&outcome))?;
    match &outcome.failure {
        Some(e) => Err(CliError::Run {
            t: outcome.t,
            source: e.clone(),
        }),
        None => Ok(outcome),
    }
}

/// Convergence study; writes `table.csv` and `table.md`.
pub fn converge(options: &RunOptions, ns: &[usize], dir: &Path) -> Result<Vec<ConvergenceRow>, CliError> {
    if ns.is_empty() || ns.contains(&0) {
        return Err(CliError::Config("--Ns needs positive cell counts".into()));
    }
    let rows = convergence_table(options, ns)?;
    ensure_dir(dir)?;
    write(dir, "table.csv", &table_csv(&rows))?;
    write(dir, "table.md", &table_md(&rows))?;
    if let Some(r) = rows.iter().find(|r| r.failure.is_some()) {
        return Err(CliError::Row {
            n: r.n,
            detail: r.failure.clone().unwrap_or_default(),
        });
    }
    Ok(rows)
}
