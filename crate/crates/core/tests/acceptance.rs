//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.
//!
//! `AMM_BLESS=1` rewrites the golden file used by criterion 8. Criterion
//! numbers given as arguments restrict the run to those criteria.

use std::f64::consts::TAU;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use amm_core::harness::exact::{gauss_legendre_mean, sin4};
use amm_core::harness::problems::{burgers_initial, gas_water_model, shock_tube_model};
use amm_core::harness::{convergence_table, run_problem, ConvergenceRow, MonitorId, ProblemId, RunOptions, RunOutcome};
use amm_core::limiter::{limit_interface, theta_ratio, SubCellPair};
use amm_core::mesh::{equidistribute, limit_mesh, monitor_function, smooth_monitor, MeshMotion};
use amm_core::systems::FacePair;
use amm_core::timestepper::{stage_update, sub_cell_states};
use amm_core::weno::{blended_polynomial, reconstruct, Stencil};
use amm_core::{EulerModel, FiveEqModel, MeshState, MonitorSettings, SolverError, State, SystemModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(checks: Vec<(bool, String)>) -> Self {
        let pass = checks.iter().all(|(ok, _)| *ok);
        let detail = checks
            .into_iter()
            .map(|(ok, msg)| if ok { msg } else { format!("[x] {msg}") })
            .collect::<Vec<_>>()
            .join("; ");
        Self { pass, detail }
    }
}

fn run(opts: &RunOptions) -> RunOutcome {
    run_problem(opts).unwrap_or_else(|e| panic!("{} failed to start: {e}", opts.problem))
}

fn failure_text(out: &RunOutcome) -> String {
    out.failure.as_ref().map_or_else(|| "completed".to_string(), |e| e.to_string())
}

fn rows_text(rows: &[ConvergenceRow]) -> String {
    rows.iter()
        .map(|r| {
            format!(
                "N={} L1={:.3e} rate={} u_min={:.2e} u_max={:.17}",
                r.n,
                r.l1_error,
                r.rate.map_or("-".into(), |v| format!("{v:.2}")),
                r.u_min,
                r.u_max
            )
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let rows = convergence_table(&RunOptions::new(ProblemId::Burgers), &[40, 80, 160]).expect("table");
    let elapsed = start.elapsed();
    let reference = [6.85e-3, 1.63e-3, 3.60e-4];
    let within = rows
        .iter()
        .zip(reference)
        .all(|(r, e)| r.failure.is_none() && r.l1_error <= 2.0 * e && r.l1_error >= 0.5 * e);
    let rates = rows[1..].iter().all(|r| r.rate.is_some_and(|v| v >= 2.8));
    let lower = rows.iter().all(|r| r.u_min >= 0.0);
    let upper = rows.iter().all(|r| r.u_max <= 1.0 + 1e-14);
    Verdict::new(vec![
        (within, format!("errors within factor 2: {}", rows_text(&rows))),
        (rates, "rates >= 2.8".into()),
        (lower, "u_min >= 0".into()),
        (upper, "u_max <= 1 + 1e-14".into()),
        (elapsed < Duration::from_secs(60), format!("runtime {elapsed:.2?}")),
    ])
}

fn criterion_2() -> Verdict {
    let base = RunOptions {
        limiter: false,
        ..RunOptions::new(ProblemId::Burgers)
    };
    let rows = convergence_table(&base, &[40, 80, 160]).expect("table");
    let completed = rows.iter().all(|r| r.failure.is_none());
    let violation = rows[0].u_min < 0.0;
    let rates = rows[1..].iter().all(|r| r.rate.is_some_and(|v| v >= 2.8));
    Verdict::new(vec![
        (completed, format!("runs complete: {}", rows_text(&rows))),
        (violation, format!("u_min(N=40) = {:.3e} < 0", rows[0].u_min)),
        (rates, "rates >= 2.8".into()),
    ])
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for a in [-2.0, 5.0] {
        for n in [40, 80, 160] {
            let out = run(&RunOptions {
                n,
                advection_speed: a,
                record_mesh: false,
                ..RunOptions::new(ProblemId::Advection)
            });
            if !out.completed() {
                failures.push(format!("a={a} N={n}: {}", failure_text(&out)));
                continue;
            }
            let moved = out.mesh.nodes.iter().zip(MeshState::uniform(0.0, TAU, n).unwrap().nodes).any(|(x, y)| *x != y);
            if !moved {
                failures.push(format!("a={a} N={n}: mesh never moved"));
            }
            worst = out.values.iter().map(|v| (v[0] - 1.0).abs()).fold(worst, f64::max);
        }
    }
    let elapsed = start.elapsed();
    Verdict::new(vec![
        (failures.is_empty(), format!("all runs complete on moving meshes {failures:?}")),
        (worst <= 1e-12, format!("max|u - 1| = {worst:.2e}")),
        (elapsed < Duration::from_secs(10), format!("runtime {elapsed:.2?}")),
    ])
}

/// Rightmost position where the density drops through the midpoint between
/// its peak and the undisturbed right state.
fn shock_front(out: &RunOutcome) -> f64 {
    let rho = out.component(0);
    let x = out.mesh.centers();
    let right = *rho.last().unwrap();
    let level = 0.5 * (rho.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + right);
    let j = (0..rho.len() - 1).rev().find(|&j| rho[j] >= level).expect("front");
    let s = (rho[j] - level) / (rho[j] - rho[j + 1]);
    x[j] + s * (x[j + 1] - x[j])
}

fn is_admissibility_stop(out: &RunOutcome) -> bool {
    matches!(
        out.failure,
        Some(SolverError::BoundPreservation { .. } | SolverError::Inadmissible { .. } | SolverError::Model { .. })
    )
}

fn criterion_4() -> Verdict {
    let bp = run(&RunOptions::new(ProblemId::EulerStrongShock));
    let nbp = run(&RunOptions {
        limiter: false,
        ..RunOptions::new(ProblemId::EulerStrongShock)
    });
    let reference = run(&RunOptions {
        n: 2000,
        moving: false,
        record_mesh: false,
        ..RunOptions::new(ProblemId::EulerStrongShock)
    });
    let rho = bp.constraint_min("rho").unwrap_or(f64::NAN);
    let p = bp.constraint_min("p").unwrap_or(f64::NAN);
    let mut checks = vec![
        (bp.completed(), format!("BP+MM: {} after {} steps", failure_text(&bp), bp.steps)),
        (rho > 0.0 && p > 0.0, format!("min rho = {rho:.3e}, min p = {p:.3e}")),
        (is_admissibility_stop(&nbp), format!("NBP+MM: {}", failure_text(&nbp))),
        (reference.completed(), format!("reference: {}", failure_text(&reference))),
    ];
    if bp.completed() && reference.completed() {
        let (x, x_ref) = (shock_front(&bp), shock_front(&reference));
        let rel = (x - x_ref).abs() / x_ref.abs();
        checks.push((rel <= 0.05, format!("front {x:.4} vs reference {x_ref:.4} ({:.2}%)", 100.0 * rel)));
    }
    Verdict::new(checks)
}

fn five_eq_checks(label: &str, out: &RunOutcome) -> Vec<(bool, String)> {
    let min = |name: &str| out.constraint_min(name).unwrap_or(f64::NAN);
    vec![
        (out.completed(), format!("{label}: {} after {} steps", failure_text(out), out.steps)),
        (
            min("z1") >= 0.0 && min("one_minus_z1") >= 0.0,
            format!("z1 in [{:.2e}, 1 - {:.2e}]", min("z1"), min("one_minus_z1")),
        ),
        (
            min("z1rho1") > 0.0 && min("z2rho2") > 0.0,
            format!("partial densities >= ({:.2e}, {:.2e})", min("z1rho1"), min("z2rho2")),
        ),
        (min("rhoe_minus_pinf") > 0.0, format!("rho e - pinf >= {:.3e}", min("rhoe_minus_pinf"))),
    ]
}

fn criterion_5() -> Verdict {
    let v1 = run(&RunOptions {
        beta: Some(0.3),
        monitor: Some(MonitorId::FiveqV1),
        ..RunOptions::new(ProblemId::FiveqShockTube)
    });
    let v2 = run(&RunOptions {
        beta: Some(0.3),
        monitor: Some(MonitorId::FiveqV2),
        ..RunOptions::new(ProblemId::FiveqShockTube)
    });
    let mut checks = five_eq_checks("v1", &v1);
    checks.push((v2.completed(), format!("v2: {} after {} steps", failure_text(&v2), v2.steps)));
    Verdict::new(checks)
}

fn criterion_6() -> Verdict {
    let bp = run(&RunOptions {
        beta: Some(0.4),
        ..RunOptions::new(ProblemId::FiveqGasWater)
    });
    let nbp = run(&RunOptions {
        beta: Some(0.4),
        limiter: false,
        ..RunOptions::new(ProblemId::FiveqGasWater)
    });
    let mut checks = five_eq_checks("BP+MM", &bp);
    checks.push((is_admissibility_stop(&nbp), format!("NBP+MM: {}", failure_text(&nbp))));
    Verdict::new(checks)
}

fn random_stencil(rng: &mut ChaCha8Rng) -> Stencil {
    let base = rng.gen_range(0.1..2.0);
    Stencil {
        averages: std::array::from_fn(|_| rng.gen_range(-1.0..1.0) * rng.gen_range(0.0..10f64).exp2()),
        sizes: std::array::from_fn(|_| base * rng.gen_range(0.2..5.0)),
    }
}

fn weno_affine(rng: &mut ChaCha8Rng) -> (bool, String) {
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let s = random_stencil(rng);
        let a = rng.gen_range(0.1..100.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let b = rng.gen_range(-100.0..100.0);
        let t = Stencil {
            averages: s.averages.map(|u| a * u + b),
            sizes: s.sizes,
        };
        let (r, q) = (reconstruct(&s).unwrap(), reconstruct(&t).unwrap());
        let scale = a.abs() * s.averages.iter().fold(0.0f64, |m, v| m.max(v.abs())) + b.abs();
        for (x, y) in [(r.left, q.left), (r.mid, q.mid), (r.right, q.right)] {
            worst = worst.max((a * x + b - y).abs() / scale);
        }
    }
    (worst <= 1e-12, format!("WENO affine invariance {worst:.1e}"))
}

fn weno_weights(rng: &mut ChaCha8Rng) -> (bool, String) {
    let mut worst = 0.0f64;
    let mut negative = 0;
    for _ in 0..1000 {
        let (_, w) = blended_polynomial(&random_stencil(rng)).unwrap();
        negative += w.iter().filter(|&&v| v < 0.0).count();
        worst = worst.max((w.iter().sum::<f64>() - 1.0).abs());
    }
    (worst <= 1e-14 && negative == 0, format!("weights sum to 1 ({worst:.1e}), {negative} negative"))
}

fn weno_quadratic(rng: &mut ChaCha8Rng) -> (bool, String) {
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let c: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-5.0..5.0));
        let q = |x: f64| c[0] + c[1] * x + c[2] * x * x;
        let prim = |x: f64| c[0] * x + c[1] * x * x / 2.0 + c[2] * x * x * x / 3.0;
        let sizes: [f64; 5] = std::array::from_fn(|_| rng.gen_range(0.05..0.5));
        let mut nodes = [0.0; 6];
        nodes[0] = rng.gen_range(-1.0..1.0);
        for k in 0..5 {
            nodes[k + 1] = nodes[k] + sizes[k];
        }
        let averages = std::array::from_fn(|k| (prim(nodes[k + 1]) - prim(nodes[k])) / sizes[k]);
        let r = reconstruct(&Stencil { averages, sizes }).unwrap();
        let scale = 1.0 + c.iter().map(|v| v.abs()).sum::<f64>();
        let centre = 0.5 * (nodes[2] + nodes[3]);
        for (got, x) in [(r.left, nodes[2]), (r.mid, centre), (r.right, nodes[3])] {
            worst = worst.max((got - q(x)).abs() / scale);
        }
    }
    (worst <= 1e-12, format!("quadratic reproduction {worst:.1e}"))
}

fn theta_scan(rng: &mut ChaCha8Rng) -> (bool, String) {
    const GRID: usize = 10_000;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let eps = if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..1e-3) };
        let phi_l = eps + rng.gen_range(0.0..2.0);
        let phi_h = rng.gen_range(-2.0..2.0);
        let theta = theta_ratio(phi_h, phi_l, eps);
        let scanned = (0..=GRID)
            .map(|k| k as f64 / GRID as f64)
            .filter(|t| t * phi_h + (1.0 - t) * phi_l >= eps)
            .fold(0.0f64, f64::max);
        let holds = theta * phi_h + (1.0 - theta) * phi_l >= eps - 1e-15;
        let gap = if holds { theta - scanned } else { f64::INFINITY };
        worst = worst.max(if (0.0..=1.0 / GRID as f64).contains(&gap) { 0.0 } else { gap.abs() });
    }
    (worst == 0.0, format!("theta vs {GRID}-point scan (worst gap {worst:.1e})"))
}

fn random_euler(rng: &mut ChaCha8Rng, model: &EulerModel) -> State<3> {
    let rho = rng.gen_range(-6.0..2.0f64).exp();
    let p = rng.gen_range(-12.0..12.0f64).exp();
    model.conserved(rho, rng.gen_range(-50.0..50.0), p)
}

/// The limited blend must be admissible and no larger than the largest
/// admissible blend found on a grid.
fn system_theta_scan(rng: &mut ChaCha8Rng) -> (bool, String) {
    const GRID: usize = 10_000;
    let model = EulerModel::default();
    let mut bad = 0;
    for _ in 0..200 {
        let low = random_euler(rng, &model);
        let high = State(std::array::from_fn(|k| low[k] * rng.gen_range(-1.5..2.5)));
        let theta = limit_interface(&model, &[SubCellPair { high, low }]).unwrap();
        let blend = |t: f64| high * t + low * (1.0 - t);
        let largest = (0..=GRID)
            .map(|k| k as f64 / GRID as f64)
            .take_while(|&t| model.is_admissible(&blend(t)))
            .last()
            .unwrap_or(0.0);
        if !model.is_admissible(&blend(theta)) || theta > largest + 1.0 / GRID as f64 {
            bad += 1;
        }
    }
    (bad == 0, format!("Euler limiter blends admissible and within scan bound ({bad} failures)"))
}

fn splitting_states_euler(rng: &mut ChaCha8Rng) -> (bool, String) {
    let model = EulerModel::default();
    let mut bad = 0;
    for _ in 0..10_000 {
        let u = random_euler(rng, &model);
        let omega = rng.gen_range(-50.0..50.0);
        let alpha = model.wavespeed(&[u], &[omega, omega]).unwrap() * (1.0 + rng.gen_range(0.0..1.0f64).powi(3));
        for sign in [-1.0, 1.0] {
            if !model.is_admissible(&model.psi(omega, &u, alpha, sign)) {
                bad += 1;
            }
        }
    }
    (bad == 0, format!("moving-flux splitting states admissible ({bad} failures in 10^4)"))
}

fn random_five_eq(rng: &mut ChaCha8Rng, model: &FiveEqModel, scale: (f64, f64, f64)) -> State<5> {
    let (rho, speed, p) = scale;
    loop {
        let z = match rng.gen_range(0..10) {
            0 => 0.0,
            1 => 1.0,
            2 => 1e-13,
            3 => 1.0 - 1e-13,
            _ => rng.gen::<f64>(),
        };
        let u = model.conserved(
            rho * rng.gen_range(-3.0..3.0f64).exp(),
            rho * rng.gen_range(-3.0..3.0f64).exp(),
            speed * rng.gen_range(-1.0..1.0),
            p * rng.gen_range(-4.0..4.0f64).exp(),
            z,
        );
        if model.is_admissible(&u) {
            return u;
        }
    }
}

fn star_states_five_eq(rng: &mut ChaCha8Rng) -> (bool, String) {
    let cases = [
        (shock_tube_model(), (1.0, 3.0, 1.0)),
        (gas_water_model(), (50.0, 1e3, 1e8)),
    ];
    let mut bad = 0;
    for k in 0..10_000 {
        let (model, scale) = &cases[k % 2];
        let um = random_five_eq(rng, model, *scale);
        let up = random_five_eq(rng, model, *scale);
        let alpha = model.alpha(&[um, up]).unwrap() * (1.0 + rng.gen_range(0.0..1.0f64).powi(3));
        let ok = model
            .path_jump(&um, &up, alpha, true)
            .map(|(jump, _)| model.is_admissible(&model.star_state(&um, &up, alpha, Some(jump))))
            .unwrap_or(false);
        if !ok {
            bad += 1;
        }
    }
    (bad == 0, format!("five-equation intermediate states admissible ({bad} failures in 10^4)"))
}

fn random_state3(rng: &mut ChaCha8Rng) -> State<3> {
    State(std::array::from_fn(|_| rng.gen_range(-10.0..10.0)))
}

fn convex_decomposition(rng: &mut ChaCha8Rng) -> (bool, String) {
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(3..12);
        let averages: Vec<State<3>> = (0..n).map(|_| random_state3(rng)).collect();
        let faces: Vec<FacePair<3>> = (0..=n)
            .map(|_| FacePair {
                from_left: random_state3(rng),
                from_right: random_state3(rng),
            })
            .collect();
        let reference: Vec<State<3>> = (0..n).map(|_| random_state3(rng)).collect();
        let omega: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let dx: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
        let dt = rng.gen_range(0.01..0.1);
        let dx_new = amm_core::mesh::advance_cell_sizes(&dx, &dx, &MeshMotion { velocities: omega.clone(), dt }, 0.0).unwrap();
        let lambda: Vec<f64> = (0..n).map(|j| dt / (dx[j] + dt * (omega[j + 1] - omega[j]))).collect();
        let (minus, plus) = sub_cell_states(&averages, &faces, &reference, &omega, &lambda);
        let flux_form = stage_update(&averages, &dx, &averages, &dx, &faces, dt, 0.0, &dx_new);
        for j in 0..n {
            let mean = (minus[j] + plus[j]) * 0.5;
            let scale = 1.0 + averages[j].max_abs() + faces[j].from_right.max_abs() + faces[j + 1].from_left.max_abs();
            worst = worst.max((mean - flux_form[j]).max_abs() / scale);
        }
    }
    (worst <= 1e-13, format!("sub-cell mean vs flux form {worst:.1e}"))
}

fn initial_mass(n: usize) -> f64 {
    let mesh = MeshState::uniform(0.0, TAU, n).unwrap();
    mesh.nodes
        .windows(2)
        .map(|w| gauss_legendre_mean(burgers_initial, w[0], w[1], 1)[0] * (w[1] - w[0]))
        .sum()
}

fn mass(out: &RunOutcome) -> f64 {
    out.values.iter().zip(&out.mesh.cell_sizes).map(|(v, h)| v[0] * h).sum()
}

fn mesh_history_valid(out: &RunOutcome) -> bool {
    let (a, b) = (out.mesh.nodes[0], *out.mesh.nodes.last().unwrap());
    !out.mesh_history.is_empty()
        && out.mesh_history.iter().all(|(_, x)| {
            x[0] == a && x[x.len() - 1] == b && x.windows(2).all(|w| w[1] > w[0])
        })
}

fn conservation_and_histories() -> Vec<(bool, String)> {
    let mut checks = Vec::new();
    let mut drift = 0.0f64;
    let mut valid = true;
    for (limiter, n) in [(true, 40), (true, 160), (false, 80)] {
        let out = run(&RunOptions {
            n,
            limiter,
            ..RunOptions::new(ProblemId::Burgers)
        });
        assert!(out.completed(), "{}", failure_text(&out));
        let m0 = initial_mass(n);
        drift = drift.max((mass(&out) - m0).abs() / m0.abs());
        valid &= mesh_history_valid(&out);
    }
    let adv = run(&RunOptions {
        n: 80,
        advection_speed: -2.0,
        ..RunOptions::new(ProblemId::Advection)
    });
    drift = drift.max((mass(&adv) - TAU).abs() / TAU);
    valid &= mesh_history_valid(&adv);
    let shock = run(&RunOptions {
        n: 60,
        t_final: Some(2e-4),
        ..RunOptions::new(ProblemId::EulerStrongShock)
    });
    valid &= shock.completed() && mesh_history_valid(&shock);
    checks.push((drift <= 1e-11, format!("periodic mass drift {drift:.1e}")));
    checks.push((valid, "mesh histories strictly increasing with fixed ends".into()));
    checks
}

fn mesh_limiter(rng: &mut ChaCha8Rng) -> (bool, String) {
    let mut bad = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(4..80);
        let mut nodes = vec![0.0];
        for _ in 0..n {
            let last = *nodes.last().unwrap();
            nodes.push(last + rng.gen_range(0.1..1.0));
        }
        let mesh = MeshState::from_nodes(nodes).unwrap();
        let settings = MonitorSettings::new(rng.gen_range(0.05..0.95)).unwrap();
        let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>().powi(8) * 1e3).collect();
        let sigma = monitor_function(&smooth_monitor(&raw, rng.gen_range(0..10)), &mesh, settings.beta).unwrap();
        let candidate = equidistribute(&mesh, &sigma, rng.gen_range(1..20));
        let (x, _) = limit_mesh(&candidate, &mesh, settings.dx_min(&mesh)).unwrap();
        let centers = mesh.centers();
        let ok = x[0] == mesh.nodes[0]
            && x[n] == mesh.nodes[n]
            && x.windows(2).all(|w| w[1] > w[0])
            && (1..n).all(|i| x[i] >= centers[i - 1] && x[i] <= centers[i]);
        if !ok {
            bad += 1;
        }
    }
    (bad == 0, format!("limited redistributions valid ({bad} failures in 10^3)"))
}

fn criterion_7() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checks = vec![
        weno_affine(&mut rng),
        weno_weights(&mut rng),
        weno_quadratic(&mut rng),
        theta_scan(&mut rng),
        system_theta_scan(&mut rng),
        splitting_states_euler(&mut rng),
        star_states_five_eq(&mut rng),
        convex_decomposition(&mut rng),
        mesh_limiter(&mut rng),
    ];
    checks.extend(conservation_and_histories());
    let elapsed = start.elapsed();
    checks.push((elapsed < Duration::from_secs(120), format!("runtime {elapsed:.2?}")));
    Verdict::new(checks)
}

/// Plain fixed-mesh WENO3 / Lax-Friedrichs / SSP-RK3 for periodic Burgers,
/// written directly in terms of uniform-grid formulas.
fn fixed_mesh_burgers(n: usize, t_final: f64, cfl: f64) -> Vec<f64> {
    let nodes: Vec<f64> = (0..=n).map(|i| TAU * i as f64 / n as f64).collect();
    let h: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
    let hmin = h.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut u: Vec<f64> = nodes.windows(2).map(|w| gauss_legendre_mean(sin4, w[0], w[1], 1)).collect();
    let max_speed = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-12);
    let at = |v: &[f64], j: isize| v[j.rem_euclid(n as isize) as usize];

    // Value of the blended quadratic of cell j at offset s in [-1/2, 1/2].
    let edge = |v: &[f64], j: isize, s: f64| {
        let w5: [f64; 5] = std::array::from_fn(|k| at(v, j + k as isize - 2));
        let mean = w5.iter().sum::<f64>() / 5.0;
        let mu = 1e-40 + w5.iter().map(|x| (x - mean).abs()).sum::<f64>() / 5.0;
        let mut num = 0.0;
        let mut den = 0.0;
        for (k, d) in [0.25, 0.5, 0.25].into_iter().enumerate() {
            // Quadratic through three unit cells centred at `shift`.
            let shift = 1.0 - k as f64;
            let (a, b, c) = (w5[2 - k], w5[3 - k], w5[4 - k]);
            let c2 = 0.5 * (a - 2.0 * b + c);
            let c1 = 0.5 * (c - a);
            let c0 = b - c2 / 12.0;
            // Coefficients about the target cell centre.
            let (d0, d1, d2) = (c0 - c1 * shift + c2 * shift * shift, c1 - 2.0 * c2 * shift, c2);
            let beta = d1 * d1 + d2 * d2 / 3.0 + 4.0 * d2 * d2;
            let wt = d / (beta + 1e-12 * mu * mu).powi(2);
            num += wt * (d0 + d1 * s + d2 * s * s);
            den += wt;
        }
        num / den
    };
    let residual = |v: &[f64], alpha: f64| -> Vec<f64> {
        let f = |x: f64| 0.5 * x * x;
        (0..=n)
            .map(|i| {
                let (um, up) = (edge(v, i as isize - 1, 0.5), edge(v, i as isize, -0.5));
                0.5 * (f(um) + f(up)) - 0.5 * alpha * (up - um)
            })
            .collect()
    };

    let mut t = 0.0;
    while t < t_final {
        let nominal = cfl * hmin / max_speed(&u);
        let clipped = nominal >= t_final - t;
        let mut dt = if clipped { t_final - t } else { nominal };
        let mut halvings = 0;
        let next = loop {
            let mut stage = u.clone();
            let mut rejected = false;
            for xi in [0.0, 0.75, 1.0 / 3.0] {
                let alpha = max_speed(&stage);
                if h.iter().any(|hj| dt / hj * alpha > 1.0 / 6.0) {
                    rejected = true;
                    break;
                }
                let flux = residual(&stage, alpha);
                stage = (0..n)
                    .map(|j| {
                        let step = (stage[j] * h[j] - dt * (flux[j + 1] - flux[j])) * (1.0 - xi);
                        let total = if xi == 0.0 { step } else { u[j] * (xi * h[j]) + step };
                        total / h[j]
                    })
                    .collect();
            }
            if !rejected {
                break stage;
            }
            dt *= 0.5;
            halvings += 1;
        };
        u = next;
        t = if clipped && halvings == 0 { t_final } else { t + dt };
    }
    u
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/burgers_n40_fixed_mesh.hex")
}

fn criterion_8() -> Verdict {
    let opts = RunOptions {
        n: 40,
        limiter: false,
        moving: false,
        ..RunOptions::new(ProblemId::Burgers)
    };
    let out = run(&opts);
    let uniform = MeshState::uniform(0.0, TAU, 40).unwrap();
    let still = out.mesh_history.iter().all(|(_, x)| *x == uniform.nodes);
    let values = out.component(0);
    let hex: String = values.iter().map(|v| format!("{:016x}\n", v.to_bits())).collect();
    let path = golden_path();
    if std::env::var("AMM_BLESS").as_deref() == Ok("1") {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &hex).unwrap();
    }
    let golden = std::fs::read_to_string(&path).unwrap_or_default();
    let oracle = fixed_mesh_burgers(40, opts.t_final(), opts.cfl);
    let diff = values.iter().zip(&oracle).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Verdict::new(vec![
        (out.completed() && still, format!("omega = 0 path keeps the uniform mesh ({})", failure_text(&out))),
        (golden == hex, format!("bit-for-bit match with {}", path.display())),
        (diff <= 1e-12, format!("independent fixed-mesh solver max diff {diff:.1e}")),
    ])
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("Burgers convergence, bound-preserving", criterion_1),
        ("Burgers bound violation without limiter", criterion_2),
        ("free-stream preservation on random meshes", criterion_3),
        ("Euler strong shock", criterion_4),
        ("five-equation shock tube", criterion_5),
        ("gas-water Riemann problem", criterion_6),
        ("property suites", criterion_7),
        ("fixed-mesh reduction", criterion_8),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        if !selected.is_empty() && !selected.contains(&(k + 1)) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {} {} ({name}, {:.1?}): {}",
            k + 1,
            if v.pass { "PASS" } else { "FAIL" },
            start.elapsed(),
            v.detail
        );
    }
    println!("{} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
