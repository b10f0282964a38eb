//! CSV and markdown renderers. Floats use the shortest representation that
//! round-trips.

use std::fmt::Write;

use super::problems::{ConvergenceRow, RunOutcome};

fn push_row(out: &mut String, fields: impl IntoIterator<Item = String>) {
    let row: Vec<String> = fields.into_iter().collect();
    out.push_str(&row.join(","));
    out.push('\n');
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

/// `x_center,dx,<components...>`.
pub fn solution_csv(outcome: &RunOutcome) -> String {
    let mut out = String::new();
    push_row(
        &mut out,
        ["x_center".to_string(), "dx".to_string()]
            .into_iter()
            .chain(outcome.component_names.iter().map(|s| s.to_string())),
    );
    for ((x, h), v) in outcome.mesh.centers().iter().zip(&outcome.mesh.cell_sizes).zip(&outcome.values) {
        push_row(&mut out, [num(*x), num(*h)].into_iter().chain(v.iter().map(|c| num(*c))));
    }
    out
}

/// `t,x_0,...,x_N`, one row per recorded step.
pub fn mesh_csv(outcome: &RunOutcome) -> String {
    let mut out = String::new();
    let n = outcome.mesh.n_cells();
    push_row(&mut out, std::iter::once("t".to_string()).chain((0..=n).map(|i| format!("x_{i}"))));
    for (t, nodes) in &outcome.mesh_history {
        push_row(&mut out, std::iter::once(num(*t)).chain(nodes.iter().map(|x| num(*x))));
    }
    out
}

/// `step,t,theta_min,active_interfaces,min_<constraint>...`.
pub fn bounds_csv(outcome: &RunOutcome) -> String {
    let mut out = String::new();
    push_row(
        &mut out,
        ["step", "t", "theta_min", "active_interfaces"]
            .into_iter()
            .map(String::from)
            .chain(outcome.constraint_names.iter().map(|c| format!("min_{c}"))),
    );
    for d in &outcome.diagnostics {
        push_row(
            &mut out,
            [d.step.to_string(), num(d.t), num(d.theta_min), d.active_interfaces.to_string()]
                .into_iter()
                .chain(d.constraint_mins.iter().map(|v| num(*v))),
        );
    }
    out
}

/// `step,t,dt,halvings,theta_min,<reports>`.
pub fn diagnostics_csv(outcome: &RunOutcome) -> String {
    let mut out = String::new();
    push_row(
        &mut out,
        ["step", "t", "dt", "halvings", "theta_min"]
            .into_iter()
            .map(String::from)
            .chain(outcome.report_names.iter().map(|(n, _)| n.to_string())),
    );
    for d in &outcome.diagnostics {
        push_row(
            &mut out,
            [d.step.to_string(), num(d.t), num(d.dt), d.halvings.to_string(), num(d.theta_min)]
                .into_iter()
                .chain(d.reports.iter().map(|v| num(*v))),
        );
    }
    out
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// `N,l1_error,dx_max,rate,u_min,u_max,steps,halvings,failure`.
pub fn table_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("N,l1_error,dx_max,rate,u_min,u_max,steps,halvings,failure\n");
    for r in rows {
        push_row(
            &mut out,
            [
                r.n.to_string(),
                num(r.l1_error),
                num(r.dx_max),
                opt(r.rate),
                num(r.u_min),
                num(r.u_max),
                r.steps.to_string(),
                r.halvings.to_string(),
                r.failure.clone().unwrap_or_default().replace(',', ";"),
            ],
        );
    }
    out
}

/// Aligned markdown table.
pub fn table_md(rows: &[ConvergenceRow]) -> String {
    let header = ["N", "L1 error", "dx_max", "rate", "u_min", "u_max"];
    let body: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            [
                r.n.to_string(),
                format!("{:.2e}", r.l1_error),
                format!("{:.2e}", r.dx_max),
                r.rate.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into()),
                format!("{:.2e}", r.u_min),
                format!("{:.2e}", r.u_max),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..6)
        .map(|c| body.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        format!("| {} |\n", padded.join(" | "))
    };
    out.push_str(&line(&header.map(String::from)));
    let rule: Vec<String> = widths.iter().map(|w| format!("{}:", "-".repeat(w.saturating_sub(1)))).collect();
    let _ = writeln!(out, "| {} |", rule.join(" | "));
    for r in &body {
        out.push_str(&line(r));
    }
    out
}
