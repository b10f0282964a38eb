//! Moving-grid geometry: monitor-driven redistribution, mesh-quality
//! limiting, grid velocities and stage-wise cell-size updates.

use crate::error::MeshError;

/// Node positions and cell sizes of a 1D grid on `[a, b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshState {
    pub nodes: Vec<f64>,
    pub cell_sizes: Vec<f64>,
    pub domain: (f64, f64),
}

impl MeshState {
    /// Uniform grid of `n` cells.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self, MeshError> {
        if n < 3 {
            return Err(MeshError::TooFewCells { min: 3, got: n });
        }
        let h = (b - a) / n as f64;
        let mut nodes: Vec<f64> = (0..=n).map(|i| a + i as f64 * h).collect();
        nodes[n] = b;
        Self::from_nodes(nodes)
    }

    /// Build from node positions; sizes are the exact node differences.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self, MeshError> {
        if nodes.len() < 4 {
            return Err(MeshError::TooFewCells {
                min: 3,
                got: nodes.len().saturating_sub(1),
            });
        }
        check_monotone(&nodes)?;
        let cell_sizes = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        let domain = (nodes[0], nodes[nodes.len() - 1]);
        Ok(Self {
            nodes,
            cell_sizes,
            domain,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.cell_sizes.len()
    }

    pub fn length(&self) -> f64 {
        self.domain.1 - self.domain.0
    }

    pub fn centers(&self) -> Vec<f64> {
        self.nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn min_size(&self) -> f64 {
        self.cell_sizes.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_size(&self) -> f64 {
        self.cell_sizes.iter().copied().fold(0.0, f64::max)
    }
}

fn check_monotone(nodes: &[f64]) -> Result<(), MeshError> {
    for (i, w) in nodes.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(MeshError::NotMonotone { index: i + 1 });
        }
    }
    Ok(())
}

/// Node velocities over one time step.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshMotion {
    pub velocities: Vec<f64>,
    pub dt: f64,
}

impl MeshMotion {
    pub fn at_rest(n_cells: usize, dt: f64) -> Self {
        Self {
            velocities: vec![0.0; n_cells + 1],
            dt,
        }
    }
}

/// Parameters of the monitor-based redistribution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonitorSettings {
    pub beta: f64,
    pub smoothing_steps: usize,
    pub jacobi_steps: usize,
    /// `dx_min = dx_uniform / min_cell_factor`.
    pub min_cell_factor: f64,
}

impl MonitorSettings {
    pub fn new(beta: f64) -> Result<Self, MeshError> {
        let s = Self {
            beta,
            smoothing_steps: 8,
            jacobi_steps: 8,
            min_cell_factor: 20.0,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(MeshError::InvalidBeta(self.beta));
        }
        if !(self.min_cell_factor > 0.0) {
            return Err(MeshError::InvalidSettings(format!(
                "min_cell_factor must be positive, got {}",
                self.min_cell_factor
            )));
        }
        Ok(())
    }

    pub fn dx_min(&self, mesh: &MeshState) -> f64 {
        mesh.length() / mesh.n_cells() as f64 / self.min_cell_factor
    }
}

/// Apply the `(1, 2, 1)/4` smoothing kernel `m` times, replicating the end
/// values as ghosts.
pub fn smooth_monitor(raw: &[f64], m: usize) -> Vec<f64> {
    let n = raw.len();
    let mut phi = raw.to_vec();
    if n == 0 {
        return phi;
    }
    let mut next = vec![0.0; n];
    for _ in 0..m {
        for j in 0..n {
            let l = phi[j.saturating_sub(1)];
            let r = phi[(j + 1).min(n - 1)];
            next[j] = (l + 2.0 * phi[j] + r) / 4.0;
        }
        std::mem::swap(&mut phi, &mut next);
    }
    phi
}

/// `sigma_j = 1 + alpha * phi_j`, with `alpha` chosen so that a fraction
/// `beta` of the total monitor mass sits in the solution-dependent part.
pub fn monitor_function(phi: &[f64], mesh: &MeshState, beta: f64) -> Result<Vec<f64>, MeshError> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(MeshError::InvalidBeta(beta));
    }
    for (cell, &value) in phi.iter().enumerate() {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(MeshError::InvalidMonitor { cell, value });
        }
    }
    let integral: f64 = phi.iter().zip(&mesh.cell_sizes).map(|(p, h)| p * h).sum();
    if integral == 0.0 {
        return Ok(vec![1.0; phi.len()]);
    }
    let alpha = beta * mesh.length() / ((1.0 - beta) * integral);
    Ok(phi.iter().map(|p| 1.0 + alpha * p).collect())
}

/// `s` Jacobi sweeps of the discrete equidistribution equation
/// `sigma_{j+1} (x_{j+3/2} - x_{j+1/2}) = sigma_j (x_{j+1/2} - x_{j-1/2})`.
pub fn equidistribute(mesh: &MeshState, sigma: &[f64], s: usize) -> Vec<f64> {
    let mut x = mesh.nodes.clone();
    let mut next = x.clone();
    let n = mesh.n_cells();
    for _ in 0..s {
        for i in 1..n {
            let (sl, sr) = (sigma[i - 1], sigma[i]);
            next[i] = (sl * x[i - 1] + sr * x[i + 1]) / (sl + sr);
        }
        std::mem::swap(&mut x, &mut next);
    }
    x
}

/// Largest residual of the discrete equidistribution equation.
pub fn equidistribution_residual(nodes: &[f64], sigma: &[f64]) -> f64 {
    (1..nodes.len() - 1)
        .map(|i| (sigma[i] * (nodes[i + 1] - nodes[i]) - sigma[i - 1] * (nodes[i] - nodes[i - 1])).abs())
        .fold(0.0, f64::max)
}

/// Keep candidate nodes inside the previous cell-center brackets, then undo
/// the motion of any cell that would become smaller than `dx_min`.
///
/// Returns the limited nodes and per-cell flags marking cells whose monitor
/// should be zeroed at the next redistribution.
pub fn limit_mesh(
    candidate: &[f64],
    previous: &MeshState,
    dx_min: f64,
) -> Result<(Vec<f64>, Vec<bool>), MeshError> {
    let n = previous.n_cells();
    let old = &previous.nodes;
    let centers = previous.centers();
    let mut x = candidate.to_vec();
    x[0] = old[0];
    x[n] = old[n];
    for i in 1..n {
        x[i] = x[i].clamp(centers[i - 1], centers[i]);
    }

    let mut flags = vec![false; n];
    loop {
        let mut changed = false;
        for j in 0..n {
            if x[j + 1] - x[j] < dx_min && (x[j] != old[j] || x[j + 1] != old[j + 1]) {
                x[j] = old[j];
                x[j + 1] = old[j + 1];
                for k in j.saturating_sub(1)..=(j + 1).min(n - 1) {
                    flags[k] = true;
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    check_monotone(&x)?;
    Ok((x, flags))
}

/// `omega = (new - old) / dt` with both domain endpoints held fixed.
pub fn grid_velocities(old_nodes: &[f64], new_nodes: &[f64], dt: f64) -> Result<MeshMotion, MeshError> {
    if !(dt > 0.0) {
        return Err(MeshError::NonPositiveDt(dt));
    }
    let n = old_nodes.len();
    let mut velocities: Vec<f64> = old_nodes.iter().zip(new_nodes).map(|(o, x)| (x - o) / dt).collect();
    velocities[0] = 0.0;
    velocities[n - 1] = 0.0;
    Ok(MeshMotion { velocities, dt })
}

/// Stage cell sizes consistent with the discrete geometric conservation law:
/// `dx^(l) = xi dx^n + (1 - xi) (dx^(l-1) + dt (omega_R - omega_L))`.
pub fn advance_cell_sizes(
    dx_n: &[f64],
    dx_prev_stage: &[f64],
    motion: &MeshMotion,
    xi: f64,
) -> Result<Vec<f64>, MeshError> {
    let w = &motion.velocities;
    dx_n.iter()
        .zip(dx_prev_stage)
        .enumerate()
        .map(|(j, (&h0, &h))| {
            let size = xi * h0 + (1.0 - xi) * (h + motion.dt * (w[j + 1] - w[j]));
            if size > 0.0 {
                Ok(size)
            } else {
                Err(MeshError::NonPositiveSize { cell: j, size })
            }
        })
        .collect()
}

/// Node positions at the end of RK stage `stage` (1, 2 or 3).
pub fn stage_node_positions(old_nodes: &[f64], motion: &MeshMotion, stage: usize) -> Vec<f64> {
    let tau = if stage == 2 { 0.5 * motion.dt } else { motion.dt };
    old_nodes.iter().zip(&motion.velocities).map(|(x, w)| x + tau * w).collect()
}

/// First and second derivatives of the quadratic interpolating
/// `(xs[k], us[k])`, evaluated at `x`.
pub fn quadratic_derivatives(xs: [f64; 3], us: [f64; 3], x: f64) -> (f64, f64) {
    let [x0, x1, x2] = xs;
    let d0 = (x0 - x1) * (x0 - x2);
    let d1 = (x1 - x0) * (x1 - x2);
    let d2 = (x2 - x0) * (x2 - x1);
    let first = us[0] * ((x - x1) + (x - x2)) / d0
        + us[1] * ((x - x0) + (x - x2)) / d1
        + us[2] * ((x - x0) + (x - x1)) / d2;
    let second = 2.0 * (us[0] / d0 + us[1] / d1 + us[2] / d2);
    (first, second)
}

/// Derivatives of cell-center data on a non-uniform grid: three-point
/// central differences in the interior, wrap-around for periodic grids and
/// one-sided three-point formulas at the ends otherwise.
pub fn center_derivatives(values: &[f64], mesh: &MeshState, periodic: bool) -> (Vec<f64>, Vec<f64>) {
    let n = values.len();
    let xc = mesh.centers();
    let len = mesh.length();
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for j in 0..n {
        let (xs, us) = if j > 0 && j + 1 < n {
            ([xc[j - 1], xc[j], xc[j + 1]], [values[j - 1], values[j], values[j + 1]])
        } else if periodic && j == 0 {
            ([xc[n - 1] - len, xc[0], xc[1]], [values[n - 1], values[0], values[1]])
        } else if periodic {
            ([xc[n - 2], xc[n - 1], xc[0] + len], [values[n - 2], values[n - 1], values[0]])
        } else if j == 0 {
            ([xc[0], xc[1], xc[2]], [values[0], values[1], values[2]])
        } else {
            ([xc[n - 3], xc[n - 2], xc[n - 1]], [values[n - 3], values[n - 2], values[n - 1]])
        };
        let (a, b) = quadratic_derivatives(xs, us, xc[j]);
        d1[j] = a;
        d2[j] = b;
    }
    (d1, d2)
}
