//! Compressible Euler equations for an ideal gas, `U = (rho, rho u, E)`.

use super::{MonitorQuantity, ReportKind, SystemModel};
use crate::error::ModelError;
use crate::limiter::{ConstraintSet, ConstraintSpec, Floor, RELATIVE_FLOOR};
use crate::state::{Matrix, State};
use crate::weno::CharacteristicBasis;

const CONSTRAINTS: [ConstraintSpec; 2] = [
    ConstraintSpec {
        name: "rho",
        stage: 0,
        floor: Floor::Relative(RELATIVE_FLOOR),
    },
    ConstraintSpec {
        name: "p",
        stage: 1,
        floor: Floor::Relative(RELATIVE_FLOOR),
    },
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerModel {
    pub gamma: f64,
}

impl Default for EulerModel {
    fn default() -> Self {
        Self { gamma: 1.4 }
    }
}

impl EulerModel {
    pub fn new(gamma: f64) -> Result<Self, ModelError> {
        if !(gamma > 1.0) {
            return Err(ModelError::InvalidParameters(format!("gamma must exceed 1, got {gamma}")));
        }
        Ok(Self { gamma })
    }

    /// Conserved state from density, velocity and pressure.
    pub fn conserved(&self, rho: f64, u: f64, p: f64) -> State<3> {
        State([rho, rho * u, p / (self.gamma - 1.0) + 0.5 * rho * u * u])
    }

    pub fn pressure(&self, u: &State<3>) -> f64 {
        (self.gamma - 1.0) * (u[2] - 0.5 * u[1] * u[1] / u[0])
    }

    pub fn velocity(&self, u: &State<3>) -> f64 {
        u[1] / u[0]
    }

    pub fn sound_speed(&self, u: &State<3>) -> f64 {
        (self.gamma * self.pressure(u) / u[0]).sqrt()
    }

    /// `max_j max(|u_j - omega_{j-1/2}|, |u_j - omega_{j+1/2}|) + c_j`.
    pub fn wavespeed(&self, field: &[State<3>], omega: &[f64]) -> Result<f64, ModelError> {
        let mut alpha = 0.0f64;
        for (j, u) in field.iter().enumerate() {
            if !self.is_admissible(u) {
                return Err(ModelError::Inadmissible(format!("cell {j}: {:?}", u.0)));
            }
            let v = self.velocity(u);
            let c = self.sound_speed(u);
            alpha = alpha.max((v - omega[j]).abs() + c).max((v - omega[j + 1]).abs() + c);
        }
        Ok(alpha)
    }

    /// `U -+ (F(U) - omega U) / alpha`; `sign < 0` gives the first state.
    pub fn psi(&self, omega: f64, u: &State<3>, alpha: f64, sign: f64) -> State<3> {
        let h = self.flux(u) - *u * omega;
        if sign < 0.0 {
            *u - h * (1.0 / alpha)
        } else {
            *u + h * (1.0 / alpha)
        }
    }
}

impl ConstraintSet<3> for EulerModel {
    fn specs(&self) -> &[ConstraintSpec] {
        &CONSTRAINTS
    }

    fn constraint_value(&self, k: usize, u: &State<3>) -> f64 {
        match k {
            0 => u[0],
            _ => self.pressure(u),
        }
    }
}

impl SystemModel<3> for EulerModel {
    fn name(&self) -> &'static str {
        "euler"
    }

    fn component_names(&self) -> [&'static str; 3] {
        ["rho", "rho_u", "E"]
    }

    fn flux(&self, u: &State<3>) -> State<3> {
        let v = u[1] / u[0];
        let p = self.pressure(u);
        State([u[1], u[1] * v + p, (u[2] + p) * v])
    }

    fn is_admissible(&self, u: &State<3>) -> bool {
        u.is_finite() && u[0] > 0.0 && self.pressure(u) > 0.0
    }

    fn local_speed(&self, u: &State<3>, omega: f64) -> Option<f64> {
        if !self.is_admissible(u) {
            return None;
        }
        Some((self.velocity(u) - omega).abs() + self.sound_speed(u))
    }

    fn characteristic_basis(&self, u: &State<3>) -> Result<Option<CharacteristicBasis<3>>, ModelError> {
        if !self.is_admissible(u) {
            return Err(ModelError::Inadmissible(format!("basis state {:?}", u.0)));
        }
        let g1 = self.gamma - 1.0;
        let rho = u[0];
        let v = self.velocity(u);
        let c = self.sound_speed(u);
        let rc2 = rho * c * c;
        // Primitive variables W = (rho, u, p).
        let du_dw = Matrix([[1.0, 0.0, 0.0], [v, rho, 0.0], [0.5 * v * v, rho * v, 1.0 / g1]]);
        let dw_du = Matrix([
            [1.0, 0.0, 0.0],
            [-v / rho, 1.0 / rho, 0.0],
            [0.5 * g1 * v * v, -g1 * v, g1],
        ]);
        let r_w = Matrix([[rho, 1.0, rho], [-c, 0.0, c], [rc2, 0.0, rc2]]);
        let l_w = Matrix([
            [0.0, -0.5 / c, 0.5 / rc2],
            [1.0, 0.0, -1.0 / (c * c)],
            [0.0, 0.5 / c, 0.5 / rc2],
        ]);
        Ok(Some(CharacteristicBasis {
            left: l_w.matmul(&dw_du),
            right: du_dw.matmul(&r_w),
        }))
    }

    fn monitor_quantity(&self, u: &State<3>, q: MonitorQuantity) -> Option<f64> {
        match q {
            MonitorQuantity::Primary | MonitorQuantity::Density => Some(u[0]),
            MonitorQuantity::Velocity => Some(self.velocity(u)),
            MonitorQuantity::VolumeFraction => None,
        }
    }

    fn report_names(&self) -> Vec<(&'static str, ReportKind)> {
        vec![("min_rho", ReportKind::Min), ("min_p", ReportKind::Min)]
    }

    fn report_value(&self, k: usize, u: &State<3>) -> f64 {
        self.constraint_value(k, u)
    }
}
