//! Scalar conservation laws `u_t + f(u)_x = 0`.

use super::{MonitorQuantity, ReportKind, SystemModel};
use crate::limiter::{Bounds, ConstraintSet, ConstraintSpec, ScalarBounds, EPS_BP, LOW_ORDER_SLACK};
use crate::state::State;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScalarFlux {
    /// `f(u) = a u`.
    Advection { speed: f64 },
    /// `f(u) = u^2 / 2`.
    Burgers,
}

impl ScalarFlux {
    pub fn f(&self, u: f64) -> f64 {
        match *self {
            ScalarFlux::Advection { speed } => speed * u,
            ScalarFlux::Burgers => 0.5 * u * u,
        }
    }

    pub fn df(&self, u: f64) -> f64 {
        match *self {
            ScalarFlux::Advection { speed } => speed,
            ScalarFlux::Burgers => u,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScalarModel {
    pub flux: ScalarFlux,
    bounds: ScalarBounds,
}

impl ScalarModel {
    pub fn new(flux: ScalarFlux, bounds: Bounds) -> Self {
        Self {
            flux,
            bounds: ScalarBounds::new(bounds, EPS_BP),
        }
    }

    pub fn burgers(bounds: Bounds) -> Self {
        Self::new(ScalarFlux::Burgers, bounds)
    }

    pub fn advection(speed: f64, bounds: Bounds) -> Self {
        Self::new(ScalarFlux::Advection { speed }, bounds)
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds.bounds()
    }
}

impl ConstraintSet<1> for ScalarModel {
    fn specs(&self) -> &[ConstraintSpec] {
        self.bounds.specs()
    }

    fn constraint_value(&self, k: usize, u: &State<1>) -> f64 {
        self.bounds.constraint_value(k, u)
    }
}

impl SystemModel<1> for ScalarModel {
    fn name(&self) -> &'static str {
        match self.flux {
            ScalarFlux::Advection { .. } => "advection",
            ScalarFlux::Burgers => "burgers",
        }
    }

    fn component_names(&self) -> [&'static str; 1] {
        ["u"]
    }

    fn flux(&self, u: &State<1>) -> State<1> {
        State([self.flux.f(u[0])])
    }

    fn is_admissible(&self, u: &State<1>) -> bool {
        u[0].is_finite() && self.bounds().contains(u[0], LOW_ORDER_SLACK)
    }

    fn is_physical(&self, u: &State<1>) -> bool {
        u[0].is_finite()
    }

    fn local_speed(&self, u: &State<1>, omega: f64) -> Option<f64> {
        let s = (self.flux.df(u[0]) - omega).abs();
        s.is_finite().then_some(s)
    }

    fn monitor_quantity(&self, u: &State<1>, q: MonitorQuantity) -> Option<f64> {
        match q {
            MonitorQuantity::Primary => Some(u[0]),
            _ => None,
        }
    }

    fn report_names(&self) -> Vec<(&'static str, ReportKind)> {
        vec![("min_u", ReportKind::Min), ("max_u", ReportKind::Max)]
    }

    fn report_value(&self, _k: usize, u: &State<1>) -> f64 {
        u[0]
    }
}
