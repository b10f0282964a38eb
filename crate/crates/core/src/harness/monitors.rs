//! Raw monitor functions `Du` used to drive the mesh.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::MeshError;
use crate::mesh::{center_derivatives, MeshState};
use crate::state::State;
use crate::systems::{MonitorQuantity, SystemModel};
use crate::timestepper::MonitorSource;

/// Registered monitor recipes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MonitorId {
    /// Independent uniform random value in `[0, 1)` per cell and step.
    AdvectRandom,
    /// `sqrt(u_x^2 + u_xx^2)`.
    Burgers,
    /// `sqrt(rho_x^2 + rho_xx^2)`.
    EulerRho,
    /// `sqrt(100 rho_x^2 + rho_xx^2 + 1000 z_x^2)`.
    FiveqV1,
    /// `sqrt(100 rho_x^2 + 1000 z_x^2)`.
    FiveqV2,
    /// `sqrt(rho_x^2 + rho_xx^2 + 100 u_x^2)`.
    FiveqRp2,
}

impl MonitorId {
    pub const ALL: [MonitorId; 6] = [
        MonitorId::AdvectRandom,
        MonitorId::Burgers,
        MonitorId::EulerRho,
        MonitorId::FiveqV1,
        MonitorId::FiveqV2,
        MonitorId::FiveqRp2,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MonitorId::AdvectRandom => "advect-random",
            MonitorId::Burgers => "burgers",
            MonitorId::EulerRho => "euler-rho",
            MonitorId::FiveqV1 => "fiveq-v1",
            MonitorId::FiveqV2 => "fiveq-v2",
            MonitorId::FiveqRp2 => "fiveq-rp2",
        }
    }

    /// Weighted derivative terms `(quantity, order, weight)`; empty for the
    /// random monitor.
    pub fn terms(&self) -> Vec<(MonitorQuantity, usize, f64)> {
        use MonitorQuantity::*;
        match self {
            MonitorId::AdvectRandom => vec![],
            MonitorId::Burgers => vec![(Primary, 1, 1.0), (Primary, 2, 1.0)],
            MonitorId::EulerRho => vec![(Density, 1, 1.0), (Density, 2, 1.0)],
            MonitorId::FiveqV1 => vec![(Density, 1, 100.0), (Density, 2, 1.0), (VolumeFraction, 1, 1000.0)],
            MonitorId::FiveqV2 => vec![(Density, 1, 100.0), (VolumeFraction, 1, 1000.0)],
            MonitorId::FiveqRp2 => vec![(Density, 1, 1.0), (Density, 2, 1.0), (Velocity, 1, 100.0)],
        }
    }
}

impl fmt::Display for MonitorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MonitorId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MonitorId::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown monitor `{s}`"))
    }
}

/// `sqrt(sum_k w_k |d^{o_k} q_k / dx^{o_k}|^2)` from cell-center derivatives.
pub struct DerivativeMonitor<'a, M: ?Sized> {
    model: &'a M,
    terms: Vec<(MonitorQuantity, usize, f64)>,
    periodic: bool,
}

impl<'a, M: ?Sized> DerivativeMonitor<'a, M> {
    pub fn new(model: &'a M, terms: Vec<(MonitorQuantity, usize, f64)>, periodic: bool) -> Self {
        Self { model, terms, periodic }
    }
}

impl<'a, M, const D: usize> MonitorSource<D> for DerivativeMonitor<'a, M>
where
    M: SystemModel<D> + ?Sized,
{
    fn raw_monitor(&self, field: &[State<D>], mesh: &MeshState, _step: usize) -> Result<Vec<f64>, MeshError> {
        let mut sum = vec![0.0; field.len()];
        for &(q, order, weight) in &self.terms {
            let values: Vec<f64> = field
                .iter()
                .enumerate()
                .map(|(cell, u)| {
                    self.model
                        .monitor_quantity(u, q)
                        .ok_or(MeshError::InvalidMonitor { cell, value: f64::NAN })
                })
                .collect::<Result<_, _>>()?;
            let (d1, d2) = center_derivatives(&values, mesh, self.periodic);
            let d = if order == 1 { d1 } else { d2 };
            for (s, v) in sum.iter_mut().zip(d) {
                *s += weight * v * v;
            }
        }
        Ok(sum.into_iter().map(f64::sqrt).collect())
    }
}

/// Seeded random monitor; every step draws a fresh stream.
#[derive(Clone, Copy, Debug)]
pub struct RandomMonitor {
    pub seed: u64,
}

impl RandomMonitor {
    pub fn values(&self, n: usize, step: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(step as u64);
        (0..n).map(|_| rng.gen::<f64>()).collect()
    }
}

impl<const D: usize> MonitorSource<D> for RandomMonitor {
    fn raw_monitor(&self, field: &[State<D>], _mesh: &MeshState, step: usize) -> Result<Vec<f64>, MeshError> {
        Ok(self.values(field.len(), step))
    }
}
