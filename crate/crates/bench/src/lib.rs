//! Inputs shared by the benchmarks.

use amm_core::harness::{ProblemId, RunOptions};
use amm_core::weno::Stencil;

/// Stencils sampled from a smooth profile on a stretched mesh.
pub fn stencils(count: usize) -> Vec<Stencil> {
    (0..count)
        .map(|k| {
            let x0 = k as f64 * 0.37;
            Stencil {
                averages: std::array::from_fn(|i| (x0 + 0.1 * i as f64).sin().powi(4)),
                sizes: std::array::from_fn(|i| 0.1 * (1.0 + 0.3 * ((k + i) % 3) as f64)),
            }
        })
        .collect()
}

/// A short Burgers run on `n` cells without mesh recording.
pub fn burgers(n: usize, limiter: bool, moving: bool) -> RunOptions {
    RunOptions {
        n,
        limiter,
        moving,
        t_final: Some(0.1),
        record_mesh: false,
        ..RunOptions::new(ProblemId::Burgers)
    }
}

/// The Euler strong shock cut off after its first few hundred steps.
pub fn euler(n: usize) -> RunOptions {
    RunOptions {
        n,
        t_final: Some(2e-5),
        record_mesh: false,
        ..RunOptions::new(ProblemId::EulerStrongShock)
    }
}
