//! Quadrature, the smooth Burgers solution, error norms and convergence
//! rates.

use super::HarnessError;
use crate::mesh::MeshState;

const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Mean of `f` over `[a, b]` by composite 5-point Gauss-Legendre.
pub fn gauss_legendre_mean<T, F>(mut f: F, a: f64, b: f64, panels: usize) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    F: FnMut(f64) -> T,
{
    let h = (b - a) / panels as f64;
    let mut acc: Option<T> = None;
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            let v = f(c + 0.5 * h * x) * (0.5 * w / panels as f64);
            acc = Some(match acc {
                Some(s) => s + v,
                None => v,
            });
        }
    }
    acc.expect("at least one panel")
}

/// `u0(x) = sin^4 x`.
pub fn sin4(x: f64) -> f64 {
    x.sin().powi(4)
}

fn sin4_prime(x: f64) -> f64 {
    4.0 * x.sin().powi(3) * x.cos()
}

/// Smooth Burgers solution `u = u0(x - u t)` for `u0 = sin^4`.
///
/// Newton from `u0(x)`, tolerance 1e-14, at most 100 iterations; bisection on
/// `[0, 1]` if Newton stalls. Fails when the characteristic equation has no
/// unique root (after shock formation).
pub fn burgers_exact(x: f64, t: f64) -> Result<f64, HarnessError> {
    let g = |u: f64| u - sin4(x - u * t);
    let mut u = sin4(x);
    for _ in 0..100 {
        let r = g(u);
        if r.abs() <= 1e-14 {
            return Ok(u);
        }
        let dg = 1.0 + t * sin4_prime(x - u * t);
        if dg <= 0.0 {
            break;
        }
        u -= r / dg;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    if g(lo) > 0.0 || g(hi) < 0.0 {
        return Err(HarnessError::NoConvergence { x, t });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = 0.5 * (lo + hi);
    if g(u).abs() > 1e-13 {
        return Err(HarnessError::NoConvergence { x, t });
    }
    Ok(u)
}

/// Exact Burgers cell averages on `mesh`.
pub fn burgers_exact_averages(mesh: &MeshState, t: f64) -> Result<Vec<f64>, HarnessError> {
    mesh.nodes
        .windows(2)
        .map(|w| {
            let mut err = None;
            let v = gauss_legendre_mean(
                |x| match burgers_exact(x, t) {
                    Ok(u) => u,
                    Err(e) => {
                        err = Some(e);
                        f64::NAN
                    }
                },
                w[0],
                w[1],
                1,
            );
            match err {
                Some(e) => Err(e),
                None => Ok(v),
            }
        })
        .collect()
}

/// `sum_j |u_j - v_j| dx_j`.
pub fn l1_error(numeric: &[f64], exact: &[f64], sizes: &[f64]) -> Result<f64, HarnessError> {
    if numeric.len() != exact.len() || numeric.len() != sizes.len() {
        return Err(HarnessError::Config(format!(
            "field lengths differ: {}, {}, {}",
            numeric.len(),
            exact.len(),
            sizes.len()
        )));
    }
    Ok(numeric
        .iter()
        .zip(exact)
        .zip(sizes)
        .map(|((u, v), h)| (u - v).abs() * h)
        .sum())
}

/// `log(e_N / e_2N) / log(dx_N / dx_2N)`.
pub fn convergence_rate(err_coarse: f64, err_fine: f64, dx_coarse: f64, dx_fine: f64) -> f64 {
    (err_coarse / err_fine).log10() / (dx_coarse / dx_fine).log10()
}
