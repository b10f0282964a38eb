//! Flux blending between high-order and first-order sub-cell states.
//!
//! Every bound is written as a functional `g(u) >= 0` that is linear or
//! concave in the conserved variables. Along the segment from a low-order
//! state (where `g > 0`) to a high-order state, `g` then stays above the
//! linear interpolant, so the ratio `Theta` gives a safe blending factor.

use crate::error::LimiterError;
use crate::state::State;

/// Default absolute floor for scalar bounds.
pub const EPS_BP: f64 = 1e-16;
/// Relative floor for positivity constraints of systems.
pub const RELATIVE_FLOOR: f64 = 1e-13;
/// Slack allowed on low-order values of absolute-floor constraints before
/// the bound-preserving CFL condition is reported as broken.
pub const LOW_ORDER_SLACK: f64 = 1e-14;
/// Iterations of the bisection fallback.
pub const BISECTION_STEPS: usize = 40;

/// Largest `theta` such that `theta * phi_h + (1 - theta) * phi_l >= eps`.
///
/// Returns 1 when `phi_h` already satisfies the floor and 0 when the
/// low-order value sits at or below it.
pub fn theta_ratio(phi_h: f64, phi_l: f64, eps: f64) -> f64 {
    if phi_h >= eps {
        return 1.0;
    }
    let den = phi_l - phi_h;
    if den.abs() < 1e-300 {
        return 1.0;
    }
    if phi_l <= eps {
        return 0.0;
    }
    ((phi_l - eps) / den).abs().min(1.0)
}

/// Convex combination of two fluxes; exact at the end points.
pub fn blend_flux<const D: usize>(high: &State<D>, low: &State<D>, theta: f64) -> State<D> {
    if theta == 1.0 {
        *high
    } else if theta == 0.0 {
        *low
    } else {
        *high * theta + *low * (1.0 - theta)
    }
}

/// Floor used by a constraint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Floor {
    /// Fixed floor `eps`.
    Absolute(f64),
    /// Floor `factor * g(u_low)`.
    Relative(f64),
}

impl Floor {
    pub fn eps(&self, low_value: f64) -> f64 {
        match *self {
            Floor::Absolute(e) => e,
            Floor::Relative(f) => f * low_value,
        }
    }
}

/// Description of one constraint `g(u) >= 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstraintSpec {
    pub name: &'static str,
    /// Constraints are enforced stage by stage in increasing order.
    pub stage: usize,
    pub floor: Floor,
}

/// A set of linear or concave constraint functionals.
pub trait ConstraintSet<const D: usize> {
    fn specs(&self) -> &[ConstraintSpec];
    fn constraint_value(&self, k: usize, u: &State<D>) -> f64;
}

/// High-order sub-cell state and its first-order counterpart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubCellPair<const D: usize> {
    pub high: State<D>,
    pub low: State<D>,
}

/// Lower and upper bounds of a scalar quantity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Bounds {
    pub fn new(lower: Option<f64>, upper: Option<f64>) -> Self {
        if let (Some(l), Some(u)) = (lower, upper) {
            assert!(l <= u, "lower bound {l} exceeds upper bound {u}");
        }
        Self { lower, upper }
    }

    pub fn contains(&self, u: f64, tol: f64) -> bool {
        self.lower.is_none_or(|l| u >= l - tol) && self.upper.is_none_or(|m| u <= m + tol)
    }
}

fn low_order_ok(spec: &ConstraintSpec, value: f64) -> bool {
    match spec.floor {
        Floor::Absolute(_) => value >= -LOW_ORDER_SLACK,
        Floor::Relative(_) => value > 0.0,
    }
}

fn blended_ok(spec: &ConstraintSpec, value: f64) -> bool {
    match spec.floor {
        Floor::Absolute(_) => value >= 0.0,
        Floor::Relative(_) => value > 0.0,
    }
}

/// Blending factor for one interface.
///
/// `sides` holds the sub-cell pairs adjacent to the interface: the `+`
/// sub-cell of the left cell and the `-` sub-cell of the right cell (one of
/// them is absent at a non-periodic boundary). Constraints are processed in
/// stage order; each stage blends the current state towards the low-order
/// one, and the factors multiply. A bisection pass repairs rounding-level
/// undershoots of the final blend.
pub fn limit_interface<C, const D: usize>(set: &C, sides: &[SubCellPair<D>]) -> Result<f64, LimiterError>
where
    C: ConstraintSet<D> + ?Sized,
{
    let specs = set.specs();
    for side in sides {
        for (k, spec) in specs.iter().enumerate() {
            let value = set.constraint_value(k, &side.low);
            if !low_order_ok(spec, value) {
                return Err(LimiterError::LowOrderViolation {
                    constraint: spec.name,
                    value,
                });
            }
        }
    }

    let n_stages = specs.iter().map(|s| s.stage).max().unwrap_or(0);
    let mut theta = 1.0;
    let mut current: Vec<State<D>> = sides.iter().map(|s| s.high).collect();
    for stage in 0..=n_stages {
        let mut stage_theta = 1.0f64;
        for (side, cur) in sides.iter().zip(&current) {
            for (k, spec) in specs.iter().enumerate().filter(|(_, s)| s.stage == stage) {
                let low = set.constraint_value(k, &side.low);
                let high = set.constraint_value(k, cur);
                let eps = spec.floor.eps(low);
                stage_theta = stage_theta.min(theta_ratio(high, low, eps));
            }
        }
        if stage_theta < 1.0 {
            for (side, cur) in sides.iter().zip(current.iter_mut()) {
                *cur = blend_flux(cur, &side.low, stage_theta);
            }
            theta *= stage_theta;
        }
    }

    let admissible = |t: f64| {
        sides.iter().all(|side| {
            let u = blend_flux(&side.high, &side.low, t);
            specs
                .iter()
                .enumerate()
                .all(|(k, spec)| blended_ok(spec, set.constraint_value(k, &u)))
        })
    };
    if theta > 0.0 && !admissible(theta) {
        let (mut lo, mut hi) = (0.0, theta);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if admissible(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        theta = lo;
    }
    Ok(theta)
}

/// Scalar bounds as a constraint set.
#[derive(Clone, Debug)]
pub struct ScalarBounds {
    bounds: Bounds,
    specs: Vec<ConstraintSpec>,
    map: Vec<bool>,
}

impl ScalarBounds {
    pub fn new(bounds: Bounds, eps: f64) -> Self {
        let mut specs = Vec::new();
        let mut map = Vec::new();
        if bounds.lower.is_some() {
            specs.push(ConstraintSpec {
                name: "lower_bound",
                stage: 0,
                floor: Floor::Absolute(eps),
            });
            map.push(false);
        }
        if bounds.upper.is_some() {
            specs.push(ConstraintSpec {
                name: "upper_bound",
                stage: 0,
                floor: Floor::Absolute(eps),
            });
            map.push(true);
        }
        Self { bounds, specs, map }
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }
}

impl ConstraintSet<1> for ScalarBounds {
    fn specs(&self) -> &[ConstraintSpec] {
        &self.specs
    }

    fn constraint_value(&self, k: usize, u: &State<1>) -> f64 {
        if self.map[k] {
            self.bounds.upper.unwrap_or(f64::INFINITY) - u[0]
        } else {
            u[0] - self.bounds.lower.unwrap_or(f64::NEG_INFINITY)
        }
    }
}

/// `theta_{j+1/2}` for a scalar bound from the `+` sub-cell of cell `j` and
/// the `-` sub-cell of cell `j+1`.
pub fn theta_interface_scalar(
    uh_plus_j: f64,
    ul_plus_j: f64,
    uh_minus_j1: f64,
    ul_minus_j1: f64,
    bounds: Bounds,
    eps: f64,
) -> Result<f64, LimiterError> {
    let set = ScalarBounds::new(bounds, eps);
    limit_interface(
        &set,
        &[
            SubCellPair {
                high: State([uh_plus_j]),
                low: State([ul_plus_j]),
            },
            SubCellPair {
                high: State([uh_minus_j1]),
                low: State([ul_minus_j1]),
            },
        ],
    )
}
