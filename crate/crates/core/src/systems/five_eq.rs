//! Five-equation two-medium model with stiffened-gas phases,
//! `U = (z1 rho1, z2 rho2, rho u, E, z1)`.
//!
//! The volume-fraction equation `z1_t + u z1_x = 0` is non-conservative. It
//! is folded into a global flux `K = F - R` with
//! `R(x) = -int_{x_{1/2}}^x u z1_x`, accumulated cell by cell from the
//! reconstructed values, with a linear `z1` path and a single velocity
//! value `u*` across each interface.

use super::{FacePair, FluxInput, MonitorQuantity, ReportKind, StageFluxes, SystemModel};
use crate::error::ModelError;
use crate::limiter::{ConstraintSet, ConstraintSpec, Floor, RELATIVE_FLOOR};
use crate::state::{Matrix, State};
use crate::weno::CharacteristicBasis;

/// Tolerance on the volume fraction before mixture evaluation fails.
pub const Z_TOLERANCE: f64 = 1e-12;

const CONSTRAINTS: [ConstraintSpec; 5] = [
    ConstraintSpec {
        name: "z1rho1",
        stage: 0,
        floor: Floor::Relative(RELATIVE_FLOOR),
    },
    ConstraintSpec {
        name: "z2rho2",
        stage: 0,
        floor: Floor::Relative(RELATIVE_FLOOR),
    },
    ConstraintSpec {
        name: "z1",
        stage: 0,
        floor: Floor::Absolute(0.0),
    },
    ConstraintSpec {
        name: "one_minus_z1",
        stage: 0,
        floor: Floor::Absolute(0.0),
    },
    ConstraintSpec {
        name: "rhoe_minus_pinf",
        stage: 1,
        floor: Floor::Relative(RELATIVE_FLOOR),
    },
];

/// Stiffened-gas phase `p = (gamma - 1) rho e - gamma pinf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StiffenedGas {
    pub gamma: f64,
    pub pinf: f64,
}

/// Mixture parameters at a given volume fraction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mixture {
    pub gamma: f64,
    pub pinf: f64,
    /// `1 / (gamma - 1)`.
    pub a: f64,
    /// `gamma pinf / (gamma - 1)`.
    pub b: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiveEqModel {
    pub phase1: StiffenedGas,
    pub phase2: StiffenedGas,
}

/// Fifth-component pieces of the global flux of one stage.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalFluxField {
    /// `R^-_{i}` at interface `i`, `N + 1` values; `r_minus[0] = 0`.
    pub r_minus: Vec<f64>,
    /// `R^+_{i}` at interface `i`.
    pub r_plus: Vec<f64>,
    /// `R_j` at cell centres.
    pub r_cell: Vec<f64>,
    /// Interface path jumps `R^+ - R^-`.
    pub path_jump: Vec<f64>,
}

/// Star velocity from the physical-flux star state.
fn velocity_of(u: &State<5>) -> Option<f64> {
    let rho = u[0] + u[1];
    (rho > 0.0 && u.is_finite()).then(|| u[2] / rho)
}

impl FiveEqModel {
    /// Build after checking `(gamma1 - gamma2)(pinf1 - pinf2) >= 0`, which
    /// makes `pinf(z1)` convex and `rho e - pinf` concave.
    pub fn new(phase1: StiffenedGas, phase2: StiffenedGas) -> Result<Self, ModelError> {
        for (k, ph) in [(1, phase1), (2, phase2)] {
            if !(ph.gamma > 1.0) || !(ph.pinf >= 0.0) {
                return Err(ModelError::InvalidParameters(format!(
                    "phase {k} needs gamma > 1 and pinf >= 0, got {ph:?}"
                )));
            }
        }
        if (phase1.gamma - phase2.gamma) * (phase1.pinf - phase2.pinf) < 0.0 {
            return Err(ModelError::InvalidParameters(
                "(gamma1 - gamma2)(pinf1 - pinf2) must be non-negative".into(),
            ));
        }
        Ok(Self { phase1, phase2 })
    }

    /// Mixture rules `1/(gamma-1) = sum z_k/(gamma_k-1)` and
    /// `gamma pinf/(gamma-1) = sum z_k gamma_k pinf_k/(gamma_k-1)`.
    pub fn mixture(&self, z1: f64) -> Result<Mixture, ModelError> {
        if !(z1 >= -Z_TOLERANCE && z1 <= 1.0 + Z_TOLERANCE) {
            return Err(ModelError::Inadmissible(format!("volume fraction {z1} outside [0, 1]")));
        }
        Ok(self.mixture_clamped(z1))
    }

    fn mixture_clamped(&self, z1: f64) -> Mixture {
        let z1 = z1.clamp(0.0, 1.0);
        let z2 = 1.0 - z1;
        let (p1, p2) = (self.phase1, self.phase2);
        let a = z1 / (p1.gamma - 1.0) + z2 / (p2.gamma - 1.0);
        let b = z1 * p1.gamma * p1.pinf / (p1.gamma - 1.0) + z2 * p2.gamma * p2.pinf / (p2.gamma - 1.0);
        Mixture {
            gamma: 1.0 + 1.0 / a,
            pinf: b / (1.0 + a),
            a,
            b,
        }
    }

    /// Derivatives of `a` and `b` with respect to `z1`.
    fn mixture_slopes(&self) -> (f64, f64) {
        let (p1, p2) = (self.phase1, self.phase2);
        (
            1.0 / (p1.gamma - 1.0) - 1.0 / (p2.gamma - 1.0),
            p1.gamma * p1.pinf / (p1.gamma - 1.0) - p2.gamma * p2.pinf / (p2.gamma - 1.0),
        )
    }

    /// Conserved state from phase densities, velocity, pressure and `z1`.
    pub fn conserved(&self, rho1: f64, rho2: f64, u: f64, p: f64, z1: f64) -> State<5> {
        let mix = self.mixture_clamped(z1);
        let m1 = z1 * rho1;
        let m2 = (1.0 - z1) * rho2;
        let rho = m1 + m2;
        State([m1, m2, rho * u, mix.a * p + mix.b + 0.5 * rho * u * u, z1])
    }

    pub fn density(&self, u: &State<5>) -> f64 {
        u[0] + u[1]
    }

    pub fn velocity(&self, u: &State<5>) -> f64 {
        u[2] / self.density(u)
    }

    /// `rho e = E - (rho u)^2 / (2 rho)`.
    pub fn internal_energy(&self, u: &State<5>) -> f64 {
        u[3] - 0.5 * u[2] * u[2] / self.density(u)
    }

    pub fn pressure(&self, u: &State<5>) -> f64 {
        let mix = self.mixture_clamped(u[4]);
        (self.internal_energy(u) - mix.b) / mix.a
    }

    pub fn rhoe_minus_pinf(&self, u: &State<5>) -> f64 {
        let rho = self.density(u);
        if !(rho > 0.0) {
            return f64::NEG_INFINITY;
        }
        self.internal_energy(u) - self.mixture_clamped(u[4]).pinf
    }

    /// `c~^2 = gamma (p + pinf)/rho + kappa pinf / rho`, `kappa = 1` for `p < 0`.
    pub fn modified_sound_speed_sq(&self, u: &State<5>) -> Result<f64, ModelError> {
        let rho = self.density(u);
        if !(rho > 0.0) {
            return Err(ModelError::Inadmissible(format!("non-positive density in {:?}", u.0)));
        }
        let mix = self.mixture(u[4])?;
        let p = (self.internal_energy(u) - mix.b) / mix.a;
        let c2 = mix.gamma * (p + mix.pinf) / rho;
        let kappa = if p < 0.0 { 1.0 } else { 0.0 };
        let ct2 = c2 + kappa * mix.pinf / rho;
        if !(ct2 > 0.0) {
            return Err(ModelError::Inadmissible(format!("c~^2 = {ct2} in {:?}", u.0)));
        }
        Ok(ct2)
    }

    /// `alpha = max_j (|u_j| + c~_j)`.
    pub fn alpha(&self, field: &[State<5>]) -> Result<f64, ModelError> {
        let mut alpha = 0.0f64;
        for u in field {
            alpha = alpha.max(self.velocity(u).abs() + self.modified_sound_speed_sq(u)?.sqrt());
        }
        Ok(alpha)
    }

    /// Fifth component of `K(U+) - K(U-) = F(U+) - F(U-) - jump e5`.
    ///
    /// `jump = None` uses the physical flux.
    pub fn star_state(&self, um: &State<5>, up: &State<5>, alpha: f64, jump: Option<f64>) -> State<5> {
        let mut dk = self.flux(up) - self.flux(um);
        if let Some(j) = jump {
            dk[4] -= j;
        }
        (*um + *up) * 0.5 - dk * (0.5 / alpha)
    }

    /// Path velocity `u* = (rho u)* / ((z1 rho1)* + (z2 rho2)*)` and the
    /// interface jump `R^+ - R^- = -u* (z1^+ - z1^-)`.
    ///
    /// With `strict`, `|u*| <= alpha` is asserted; otherwise `u*` is
    /// clamped into `[-alpha, alpha]` (and set to 0 when the star density is
    /// not positive), which is used for unlimited high-order interface pairs.
    pub fn path_jump(&self, um: &State<5>, up: &State<5>, alpha: f64, strict: bool) -> Result<(f64, f64), ModelError> {
        let star = self.star_state(um, up, alpha, None);
        let u_star = match velocity_of(&star) {
            Some(v) => {
                if strict && v.abs() > alpha * (1.0 + 1e-12) {
                    return Err(ModelError::StarVelocity { u_star: v, alpha });
                }
                v.clamp(-alpha, alpha)
            }
            None if strict => {
                return Err(ModelError::Inadmissible(format!(
                    "star state without positive density between {:?} and {:?}",
                    um.0, up.0
                )))
            }
            None => 0.0,
        };
        Ok((-u_star * (up[4] - um[4]), u_star))
    }

    /// `-int u z1_x` over the left and right halves of a cell, with `u` and
    /// `z1` the quadratics through the left, middle and right values.
    ///
    /// The velocity falls back to `fallback` when a density is not positive.
    pub fn half_cell_integrals(&self, left: &State<5>, mid: &State<5>, right: &State<5>, fallback: f64) -> (f64, f64) {
        let vel = |u: &State<5>| velocity_of(u);
        let (ul, um, ur) = match (vel(left), vel(mid), vel(right)) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => (fallback, fallback, fallback),
        };
        // Quadratics on s in [-1, 1]: q(s) = q0 + q1 s + q2 s^2.
        let u1 = 0.5 * (ur - ul);
        let u2 = 0.5 * (ul - 2.0 * um + ur);
        let z1 = 0.5 * (right[4] - left[4]);
        let z2 = 0.5 * (left[4] - 2.0 * mid[4] + right[4]);
        // int (u0 + u1 s + u2 s^2)(z1 + 2 z2 s) ds over [0, 1] and [-1, 0].
        let c0 = um * z1;
        let c1 = 2.0 * um * z2 + u1 * z1;
        let c2 = 2.0 * u1 * z2 + u2 * z1;
        let c3 = 2.0 * u2 * z2;
        let right_half = c0 + c1 / 2.0 + c2 / 3.0 + c3 / 4.0;
        let left_half = c0 - c1 / 2.0 + c2 / 3.0 - c3 / 4.0;
        (-left_half, -right_half)
    }

    /// Recursion for the global-flux integrals anchored at the left
    /// boundary: `R_j = R^+_{j-1/2} + B_{j,L}`, `R^-_{j+1/2} = R_j + B_{j,R}`,
    /// `R^+_{j+1/2} = R^-_{j+1/2} + B_Psi`.
    pub fn assemble_global_flux(&self, input: &FluxInput<'_, 5>) -> Result<GlobalFluxField, ModelError> {
        let n = input.n_cells();
        let mut path_jump = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let (um, up) = input.interface_values(i);
            path_jump.push(self.path_jump(&um, &up, input.alpha, false)?.0);
        }
        let mut r_minus = vec![0.0; n + 1];
        let mut r_plus = vec![0.0; n + 1];
        let mut r_cell = vec![0.0; n];
        r_plus[0] = path_jump[0];
        for j in 0..n {
            let rec = &input.recon[j + 1];
            let avg = input.average(j as isize);
            let (bl, br) = self.half_cell_integrals(&rec.left, &rec.mid, &rec.right, self.velocity(&avg));
            r_cell[j] = r_plus[j] + bl;
            r_minus[j + 1] = r_cell[j] + br;
            r_plus[j + 1] = r_minus[j + 1] + path_jump[j + 1];
        }
        Ok(GlobalFluxField {
            r_minus,
            r_plus,
            r_cell,
            path_jump,
        })
    }

    /// `K(U) = F(U) - R e5`.
    pub fn global_flux(&self, u: &State<5>, r: f64) -> State<5> {
        let mut k = self.flux(u);
        k[4] -= r;
        k
    }

    /// Interface flux from the global flux; `1/2 (K^- + K^+) - alpha/2
    /// (U^+ - U^-) - omega U^*`, with `U^*` built from `K`.
    pub fn interface_flux(
        &self,
        km: &State<5>,
        kp: &State<5>,
        um: &State<5>,
        up: &State<5>,
        alpha: f64,
        omega: f64,
    ) -> State<5> {
        let star = (*um + *up) * 0.5 - (*kp - *km) * (0.5 / alpha);
        (*km + *kp) * 0.5 - (*up - *um) * (0.5 * alpha) - star * omega
    }
}

impl ConstraintSet<5> for FiveEqModel {
    fn specs(&self) -> &[ConstraintSpec] {
        &CONSTRAINTS
    }

    fn constraint_value(&self, k: usize, u: &State<5>) -> f64 {
        match k {
            0 => u[0],
            1 => u[1],
            2 => u[4],
            3 => 1.0 - u[4],
            _ => self.rhoe_minus_pinf(u),
        }
    }
}

impl SystemModel<5> for FiveEqModel {
    fn name(&self) -> &'static str {
        "five-equation"
    }

    fn component_names(&self) -> [&'static str; 5] {
        ["z1rho1", "z2rho2", "rho_u", "E", "z1"]
    }

    fn flux(&self, u: &State<5>) -> State<5> {
        let v = self.velocity(u);
        let p = self.pressure(u);
        State([u[0] * v, u[1] * v, u[2] * v + p, (u[3] + p) * v, 0.0])
    }

    fn is_admissible(&self, u: &State<5>) -> bool {
        u.is_finite()
            && u[0] > 0.0
            && u[1] > 0.0
            && (0.0..=1.0).contains(&u[4])
            && self.rhoe_minus_pinf(u) > 0.0
    }

    fn local_speed(&self, u: &State<5>, _omega: f64) -> Option<f64> {
        let ct2 = self.modified_sound_speed_sq(u).ok()?;
        let s = self.velocity(u).abs() + ct2.sqrt();
        s.is_finite().then_some(s)
    }

    fn finalize_alpha(&self, alpha: f64, omega: &[f64]) -> f64 {
        omega.iter().fold(alpha, |a, w| a.max(w.abs()))
    }

    fn cfl_speed(&self, alpha: f64, omega_l: f64, omega_r: f64) -> f64 {
        alpha + omega_l.abs().max(omega_r.abs())
    }

    fn characteristic_basis(&self, u: &State<5>) -> Result<Option<CharacteristicBasis<5>>, ModelError> {
        if !self.is_admissible(u) {
            return Err(ModelError::Inadmissible(format!("basis state {:?}", u.0)));
        }
        let mix = self.mixture(u[4])?;
        let (da, db) = self.mixture_slopes();
        let (m1, m2) = (u[0], u[1]);
        let rho = m1 + m2;
        let v = u[2] / rho;
        let p = self.pressure(u);
        let rc2 = mix.gamma * (p + mix.pinf);
        let c = (rc2 / rho).sqrt();
        let a = mix.a;
        let dpz = da * p + db;
        // Primitive variables W = (z1 rho1, z2 rho2, u, p, z1).
        let du_dw = Matrix([
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0, 0.0],
            [v, v, rho, 0.0, 0.0],
            [0.5 * v * v, 0.5 * v * v, rho * v, a, dpz],
            [0.0, 0.0, 0.0, 0.0, 1.0],
        ]);
        let dw_du = Matrix([
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0, 0.0],
            [-v / rho, -v / rho, 1.0 / rho, 0.0, 0.0],
            [0.5 * v * v / a, 0.5 * v * v / a, -v / a, 1.0 / a, -dpz / a],
            [0.0, 0.0, 0.0, 0.0, 1.0],
        ]);
        // Columns ordered by speed: u - c, u (three fields), u + c.
        let r_w = Matrix([
            [m1, 1.0, 0.0, 0.0, m1],
            [m2, 0.0, 1.0, 0.0, m2],
            [-c, 0.0, 0.0, 0.0, c],
            [rc2, 0.0, 0.0, 0.0, rc2],
            [0.0, 0.0, 0.0, 1.0, 0.0],
        ]);
        let l_w = Matrix([
            [0.0, 0.0, -0.5 / c, 0.5 / rc2, 0.0],
            [1.0, 0.0, 0.0, -m1 / rc2, 0.0],
            [0.0, 1.0, 0.0, -m2 / rc2, 0.0],
            [0.0, 0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 0.5 / c, 0.5 / rc2, 0.0],
        ]);
        Ok(Some(CharacteristicBasis {
            left: l_w.matmul(&dw_du),
            right: du_dw.matmul(&r_w),
        }))
    }

    fn monitor_quantity(&self, u: &State<5>, q: MonitorQuantity) -> Option<f64> {
        match q {
            MonitorQuantity::Primary | MonitorQuantity::Density => Some(self.density(u)),
            MonitorQuantity::Velocity => Some(self.velocity(u)),
            MonitorQuantity::VolumeFraction => Some(u[4]),
        }
    }

    fn report_names(&self) -> Vec<(&'static str, ReportKind)> {
        vec![
            ("min_rho", ReportKind::Min),
            ("min_p", ReportKind::Min),
            ("min_z", ReportKind::Min),
            ("max_z", ReportKind::Max),
            ("min_z1rho1", ReportKind::Min),
            ("min_z2rho2", ReportKind::Min),
            ("min_rhoe_minus_pinf", ReportKind::Min),
        ]
    }

    fn report_value(&self, k: usize, u: &State<5>) -> f64 {
        match k {
            0 => self.density(u),
            1 => self.pressure(u),
            2 | 3 => u[4],
            4 => u[0],
            5 => u[1],
            _ => self.rhoe_minus_pinf(u),
        }
    }

    fn supports_periodic(&self) -> bool {
        false
    }

    fn stage_fluxes(&self, input: &FluxInput<'_, 5>) -> Result<StageFluxes<5>, ModelError> {
        if input.periodic {
            return Err(ModelError::InvalidParameters(
                "the five-equation model needs non-periodic boundaries".into(),
            ));
        }
        let n = input.n_cells();
        let alpha = input.alpha;
        let g = self.assemble_global_flux(input)?;

        let mut high = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let (um, up) = input.interface_values(i);
            let km = self.global_flux(&um, g.r_minus[i]);
            let kp = self.global_flux(&up, g.r_plus[i]);
            high.push(FacePair::shared(self.interface_flux(&km, &kp, &um, &up, alpha, input.omega[i])));
        }

        // First-order fluxes in the frame of each adjacent cell, so that the
        // cell's reference value R_j is the one used on its own side.
        let mut low = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let am = input.average(i as isize - 1);
            let ap = input.average(i as isize);
            let (jump, _) = self.path_jump(&am, &ap, alpha, true)?;
            let w = input.omega[i];
            let r_left = if i == 0 { 0.0 } else { g.r_cell[i - 1] };
            let r_right = if i == n { g.r_plus[n] } else { g.r_cell[i] };
            let from_left = self.interface_flux(
                &self.global_flux(&am, r_left),
                &self.global_flux(&ap, r_left + jump),
                &am,
                &ap,
                alpha,
                w,
            );
            let from_right = self.interface_flux(
                &self.global_flux(&am, r_right - jump),
                &self.global_flux(&ap, r_right),
                &am,
                &ap,
                alpha,
                w,
            );
            low.push(FacePair { from_left, from_right });
        }

        let reference = (0..n)
            .map(|j| self.global_flux(&input.average(j as isize), g.r_cell[j]))
            .collect();
        Ok(StageFluxes { high, low, reference })
    }
}
