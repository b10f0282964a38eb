//! Third-order affine-invariant WENO reconstruction on non-uniform cells.
//!
//! All polynomials live in the scaled local coordinate `s = (x - x_j) / dx_j`,
//! so cell `j` is `[-1/2, 1/2]` and the smoothness indicators are
//! dimensionless.

use crate::error::WenoError;
use crate::state::{Matrix, State};

/// Linear weights of the three candidate stencils.
pub const LINEAR_WEIGHTS: [f64; 3] = [0.25, 0.5, 0.25];
/// Regularisation in the nonlinear weights.
pub const WENO_EPS: f64 = 1e-12;
/// Condition-number ceiling for characteristic bases.
pub const MAX_BASIS_CONDITION: f64 = 1e12;

/// Five consecutive cells centred on the target cell (index 2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stencil {
    pub averages: [f64; 5],
    pub sizes: [f64; 5],
}

/// Quadratic `c0 + c1 s + c2 s^2` in the scaled local coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadratic(pub [f64; 3]);

impl Quadratic {
    pub fn eval(&self, s: f64) -> f64 {
        let [c0, c1, c2] = self.0;
        c0 + s * (c1 + s * c2)
    }

    /// Mean over `[a, b]`.
    pub fn average(&self, a: f64, b: f64) -> f64 {
        let [c0, c1, c2] = self.0;
        c0 + c1 * 0.5 * (a + b) + c2 * (a * a + a * b + b * b) / 3.0
    }
}

/// Reconstructed values of one cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellReconstruction {
    /// Value at the left interface `x_{j-1/2}^+`.
    pub left: f64,
    pub mid: f64,
    /// Value at the right interface `x_{j+1/2}^-`.
    pub right: f64,
    pub weights: [f64; 3],
}

/// Cell bounds of the stencil in scaled coordinates.
fn scaled_bounds(sizes: &[f64; 5]) -> [(f64, f64); 5] {
    let h = sizes[2];
    let mut b = [(0.0, 0.0); 5];
    b[2] = (-0.5, 0.5);
    b[3] = (0.5, 0.5 + sizes[3] / h);
    b[4] = (b[3].1, b[3].1 + sizes[4] / h);
    b[1] = (-0.5 - sizes[1] / h, -0.5);
    b[0] = (b[1].0 - sizes[0] / h, b[1].0);
    b
}

fn solve3(mut a: [[f64; 3]; 3], mut r: [f64; 3]) -> Result<[f64; 3], WenoError> {
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        if !(a[piv][col].abs() > 1e-300) {
            return Err(WenoError::SingularSystem);
        }
        a.swap(col, piv);
        r.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            r[row] -= f * r[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (r[row] - s) / a[row][row];
    }
    Ok(x)
}

/// Quadratic matching the averages of cells `j-k, j-k+1, j-k+2`.
pub fn candidate_polynomial(k: usize, stencil: &Stencil) -> Result<Quadratic, WenoError> {
    assert!(k < 3, "candidate index must be 0, 1 or 2");
    let bounds = scaled_bounds(&stencil.sizes);
    let mut a = [[0.0; 3]; 3];
    let mut r = [0.0; 3];
    for row in 0..3 {
        let idx = 2 - k + row;
        let (lo, hi) = bounds[idx];
        if !(hi > lo) {
            return Err(WenoError::SingularSystem);
        }
        a[row] = [1.0, 0.5 * (lo + hi), (lo * lo + lo * hi + hi * hi) / 3.0];
        r[row] = stencil.averages[idx];
    }
    solve3(a, r).map(Quadratic)
}

/// Jiang-Shu indicator `sum_{l=1,2} int_{C_j} dx^{2l-1} (p^(l))^2 dx`,
/// integrated exactly. In scaled coordinates it is `c1^2 + 13/3 c2^2`.
pub fn smoothness_indicator(p: &Quadratic) -> f64 {
    let [_, c1, c2] = p.0;
    c1 * c1 + 13.0 / 3.0 * c2 * c2
}

/// `mu = 1e-40 + mean absolute deviation of the five averages`.
pub fn affine_scale(averages: &[f64; 5]) -> f64 {
    let mean = averages.iter().sum::<f64>() / 5.0;
    1e-40 + averages.iter().map(|u| (u - mean).abs()).sum::<f64>() / 5.0
}

/// Nonlinear weights and the blended quadratic.
pub fn blended_polynomial(stencil: &Stencil) -> Result<(Quadratic, [f64; 3]), WenoError> {
    let mu = affine_scale(&stencil.averages);
    let reg = mu * mu * WENO_EPS;
    let mut polys = [Quadratic([0.0; 3]); 3];
    let mut alpha = [0.0; 3];
    for k in 0..3 {
        polys[k] = candidate_polynomial(k, stencil)?;
        let d = smoothness_indicator(&polys[k]) + reg;
        alpha[k] = LINEAR_WEIGHTS[k] / (d * d);
    }
    let total: f64 = alpha.iter().sum();
    let weights = alpha.map(|a| a / total);
    let mut c = [0.0; 3];
    for (p, w) in polys.iter().zip(weights) {
        for i in 0..3 {
            c[i] += w * p.0[i];
        }
    }
    Ok((Quadratic(c), weights))
}

/// Interface and midpoint values of the target cell.
pub fn reconstruct(stencil: &Stencil) -> Result<CellReconstruction, WenoError> {
    let (p, weights) = blended_polynomial(stencil)?;
    Ok(CellReconstruction {
        left: p.eval(-0.5),
        mid: p.0[0],
        right: p.eval(0.5),
        weights,
    })
}

/// Left/right eigenvector matrices; rows of `left` are left eigenvectors,
/// columns of `right` the matching right eigenvectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharacteristicBasis<const D: usize> {
    pub left: Matrix<D>,
    pub right: Matrix<D>,
}

impl<const D: usize> CharacteristicBasis<D> {
    pub fn identity() -> Self {
        Self {
            left: Matrix::identity(),
            right: Matrix::identity(),
        }
    }

    /// `||L S|| ||S^-1 R||` with `S` equilibrating the rows of `R`.
    pub fn condition_estimate(&self) -> f64 {
        let mut s = [1.0; D];
        for (si, row) in s.iter_mut().zip(self.right.0.iter()) {
            let m = row.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if m > 0.0 {
                *si = m;
            }
        }
        let inv = s.map(|v| 1.0 / v);
        self.left.scale_cols(&s).norm_inf() * self.right.scale_rows(&inv).norm_inf()
    }
}

/// Reconstructed states of one cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateReconstruction<const D: usize> {
    pub left: State<D>,
    pub mid: State<D>,
    pub right: State<D>,
}

/// Componentwise reconstruction in the characteristic variables of `basis`.
pub fn reconstruct_characteristic<const D: usize>(
    states: &[State<D>; 5],
    sizes: &[f64; 5],
    basis: &CharacteristicBasis<D>,
) -> Result<StateReconstruction<D>, WenoError> {
    let cond = basis.condition_estimate();
    if !(cond <= MAX_BASIS_CONDITION) {
        return Err(WenoError::IllConditioned(cond));
    }
    let w: [State<D>; 5] = states.map(|u| basis.left.apply(&u));
    let mut left = State::zero();
    let mut mid = State::zero();
    let mut right = State::zero();
    for c in 0..D {
        let stencil = Stencil {
            averages: w.map(|v| v[c]),
            sizes: *sizes,
        };
        let r = reconstruct(&stencil)?;
        left[c] = r.left;
        mid[c] = r.mid;
        right[c] = r.right;
    }
    Ok(StateReconstruction {
        left: basis.right.apply(&left),
        mid: basis.right.apply(&mid),
        right: basis.right.apply(&right),
    })
}

/// Componentwise reconstruction without any projection.
pub fn reconstruct_components<const D: usize>(
    states: &[State<D>; 5],
    sizes: &[f64; 5],
) -> Result<StateReconstruction<D>, WenoError> {
    let mut out = StateReconstruction {
        left: State::zero(),
        mid: State::zero(),
        right: State::zero(),
    };
    for c in 0..D {
        let stencil = Stencil {
            averages: states.map(|v| v[c]),
            sizes: *sizes,
        };
        let r = reconstruct(&stencil)?;
        out.left[c] = r.left;
        out.mid[c] = r.mid;
        out.right[c] = r.right;
    }
    Ok(out)
}
