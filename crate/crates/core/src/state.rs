//! Small fixed-size state vectors and matrices.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

/// A vector of `D` conserved quantities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct State<const D: usize>(pub [f64; D]);

impl<const D: usize> State<D> {
    pub const fn zero() -> Self {
        Self([0.0; D])
    }

    pub const fn splat(v: f64) -> Self {
        Self([v; D])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self(self.0.map(f))
    }
}

impl State<1> {
    pub const fn scalar(v: f64) -> Self {
        Self([v])
    }
}

impl<const D: usize> Default for State<D> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const D: usize> From<[f64; D]> for State<D> {
    fn from(v: [f64; D]) -> Self {
        Self(v)
    }
}

impl<const D: usize> Index<usize> for State<D> {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl<const D: usize> IndexMut<usize> for State<D> {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl<const D: usize> Add for State<D> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<const D: usize> AddAssign for State<D> {
    fn add_assign(&mut self, rhs: Self) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl<const D: usize> Sub for State<D> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self -= rhs;
        self
    }
}

impl<const D: usize> SubAssign for State<D> {
    fn sub_assign(&mut self, rhs: Self) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
    }
}

impl<const D: usize> Neg for State<D> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|v| -v)
    }
}

impl<const D: usize> Mul<f64> for State<D> {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.map(|v| v * s)
    }
}

impl<const D: usize> Mul<State<D>> for f64 {
    type Output = State<D>;
    fn mul(self, u: State<D>) -> State<D> {
        u * self
    }
}

/// Dense `D x D` matrix stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix<const D: usize>(pub [[f64; D]; D]);

impl<const D: usize> Matrix<D> {
    pub fn identity() -> Self {
        let mut m = [[0.0; D]; D];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Self(m)
    }

    pub fn apply(&self, v: &State<D>) -> State<D> {
        let mut out = [0.0; D];
        for (o, row) in out.iter_mut().zip(self.0.iter()) {
            *o = row.iter().zip(v.0.iter()).map(|(a, b)| a * b).sum();
        }
        State(out)
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let mut out = [[0.0; D]; D];
        for i in 0..D {
            for j in 0..D {
                out[i][j] = (0..D).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        Self(out)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.0
            .iter()
            .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Scale row `i` by `s[i]`.
    pub fn scale_rows(&self, s: &[f64; D]) -> Self {
        let mut out = self.0;
        for (row, si) in out.iter_mut().zip(s) {
            for v in row.iter_mut() {
                *v *= si;
            }
        }
        Self(out)
    }

    /// Scale column `j` by `s[j]`.
    pub fn scale_cols(&self, s: &[f64; D]) -> Self {
        let mut out = self.0;
        for row in out.iter_mut() {
            for (v, sj) in row.iter_mut().zip(s) {
                *v *= sj;
            }
        }
        Self(out)
    }
}
