//! Dense 3×3 real matrices.
//!
//! Every operator of the D1Q3 framework (moment matrix, shift matrix,
//! relaxation rates, equilibrium map and the relaxation matrix itself) is a
//! 3×3 matrix, so a fixed-size row-major array is all that is needed.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

/// Absolute entrywise tolerance used when comparing matrices.
pub const TAU_MAT: f64 = 1e-12;

/// A real 3×3 matrix stored row-major.
///
/// `==` compares entrywise with the absolute tolerance [`TAU_MAT`]; use
/// [`Matrix3::approx_eq`] for another tolerance and [`Matrix3::entries`] for
/// bitwise access.
#[derive(Clone, Copy, Debug, Default)]
pub struct Matrix3 {
    rows: [[f64; 3]; 3],
}

impl Matrix3 {
    pub const fn new(rows: [[f64; 3]; 3]) -> Self {
        Self { rows }
    }

    pub const fn zero() -> Self {
        Self::new([[0.0; 3]; 3])
    }

    pub const fn identity() -> Self {
        Self::new([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub const fn diag(d0: f64, d1: f64, d2: f64) -> Self {
        Self::new([[d0, 0.0, 0.0], [0.0, d1, 0.0], [0.0, 0.0, d2]])
    }

    /// Builds a matrix from nine entries in row-major order.
    pub fn from_row_major(entries: [f64; 9]) -> Self {
        let mut rows = [[0.0; 3]; 3];
        for (k, v) in entries.into_iter().enumerate() {
            rows[k / 3][k % 3] = v;
        }
        Self::new(rows)
    }

    pub fn rows(&self) -> &[[f64; 3]; 3] {
        &self.rows
    }

    /// The nine entries in row-major order.
    pub fn entries(&self) -> [f64; 9] {
        let mut out = [0.0; 9];
        for (k, v) in out.iter_mut().enumerate() {
            *v = self.rows[k / 3][k % 3];
        }
        out
    }

    pub fn row(&self, i: usize) -> [f64; 3] {
        self.rows[i]
    }

    pub fn column(&self, j: usize) -> [f64; 3] {
        [self.rows[0][j], self.rows[1][j], self.rows[2][j]]
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.rows[i][j] = self.rows[j][i];
            }
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = *self;
        out.rows.iter_mut().flatten().for_each(|v| *v *= factor);
        out
    }

    pub fn mul_vec(&self, v: [f64; 3]) -> [f64; 3] {
        let r = &self.rows;
        [
            r[0][0] * v[0] + r[0][1] * v[1] + r[0][2] * v[2],
            r[1][0] * v[0] + r[1][1] * v[1] + r[1][2] * v[2],
            r[2][0] * v[0] + r[2][1] * v[1] + r[2][2] * v[2],
        ]
    }

    pub fn determinant(&self) -> f64 {
        let r = &self.rows;
        r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
    }

    /// Inverse by the adjugate formula; `None` when the determinant is zero
    /// or not finite.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.determinant();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let r = &self.rows;
        let cof = |a: usize, b: usize, c: usize, d: usize| r[a][b] * r[c][d] - r[a][d] * r[c][b];
        let adj = [
            [cof(1, 1, 2, 2), -cof(0, 1, 2, 2), cof(0, 1, 1, 2)],
            [-cof(1, 0, 2, 2), cof(0, 0, 2, 2), -cof(0, 0, 1, 2)],
            [cof(1, 0, 2, 1), -cof(0, 0, 2, 1), cof(0, 0, 1, 1)],
        ];
        Some(Self::new(adj).scale(1.0 / det))
    }

    /// Inverse of a lower-triangular matrix with unit diagonal, by forward
    /// substitution. Entries above the diagonal are ignored.
    pub fn unit_lower_inverse(&self) -> Self {
        let l = &self.rows;
        let a = l[1][0];
        let b = l[2][0];
        let c = l[2][1];
        Self::new([[1.0, 0.0, 0.0], [-a, 1.0, 0.0], [a * c - b, -c, 1.0]])
    }

    pub fn column_sums(&self) -> [f64; 3] {
        let mut sums = [0.0; 3];
        for row in &self.rows {
            for (s, v) in sums.iter_mut().zip(row) {
                *s += v;
            }
        }
        sums
    }

    pub fn max_abs(&self) -> f64 {
        self.rows.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn min_entry(&self) -> f64 {
        self.rows.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }
}

impl PartialEq for Matrix3 {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, TAU_MAT)
    }
}

impl Index<(usize, usize)> for Matrix3 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.rows[i][j]
    }
}

impl IndexMut<(usize, usize)> for Matrix3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.rows[i][j]
    }
}

impl Mul for Matrix3 {
    type Output = Matrix3;
    fn mul(self, rhs: Matrix3) -> Matrix3 {
        let mut out = Matrix3::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.rows[i][j] = (0..3).map(|k| self.rows[i][k] * rhs.rows[k][j]).sum();
            }
        }
        out
    }
}

impl Add for Matrix3 {
    type Output = Matrix3;
    fn add(mut self, rhs: Matrix3) -> Matrix3 {
        for (a, b) in self.rows.iter_mut().flatten().zip(rhs.rows.iter().flatten()) {
            *a += b;
        }
        self
    }
}

impl Sub for Matrix3 {
    type Output = Matrix3;
    fn sub(mut self, rhs: Matrix3) -> Matrix3 {
        for (a, b) in self.rows.iter_mut().flatten().zip(rhs.rows.iter().flatten()) {
            *a -= b;
        }
        self
    }
}

impl Neg for Matrix3 {
    type Output = Matrix3;
    fn neg(self) -> Matrix3 {
        self.scale(-1.0)
    }
}

impl fmt::Display for Matrix3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[{:>24.17e} {:>24.17e} {:>24.17e}]", row[0], row[1], row[2])?;
        }
        Ok(())
    }
}
