//! Fixed-size dense complex matrices.
//!
//! Everything in this crate lives in dimension 2 or 4, so matrices are plain
//! row-major arrays on the stack. [`Matrix2`] carries single-qubit operators and
//! [`Matrix4`] carries two-qubit operators and density matrices.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type ComplexScalar = Complex64;

pub const ZERO: ComplexScalar = Complex64::new(0.0, 0.0);
pub const ONE: ComplexScalar = Complex64::new(1.0, 0.0);
pub const I: ComplexScalar = Complex64::new(0.0, 1.0);

/// Builds a complex scalar, rejecting NaN and infinite components.
pub fn complex(re: f64, im: f64) -> Result<ComplexScalar> {
    if re.is_finite() && im.is_finite() {
        Ok(Complex64::new(re, im))
    } else {
        Err(Error::NonFinite)
    }
}

/// Dense `N x N` complex matrix, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Matrix<const N: usize> {
    data: [[ComplexScalar; N]; N],
}

pub type Matrix2 = Matrix<2>;
pub type Matrix4 = Matrix<4>;

impl<const N: usize> std::fmt::Debug for Matrix<N> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "[")?;
        for row in &self.data {
            write!(f, "  ")?;
            for z in row {
                write!(f, "({:+.6e} {:+.6e}i) ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<const N: usize> Default for Matrix<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Matrix<N> {
    pub const fn from_rows(data: [[ComplexScalar; N]; N]) -> Self {
        Self { data }
    }

    /// Builds a matrix from rows, rejecting non-finite entries.
    pub fn try_from_rows(data: [[ComplexScalar; N]; N]) -> Result<Self> {
        let m = Self { data };
        if m.is_finite() {
            Ok(m)
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn from_real_rows(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(|i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> ComplexScalar) -> Self {
        let mut data = [[ZERO; N]; N];
        for (i, row) in data.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = f(i, j);
            }
        }
        Self { data }
    }

    pub const fn zeros() -> Self {
        Self {
            data: [[ZERO; N]; N],
        }
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { ONE } else { ZERO })
    }

    pub fn diag_real(values: [f64; N]) -> Self {
        Self::from_fn(|i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    pub fn rows(&self) -> &[[ComplexScalar; N]; N] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().flatten().all(|z| z.is_finite())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(|i, j| self.data[j][i].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.data[j][i])
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self::from_fn(|i, j| self.data[i][j].conj())
    }

    pub fn trace(&self) -> ComplexScalar {
        (0..N).map(|i| self.data[i][i]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_fn(|i, j| self.data[i][j] * s)
    }

    pub fn scale_complex(&self, s: ComplexScalar) -> Self {
        Self::from_fn(|i, j| self.data[i][j] * s)
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> ComplexScalar {
        let mut acc = ZERO;
        for i in 0..N {
            for k in 0..N {
                acc += self.data[i][k] * other.data[k][i];
            }
        }
        acc
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Max-entry distance between two matrices.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Max-entry distance between the matrix and its conjugate transpose.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    /// `(H + H^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.dagger()).scale(0.5)
    }

    /// `A B - B A`.
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// `U A U^dagger`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        *u * *self * u.dagger()
    }

    /// Determinant by LU decomposition with partial pivoting.
    pub fn determinant(&self) -> ComplexScalar {
        let mut a = self.data;
        let mut det = ONE;
        for col in 0..N {
            let pivot = (col..N)
                .max_by(|&r, &s| a[r][col].norm().total_cmp(&a[s][col].norm()))
                .unwrap_or(col);
            if a[pivot][col].norm() == 0.0 {
                return ZERO;
            }
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            let p = a[col][col];
            det *= p;
            for r in (col + 1)..N {
                let factor = a[r][col] / p;
                for c in col..N {
                    let sub = factor * a[col][c];
                    a[r][c] -= sub;
                }
            }
        }
        det
    }
}

impl<const N: usize> Index<(usize, usize)> for Matrix<N> {
    type Output = ComplexScalar;
    fn index(&self, (i, j): (usize, usize)) -> &ComplexScalar {
        &self.data[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Matrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ComplexScalar {
        &mut self.data[i][j]
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.data[i][j] + rhs.data[i][j])
    }
}

impl<const N: usize> AddAssign for Matrix<N> {
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..N {
            for j in 0..N {
                self.data[i][j] += rhs.data[i][j];
            }
        }
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.data[i][j] - rhs.data[i][j])
    }
}

impl<const N: usize> Neg for Matrix<N> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_fn(|i, j| -self.data[i][j])
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = [[ZERO; N]; N];
        for (i, row) in out.iter_mut().enumerate() {
            for k in 0..N {
                let a = self.data[i][k];
                if a == ZERO {
                    continue;
                }
                for (j, z) in row.iter_mut().enumerate() {
                    *z += a * rhs.data[k][j];
                }
            }
        }
        Self { data: out }
    }
}

impl<const N: usize> Mul<[ComplexScalar; N]> for Matrix<N> {
    type Output = [ComplexScalar; N];
    fn mul(self, v: [ComplexScalar; N]) -> [ComplexScalar; N] {
        let mut out = [ZERO; N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..N).map(|k| self.data[i][k] * v[k]).sum();
        }
        out
    }
}

/// Kronecker product of two single-qubit operators.
pub fn kron(a: &Matrix2, b: &Matrix2) -> Matrix4 {
    Matrix4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

/// Tensor product of two single-qubit vectors.
pub fn kron_vec(a: &[ComplexScalar; 2], b: &[ComplexScalar; 2]) -> [ComplexScalar; 4] {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

/// `|v><v|`.
pub fn outer<const N: usize>(v: &[ComplexScalar; N]) -> Matrix<N> {
    Matrix::from_fn(|i, j| v[i] * v[j].conj())
}

pub fn inner<const N: usize>(a: &[ComplexScalar; N], b: &[ComplexScalar; N]) -> ComplexScalar {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Pauli matrices and the 2x2 identity.
pub mod pauli {
    use super::{Matrix2, I, ONE, ZERO};

    pub const ID: Matrix2 = Matrix2::from_rows([[ONE, ZERO], [ZERO, ONE]]);
    pub const X: Matrix2 = Matrix2::from_rows([[ZERO, ONE], [ONE, ZERO]]);
    pub const Y: Matrix2 =
        Matrix2::from_rows([[ZERO, super::Complex64::new(0.0, -1.0)], [I, ZERO]]);
    pub const Z: Matrix2 =
        Matrix2::from_rows([[ONE, ZERO], [ZERO, super::Complex64::new(-1.0, 0.0)]]);

    /// `[X, Y, Z]`.
    pub const XYZ: [Matrix2; 3] = [X, Y, Z];
}
