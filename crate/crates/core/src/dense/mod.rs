//! Dense complex linear algebra.
//!
//! Every operator handled by this crate is a modest dense complex matrix (a
//! few thousand unknowns at most), so a row-major `Vec<Complex64>` is the only
//! storage format. Factorizations, the matrix exponential and the banded
//! resolvent kernel live here; singular values and eigenvalues are delegated
//! to `nalgebra`.

mod band;
mod expm;
mod lu;
mod qr;
mod spectral;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use band::BandLu;
pub use expm::matrix_exponential;
pub use lu::{solve_linear, Lu};
pub use qr::{null_space, NullSpace};
pub use spectral::{singular_values, spectral_quantities, SpectralQuantities};

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DenseError {
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("singular matrix: pivot {pivot:.3e} at step {step} is below {threshold:.3e}")]
    SingularMatrix { step: usize, pivot: f64, threshold: f64 },
    #[error("matrix exponential overflow: {0}")]
    Overflow(String),
    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        partial: Box<SpectralQuantities>,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Induced operator norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    /// Maximum absolute row sum, the norm induced by the sup norm on vectors.
    Sup,
    /// Largest singular value.
    Spectral,
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::Sup => f.write_str("sup"),
            NormKind::Spectral => f.write_str("spectral"),
        }
    }
}

/// Dense complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                let z = self[(i, j)];
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    /// Builds a matrix from row-major data, rejecting non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, DenseError> {
        if data.len() != rows * cols {
            return Err(DenseError::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.is_finite()) {
            return Err(DenseError::NonFinite {
                row: k / cols.max(1),
                col: k % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self, DenseError> {
        Self::new(rows, cols, data.iter().map(|&x| real(x)).collect())
    }

    /// Row-major construction from nested rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self, DenseError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(DenseError::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.iter().flatten().copied().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::default(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { real(1.0) } else { real(0.0) })
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { real(0.0) })
    }

    /// Single-column matrix.
    pub fn column(values: &[C64]) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [C64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, values: &[C64]) {
        assert_eq!(values.len(), self.rows, "column length");
        for (i, &v) in values.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Induced sup norm (maximum absolute row sum).
    pub fn norm_sup(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Induced one norm (maximum absolute column sum).
    pub fn norm_one(&self) -> f64 {
        let mut sums = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (s, z) in sums.iter_mut().zip(self.row(i)) {
                *s += z.norm();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        operator_norm(self, kind)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `s·I − self`, the shape every resolvent computation starts from.
    pub fn shifted_negation(&self, s: C64) -> Matrix {
        assert!(self.is_square(), "shift of a non-square matrix");
        let mut out = self.scale(real(-1.0));
        for i in 0..self.rows {
            out[(i, i)] += s;
        }
        out
    }

    pub fn add_scaled_identity(&self, s: C64) -> Matrix {
        assert!(self.is_square(), "shift of a non-square matrix");
        let mut out = self.clone();
        for i in 0..self.rows {
            out[(i, i)] += s;
        }
        out
    }

    /// Checked product.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix, DenseError> {
        if self.cols != other.rows {
            return Err(DenseError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let n = other.cols;
        let mut out = Matrix::zeros(self.rows, n);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == C64::default() {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(C64, C64) -> C64) -> Result<Matrix, DenseError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(DenseError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, other: &Matrix) -> Result<Matrix, DenseError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Matrix) -> Result<Matrix, DenseError> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Rows and columns picked by index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Matrix {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "block out of range");
        Matrix::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(
            r0 + block.rows <= self.rows && c0 + block.cols <= self.cols,
            "block out of range"
        );
        for i in 0..block.rows {
            let dst = &mut self.data[(r0 + i) * self.cols + c0..(r0 + i) * self.cols + c0 + block.cols];
            dst.copy_from_slice(block.row(i));
        }
    }

    /// `[[a, b], [c, d]]` assembled from four conforming blocks.
    pub fn block2x2(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Result<Matrix, DenseError> {
        if a.rows != b.rows || c.rows != d.rows || a.cols != c.cols || b.cols != d.cols {
            return Err(DenseError::DimensionMismatch("2x2 block layout".into()));
        }
        let mut out = Matrix::zeros(a.rows + c.rows, a.cols + b.cols);
        out.set_block(0, 0, a);
        out.set_block(0, a.cols, b);
        out.set_block(a.rows, 0, c);
        out.set_block(a.rows, a.cols, d);
        Ok(out)
    }

    pub(crate) fn to_nalgebra(&self) -> nalgebra::DMatrix<C64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs).expect("matrix product dimensions")
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.try_add(rhs).expect("matrix sum dimensions")
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.try_sub(rhs).expect("matrix difference dimensions")
    }
}

/// Complex vector with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<C64>);

impl Vector {
    pub fn new(values: Vec<C64>) -> Result<Self, DenseError> {
        if let Some(k) = values.iter().position(|z| !z.is_finite()) {
            return Err(DenseError::NonFinite { row: k, col: 0 });
        }
        Ok(Self(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }

    pub fn to_column(&self) -> Matrix {
        Matrix::column(&self.0)
    }

    pub fn norm_sup(&self) -> f64 {
        sup_norm(&self.0)
    }
}

pub fn sup_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn euclidean_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Induced operator norm of `a`.
pub fn operator_norm(a: &Matrix, norm: NormKind) -> f64 {
    match norm {
        NormKind::Sup => a.norm_sup(),
        NormKind::Spectral => {
            if a.rows == 0 || a.cols == 0 {
                return 0.0;
            }
            // Unlimited sweeps: the SVD of a finite matrix always converges.
            a.to_nalgebra()
                .try_svd(false, false, f64::EPSILON, 0)
                .map(|svd| svd.singular_values.iter().copied().fold(0.0, f64::max))
                .unwrap_or(f64::NAN)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_entries() {
        let err = Matrix::new(1, 2, vec![real(1.0), c64(f64::NAN, 0.0)]).unwrap_err();
        assert_eq!(err, DenseError::NonFinite { row: 0, col: 1 });
        assert!(Matrix::new(2, 2, vec![real(1.0); 3]).is_err());
        assert!(Vector::new(vec![c64(0.0, f64::INFINITY)]).is_err());
    }

    #[test]
    fn identity_norms_are_one() {
        let id = Matrix::identity(4);
        assert_eq!(operator_norm(&id, NormKind::Sup), 1.0);
        assert!((operator_norm(&id, NormKind::Spectral) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sup_norm_is_max_row_sum() {
        let a = Matrix::from_real(2, 2, &[1.0, -2.0, 0.0, 3.0]).unwrap();
        assert_eq!(operator_norm(&a, NormKind::Sup), 3.0);
    }

    #[test]
    fn spectral_norm_of_nilpotent() {
        // AᴴA = diag(0, 4), so the singular values are 2 and 0.
        let a = Matrix::from_real(2, 2, &[0.0, 2.0, 0.0, 0.0]).unwrap();
        let aha = &a.adjoint() * &a;
        let hand = aha[(0, 0)].re.max(aha[(1, 1)].re).sqrt();
        assert_eq!(hand, 2.0);
        assert!((operator_norm(&a, NormKind::Spectral) - hand).abs() < 1e-14);
    }

    #[test]
    fn block_assembly_round_trips() {
        let a = Matrix::identity(2);
        let b = Matrix::zeros(2, 1);
        let c = Matrix::zeros(1, 2);
        let d = Matrix::from_real(1, 1, &[5.0]).unwrap();
        let m = Matrix::block2x2(&a, &b, &c, &d).unwrap();
        assert_eq!(m.rows(), 3);
        assert_eq!(m[(2, 2)], real(5.0));
        assert_eq!(m.block(0, 0, 2, 2), a);
    }

    #[test]
    fn matmul_checks_dimensions() {
        let a = Matrix::zeros(2, 3);
        assert!(a.matmul(&Matrix::zeros(2, 2)).is_err());
        assert_eq!(a.matmul(&Matrix::zeros(3, 4)).unwrap().cols(), 4);
    }
}
