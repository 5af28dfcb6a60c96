//! Dense extended-precision linear algebra.
//!
//! Matrices are small (tens of rows) but carried at hundreds of bits, so the
//! algorithms favor accuracy and simplicity: one-sided Jacobi SVD, full
//! pivoting LU, and Cholesky with a pivot-ratio condition estimate.

mod solve;
mod svd;

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use solve::{
    cholesky_solve, least_squares_min_norm, lu_solve, min_norm_solve, solve_saddle, CholeskySolution,
    LeastSquares, SaddleSolution,
};
pub use svd::{null_space, rank_decision, svd, RankDecision, Svd};

/// Relative rank tolerance for a working precision: `1e-12` at double
/// precision, `2^{-prec/2}` above.
pub fn default_tolerance(prec: u32) -> f64 {
    if prec <= 53 {
        1e-12
    } else {
        (-(prec as f64) / 2.0).exp2()
    }
}

#[derive(Clone)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Real>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        Matrix { rows, cols, data: vec![Real::zero(prec); rows * cols] }
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        let mut m = Matrix::zeros(n, n, prec);
        for i in 0..n {
            m[(i, i)] = Real::one(prec);
        }
        m
    }

    /// Builds from row vectors; all rows must share one length.
    pub fn from_rows(rows: Vec<Vec<Real>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix { rows: n_rows, cols: n_cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_f64(rows: &[Vec<f64>], prec: u32) -> Result<Self> {
        Matrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&v| Real::from_f64(v, prec)).collect()).collect(),
        )
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Real) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Working precision, taken as the smallest entry precision.
    pub fn prec(&self) -> u32 {
        self.data.iter().map(Real::prec).min().unwrap_or(crate::scalar::MIN_PRECISION)
    }

    pub fn row(&self, i: usize) -> &[Real] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Real> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let prec = self.prec().min(other.prec());
        let other_t = other.transpose();
        Ok(Matrix::from_fn(self.rows, other.cols, |i, j| Real::dot(self.row(i), other_t.row(j), prec)))
    }

    pub fn mul_vec(&self, x: &[Real]) -> Result<Vec<Real>> {
        if self.cols != x.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        let prec = self.prec();
        Ok((0..self.rows).map(|i| Real::dot(self.row(i), x, prec)).collect())
    }

    pub fn max_abs(&self) -> Real {
        max_abs(&self.data).unwrap_or_else(|| Real::zero(crate::scalar::MIN_PRECISION))
    }

    /// Same entries rounded or widened to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v.with_prec(prec)).collect() }
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(Real::to_f64).collect()).collect()
    }
}

/// Largest absolute entry, `None` for an empty slice.
pub fn max_abs(v: &[Real]) -> Option<Real> {
    v.iter().map(Real::abs).reduce(Real::max)
}

impl Index<(usize, usize)> for Matrix {
    type Output = Real;
    fn index(&self, (i, j): (usize, usize)) -> &Real {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Real {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string_digits(8)).collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_and_transpose() {
        let a = Matrix::from_f64(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]], 64).unwrap();
        let ata = a.transpose().matmul(&a).unwrap();
        assert_eq!(ata.to_f64_rows(), vec![vec![35.0, 44.0], vec![44.0, 56.0]]);
        assert!(a.matmul(&a).is_err());
    }

    #[test]
    fn tolerance_tiers() {
        assert_eq!(default_tolerance(53), 1e-12);
        assert_eq!(default_tolerance(256), 2f64.powi(-128));
    }
}
