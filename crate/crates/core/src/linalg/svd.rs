//! One-sided (Hestenes) Jacobi SVD.

use super::{default_tolerance, Matrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Thin SVD `A = U diag(sigma) Vᵀ` with `k = min(rows, cols)` singular
/// values in descending order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: Matrix,
    pub sigma: Vec<Real>,
    pub v: Matrix,
}

#[derive(Clone, Debug)]
pub struct RankDecision {
    pub numerical_rank: usize,
    pub singular_values: Vec<Real>,
    /// Relative to the largest singular value.
    pub tolerance: f64,
}

impl RankDecision {
    pub fn from_singular_values(singular_values: Vec<Real>, tolerance: f64) -> Self {
        let numerical_rank = match singular_values.first() {
            Some(top) if !top.is_zero() => {
                let cut = top * tolerance;
                singular_values.iter().filter(|s| **s > cut).count()
            }
            _ => 0,
        };
        RankDecision { numerical_rank, singular_values, tolerance }
    }
}

/// Orthogonalizes the columns of `work` (m x n, m >= n) in place, applying the
/// same rotations to `v`. Returns the number of sweeps used.
fn jacobi_sweeps(work: &mut [Vec<Real>], v: &mut [Vec<Real>], prec: u32) -> Result<usize> {
    let n = work.len();
    let eps = Real::one(prec).mul_pow2(-(prec as i32) + 8);
    // Columns below this squared norm are rounding noise; rotating them
    // against each other never settles.
    let total: Vec<Real> = work.iter().map(|c| Real::dot(c, c, prec)).collect();
    let noise = Real::sum_of(total.iter(), prec).mul_pow2(-2 * (prec as i32) + 16);
    for sweep in 1..=MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = Real::dot(&work[p], &work[p], prec);
                let beta = Real::dot(&work[q], &work[q], prec);
                let gamma = Real::dot(&work[p], &work[q], prec);
                if gamma.is_zero() || alpha <= noise || beta <= noise {
                    continue;
                }
                if gamma.abs() <= &eps * (&alpha * &beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (&beta - &alpha) / (&gamma * 2);
                let root = (&zeta * &zeta + 1i64).sqrt();
                let t = if zeta.is_negative() {
                    -(Real::one(prec) / (zeta.abs() + root))
                } else {
                    Real::one(prec) / (zeta.abs() + root)
                };
                let c = Real::one(prec) / (&t * &t + 1i64).sqrt();
                let s = &c * &t;
                rotate(work, p, q, &c, &s);
                rotate(v, p, q, &c, &s);
            }
        }
        if !rotated {
            return Ok(sweep);
        }
    }
    Err(Error::NonConvergence { routine: "jacobi svd", iterations: MAX_SWEEPS })
}

fn rotate(cols: &mut [Vec<Real>], p: usize, q: usize, c: &Real, s: &Real) {
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let nx = c * &*x - s * &*y;
        let ny = s * &*x + c * &*y;
        *x = nx;
        *y = ny;
    }
}

/// Completes `cols` (orthonormal or zero columns of length m) so that every
/// zero column is replaced by a unit vector orthogonal to all others.
fn complete_orthonormal(cols: &mut [Vec<Real>], valid: &[bool], prec: u32) {
    let m = cols.first().map_or(0, Vec::len);
    let mut basis: Vec<Vec<Real>> = cols.iter().zip(valid).filter(|(_, &ok)| ok).map(|(c, _)| c.clone()).collect();
    let mut candidate = 0usize;
    for (j, ok) in valid.iter().enumerate() {
        if *ok {
            continue;
        }
        while candidate < m {
            let mut e = vec![Real::zero(prec); m];
            e[candidate] = Real::one(prec);
            candidate += 1;
            // Two passes of Gram-Schmidt for stability.
            for _ in 0..2 {
                for b in &basis {
                    let proj = Real::dot(b, &e, prec);
                    for (ei, bi) in e.iter_mut().zip(b) {
                        *ei -= &proj * bi;
                    }
                }
            }
            let norm = Real::dot(&e, &e, prec).sqrt();
            if norm > 0.5 {
                let unit: Vec<Real> = e.iter().map(|x| x / &norm).collect();
                basis.push(unit.clone());
                cols[j] = unit;
                break;
            }
        }
    }
}

/// Thin singular value decomposition by one-sided Jacobi rotations.
pub fn svd(a: &Matrix) -> Result<Svd> {
    if a.rows() < a.cols() {
        let t = svd(&a.transpose())?;
        return Ok(Svd { u: t.v, sigma: t.sigma, v: t.u });
    }
    let (m, n) = (a.rows(), a.cols());
    let prec = a.prec();
    if a.data_iter().any(|x| !x.is_finite()) {
        return Err(Error::Invalid("non-finite matrix entry".into()));
    }
    let mut work: Vec<Vec<Real>> = (0..n).map(|j| a.col(j)).collect();
    let mut v: Vec<Vec<Real>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { Real::one(prec) } else { Real::zero(prec) }).collect())
        .collect();
    jacobi_sweeps(&mut work, &mut v, prec)?;

    let mut order: Vec<(usize, Real)> =
        work.iter().enumerate().map(|(j, c)| (j, Real::dot(c, c, prec).sqrt())).collect();
    order.sort_by(|x, y| y.1.partial_cmp(&x.1).expect("finite singular values"));

    let mut u_cols = Vec::with_capacity(n);
    let mut valid = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    let mut v_cols = Vec::with_capacity(n);
    for (j, s) in &order {
        if s.is_zero() {
            u_cols.push(vec![Real::zero(prec); m]);
            valid.push(false);
        } else {
            u_cols.push(work[*j].iter().map(|x| x / s).collect());
            valid.push(true);
        }
        sigma.push(s.clone());
        v_cols.push(v[*j].clone());
    }
    complete_orthonormal(&mut u_cols, &valid, prec);
    let u = Matrix::from_fn(m, n, |i, j| u_cols[j][i].clone());
    let v = Matrix::from_fn(n, n, |i, j| v_cols[j][i].clone());
    Ok(Svd { u, sigma, v })
}

/// Rank decision from singular values at relative `tolerance`
/// (default [`default_tolerance`] when `None`).
pub fn rank_decision(a: &Matrix, tolerance: Option<f64>) -> Result<RankDecision> {
    let tol = tolerance.unwrap_or_else(|| default_tolerance(a.prec()));
    let s = svd(a)?;
    Ok(RankDecision::from_singular_values(s.sigma, tol))
}

/// Orthonormal basis of the null space (columns, `cols x nullity`).
pub fn null_space(a: &Matrix, tolerance: Option<f64>) -> Result<Matrix> {
    let prec = a.prec();
    let n = a.cols();
    // Pad to at least square so the right singular vectors span all of R^n.
    let padded = if a.rows() < n {
        Matrix::from_fn(n, n, |i, j| if i < a.rows() { a[(i, j)].clone() } else { Real::zero(prec) })
    } else {
        a.clone()
    };
    let s = svd(&padded)?;
    let decision = RankDecision::from_singular_values(s.sigma.clone(), tolerance.unwrap_or_else(|| default_tolerance(prec)));
    let rank = decision.numerical_rank;
    Ok(Matrix::from_fn(n, n - rank, |i, j| s.v[(i, rank + j)].clone()))
}

impl Matrix {
    pub(crate) fn data_iter(&self) -> impl Iterator<Item = &Real> {
        (0..self.rows()).flat_map(move |i| self.row(i).iter())
    }
}
