//! Linear solves: minimum-norm least squares, full-pivot LU, Cholesky and
//! the constrained (saddle-point) kernel system.

use super::svd::{svd, RankDecision};
use super::{default_tolerance, max_abs, Matrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Minimum-norm least-squares solution together with its diagnostics.
#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub x: Vec<Real>,
    /// `‖Ax - b‖_max / max(‖b‖_max, 1)`.
    pub residual: f64,
    pub rank: RankDecision,
}

fn relative_residual(a: &Matrix, x: &[Real], b: &[Real]) -> Result<f64> {
    let ax = a.mul_vec(x)?;
    let prec = a.prec();
    let diff: Vec<Real> = ax.iter().zip(b).map(|(p, q)| p - q).collect();
    let num = max_abs(&diff).unwrap_or_else(|| Real::zero(prec));
    let scale = max_abs(b).map_or(1.0, |m| m.to_f64().max(1.0));
    Ok(num.to_f64() / scale)
}

/// Pseudoinverse solution `x = A⁺ b` using singular values above the relative
/// `tolerance`; never fails on inconsistency, the residual is reported.
pub fn least_squares_min_norm(a: &Matrix, b: &[Real], tolerance: Option<f64>) -> Result<LeastSquares> {
    if a.rows() != b.len() {
        return Err(Error::DimensionMismatch(format!("{} rows vs rhs of length {}", a.rows(), b.len())));
    }
    let prec = a.prec();
    let tol = tolerance.unwrap_or_else(|| default_tolerance(prec));
    let s = svd(a)?;
    let rank = RankDecision::from_singular_values(s.sigma.clone(), tol);
    let mut x = vec![Real::zero(prec); a.cols()];
    for i in 0..rank.numerical_rank {
        let ui = s.u.col(i);
        let coeff = Real::dot(&ui, b, prec) / &s.sigma[i];
        for (k, xk) in x.iter_mut().enumerate() {
            *xk += &coeff * &s.v[(k, i)];
        }
    }
    let residual = relative_residual(a, &x, b)?;
    Ok(LeastSquares { x, residual, rank })
}

/// Minimum-Euclidean-norm solution of a consistent system `Ax = b`.
pub fn min_norm_solve(a: &Matrix, b: &[Real]) -> Result<Vec<Real>> {
    let tol = default_tolerance(a.prec());
    let ls = least_squares_min_norm(a, b, Some(tol))?;
    if ls.residual > tol {
        return Err(Error::Inconsistent { residual: ls.residual });
    }
    Ok(ls.x)
}

/// Gaussian elimination with full (rook-free, complete) pivoting.
pub fn lu_solve(a: &Matrix, b: &[Real]) -> Result<Vec<Real>> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return Err(Error::DimensionMismatch(format!("lu_solve on {}x{} with rhs {}", n, a.cols(), b.len())));
    }
    let prec = a.prec();
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let mut col_perm: Vec<usize> = (0..n).collect();
    let scale = a.max_abs();
    if scale.is_zero() && n > 0 {
        return Err(Error::Singular("lu_solve"));
    }
    let tiny = &scale * Real::one(prec).mul_pow2(-(prec as i32) + 8);
    for k in 0..n {
        let (mut pi, mut pj) = (k, k);
        let mut best = Real::zero(prec);
        for i in k..n {
            for j in k..n {
                let v = m[(i, j)].abs();
                if v > best {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        if best <= tiny {
            return Err(Error::Singular("lu_solve"));
        }
        if pi != k {
            for j in 0..n {
                let tmp = m[(k, j)].clone();
                m[(k, j)] = m[(pi, j)].clone();
                m[(pi, j)] = tmp;
            }
            rhs.swap(k, pi);
        }
        if pj != k {
            for i in 0..n {
                let tmp = m[(i, k)].clone();
                m[(i, k)] = m[(i, pj)].clone();
                m[(i, pj)] = tmp;
            }
            col_perm.swap(k, pj);
        }
        let pivot = m[(k, k)].clone();
        for i in k + 1..n {
            let factor = &m[(i, k)] / &pivot;
            if factor.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let upd = &factor * &m[(k, j)];
                m[(i, j)] -= upd;
            }
            m[(i, k)] = Real::zero(prec);
            let upd = &factor * &rhs[k];
            rhs[i] -= upd;
        }
    }
    let mut y = vec![Real::zero(prec); n];
    for k in (0..n).rev() {
        let mut acc = rhs[k].clone();
        for j in k + 1..n {
            acc -= &m[(k, j)] * &y[j];
        }
        y[k] = acc / &m[(k, k)];
    }
    let mut x = vec![Real::zero(prec); n];
    for (k, &p) in col_perm.iter().enumerate() {
        x[p] = y[k].clone();
    }
    Ok(x)
}

#[derive(Clone, Debug)]
pub struct CholeskySolution {
    pub x: Vec<Real>,
    /// `log2` of the condition estimate `(max L_ii / min L_ii)^2`.
    pub condition_bits: f64,
}

/// Solves a symmetric positive definite system by Cholesky factorization.
pub fn cholesky_solve(a: &Matrix, b: &[Real]) -> Result<CholeskySolution> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return Err(Error::DimensionMismatch(format!("cholesky on {}x{} with rhs {}", n, a.cols(), b.len())));
    }
    let prec = a.prec();
    let mut l = Matrix::zeros(n, n, prec);
    for j in 0..n {
        let mut d = a[(j, j)].clone();
        for k in 0..j {
            d -= &l[(j, k)] * &l[(j, k)];
        }
        if !d.is_positive() {
            return Err(Error::Singular("cholesky"));
        }
        let djj = d.sqrt();
        for i in j + 1..n {
            let mut s = a[(i, j)].clone();
            for k in 0..j {
                s -= &l[(i, k)] * &l[(j, k)];
            }
            l[(i, j)] = s / &djj;
        }
        l[(j, j)] = djj;
    }
    let mut y = vec![Real::zero(prec); n];
    for i in 0..n {
        let mut acc = b[i].clone();
        for k in 0..i {
            acc -= &l[(i, k)] * &y[k];
        }
        y[i] = acc / &l[(i, i)];
    }
    let mut x = vec![Real::zero(prec); n];
    for i in (0..n).rev() {
        let mut acc = y[i].clone();
        for k in i + 1..n {
            acc -= &l[(k, i)] * &x[k];
        }
        x[i] = acc / &l[(i, i)];
    }
    let diag: Vec<f64> = (0..n).map(|i| l[(i, i)].log2_abs()).collect();
    let hi = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition_bits = if n == 0 { 0.0 } else { 2.0 * (hi - lo) };
    Ok(CholeskySolution { x, condition_bits })
}

#[derive(Clone, Debug)]
pub struct SaddleSolution {
    pub weights: Vec<Real>,
    pub multipliers: Vec<Real>,
    /// Numerical rank of the constraint matrix.
    pub constraint_rank: usize,
}

/// Solves `A a + Pᵀ μ = b`, `P a = c` for symmetric `A` (M x M) and `P` (Q x M).
///
/// Rank-deficient but consistent constraints are accepted: `P` is compressed
/// to its numerical row space first, so the block system stays nonsingular.
pub fn solve_saddle(a: &Matrix, p: &Matrix, b: &[Real], c: &[Real]) -> Result<SaddleSolution> {
    let m = a.rows();
    if a.cols() != m || p.cols() != m || b.len() != m || p.rows() != c.len() {
        return Err(Error::DimensionMismatch(format!(
            "saddle system with A {}x{}, P {}x{}, b {}, c {}",
            a.rows(),
            a.cols(),
            p.rows(),
            p.cols(),
            b.len(),
            c.len()
        )));
    }
    let prec = a.prec().min(p.prec());
    let tol = default_tolerance(prec);
    let s = svd(p)?;
    let decision = RankDecision::from_singular_values(s.sigma.clone(), tol);
    let r = decision.numerical_rank;
    if r == 0 {
        return Err(Error::RankDeficientConstraints("constraint matrix is numerically zero".into()));
    }
    // Compressed constraints C a = d with C = V_rᵀ, d = Σ_r⁻¹ U_rᵀ c.
    let d: Vec<Real> = (0..r).map(|i| Real::dot(&s.u.col(i), c, prec) / &s.sigma[i]).collect();
    let mut reach = vec![Real::zero(prec); m];
    for (i, di) in d.iter().enumerate() {
        for (k, v) in reach.iter_mut().enumerate() {
            *v += di * &s.v[(k, i)];
        }
    }
    let resid = relative_residual(p, &reach, c)?;
    if resid > tol {
        return Err(Error::RankDeficientConstraints(format!(
            "constraints have rank {r} of {} and are inconsistent (residual {resid:.3e})",
            p.rows()
        )));
    }
    let n = m + r;
    let block = Matrix::from_fn(n, n, |i, j| match (i < m, j < m) {
        (true, true) => a[(i, j)].clone(),
        (true, false) => s.v[(i, j - m)].clone(),
        (false, true) => s.v[(j, i - m)].clone(),
        (false, false) => Real::zero(prec),
    });
    let mut rhs: Vec<Real> = b.to_vec();
    rhs.extend(d);
    let sol = lu_solve(&block, &rhs)?;
    let weights = sol[..m].to_vec();
    let mu_r = &sol[m..];
    let multipliers: Vec<Real> = (0..p.rows())
        .map(|q| {
            let terms: Vec<Real> = (0..r).map(|i| &s.u[(q, i)] * &mu_r[i] / &s.sigma[i]).collect();
            Real::sum_of(terms.iter(), prec)
        })
        .collect();
    Ok(SaddleSolution { weights, multipliers, constraint_rank: r })
}
