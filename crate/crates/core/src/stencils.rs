//! Stencil builders: minimum-norm exact, Lagrange, polyharmonic-optimal and
//! Sobolev-optimal weights.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{apply_to_kernel_slice, ErrorFunctional, Functional};
use crate::kernels::{Family, Kernel, KernelSpec};
use crate::linalg::{
    cholesky_solve, default_tolerance, least_squares_min_norm, lu_solve, solve_saddle, Matrix,
};
use crate::polyspace::{functional_on_basis, monomial, reproduction_order, value_matrix, MonomialBasis, NodeSet};
use crate::scalar::Real;

/// How a stencil's weights were obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    MinNorm,
    Lagrange,
    /// Optimal in `BL_{m,d}` among stencils exact of the kernel's CPD order.
    Polyharmonic { m: f64 },
    /// Optimal in the native space of `space` for the nodes `hX`.
    SobolevOptimal { space: KernelSpec, h: String },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::MinNorm => "min_norm",
            Method::Lagrange => "lagrange",
            Method::Polyharmonic { .. } => "polyharmonic",
            Method::SobolevOptimal { .. } => "sobolev_optimal",
        }
    }
}

/// Nodal approximation `Σ a_j u(x_j)` of a functional.
///
/// For non-scalable methods the weights are stored renormalized as
/// `a*(h) h^s` on the unscaled nodes, so the error functional at the build
/// scale `h` uses exactly the optimal weights on `hX`.
#[derive(Clone, Debug)]
pub struct Stencil {
    pub lambda: Functional,
    pub nodes: NodeSet,
    pub weights: Vec<Real>,
    pub exactness_order: usize,
    pub method: Method,
    pub scalable: bool,
    /// Scale the weights were computed for; 1 for scalable stencils.
    pub scale: Real,
    pub warnings: Vec<String>,
}

impl Stencil {
    pub fn prec(&self) -> u32 {
        self.weights.iter().map(Real::prec).min().unwrap_or(self.nodes.prec())
    }

    /// Error functional `λ - λ_{a h^{-s}, hX}`.
    ///
    /// Non-scalable stencils only exist at their build scale.
    pub fn error_functional(&self, h: &Real) -> Result<ErrorFunctional> {
        if !self.scalable && *h != self.scale {
            return Err(Error::Invalid(format!(
                "{} weights were built for h = {} and do not rescale",
                self.method.name(),
                self.scale.to_string_digits(12)
            )));
        }
        ErrorFunctional::new(self.lambda.clone(), self.nodes.clone(), self.weights.clone(), h.clone())
    }

    /// Error functional at the build scale.
    pub fn native_error_functional(&self) -> Result<ErrorFunctional> {
        self.error_functional(&self.scale.clone())
    }

    /// `max_k |λ(p_k) - Σ a_j p_k(x_j)|` over `P_q^d`, relative to the weight scale.
    pub fn exactness_residual(&self, q: usize) -> Result<f64> {
        let prec = self.prec();
        let basis = MonomialBasis::new(q, self.nodes.dim());
        let a = value_matrix(&basis, &self.nodes)?;
        let b = functional_on_basis(&self.lambda, &basis, prec);
        let ax = a.mul_vec(&self.weights)?;
        let scale = self.weights.iter().map(|w| w.abs().to_f64()).fold(1.0, f64::max);
        Ok(ax.iter().zip(&b).map(|(p, q)| (p - q).abs().to_f64()).fold(0.0, f64::max) / scale)
    }

    pub fn to_json(&self) -> StencilFile {
        StencilFile {
            lambda: self.lambda.clone(),
            dim: self.nodes.dim(),
            precision: self.prec(),
            nodes: self
                .nodes
                .points()
                .iter()
                .map(|p| p.iter().map(Real::to_decimal_string).collect())
                .collect(),
            weights: self.weights.iter().map(Real::to_decimal_string).collect(),
            q: self.exactness_order,
            method: self.method.clone(),
            scalable: self.scalable,
            scale: self.scale.to_decimal_string(),
            warnings: self.warnings.clone(),
        }
    }

    pub fn from_json(file: &StencilFile) -> Result<Stencil> {
        let prec = file.precision;
        let parse = |s: &String| Real::parse(s, prec);
        let points = file
            .nodes
            .iter()
            .map(|p| p.iter().map(parse).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let nodes = NodeSet::new(file.dim, points, "stencil file")?;
        let weights = file.weights.iter().map(parse).collect::<Result<Vec<_>>>()?;
        if weights.len() != nodes.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} nodes",
                weights.len(),
                nodes.len()
            )));
        }
        file.lambda.check_dim(file.dim)?;
        Ok(Stencil {
            lambda: file.lambda.clone(),
            nodes,
            weights,
            exactness_order: file.q,
            method: file.method.clone(),
            scalable: file.scalable,
            scale: parse(&file.scale)?,
            warnings: file.warnings.clone(),
        })
    }
}

/// On-disk form of a [`Stencil`]; reals are decimal strings at full precision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StencilFile {
    pub lambda: Functional,
    pub dim: usize,
    pub precision: u32,
    pub nodes: Vec<Vec<String>>,
    pub weights: Vec<String>,
    pub q: usize,
    pub method: Method,
    pub scalable: bool,
    #[serde(default = "one_string")]
    pub scale: String,
    #[serde(default)]
    pub warnings: Vec<String>,
}

fn one_string() -> String {
    "1".into()
}

fn exactness_system(lambda: &Functional, nodes: &NodeSet, q: usize) -> Result<(Matrix, Vec<Real>)> {
    lambda.check_dim(nodes.dim())?;
    let basis = MonomialBasis::new(q, nodes.dim());
    let a = value_matrix(&basis, nodes)?;
    let b = functional_on_basis(lambda, &basis, nodes.prec());
    Ok((a, b))
}

/// Minimum-Euclidean-norm weights exact on `P_q^d`.
pub fn build_exact(lambda: &Functional, nodes: &NodeSet, q: usize) -> Result<Stencil> {
    let (a, b) = exactness_system(lambda, nodes, q)?;
    let tol = default_tolerance(nodes.prec());
    let ls = least_squares_min_norm(&a, &b, Some(tol))?;
    if ls.residual > tol {
        return Err(Error::InfeasibleOrder { q, residual: ls.residual });
    }
    Ok(Stencil {
        lambda: lambda.clone(),
        nodes: nodes.clone(),
        weights: ls.x,
        exactness_order: q,
        method: Method::MinNorm,
        scalable: true,
        scale: Real::one(nodes.prec()),
        warnings: Vec::new(),
    })
}

/// Greedy column pivoting: indices of `count` columns of `a` spanning its
/// column space, or `None` if fewer independent columns exist.
fn pivot_columns(a: &Matrix, count: usize, tol: f64) -> Option<Vec<usize>> {
    let prec = a.prec();
    let mut cols: Vec<Vec<Real>> = (0..a.cols()).map(|j| a.col(j)).collect();
    let norm2 = |v: &[Real]| Real::dot(v, v, prec);
    let scale = cols.iter().map(|c| norm2(c).to_f64()).fold(0.0, f64::max).sqrt().max(1e-300);
    let mut chosen = Vec::with_capacity(count);
    for _ in 0..count {
        let (best, best_norm) = (0..cols.len())
            .filter(|j| !chosen.contains(j))
            .map(|j| (j, norm2(&cols[j]).sqrt()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).expect("finite norms"))?;
        if best_norm.to_f64() <= tol * scale {
            return None;
        }
        chosen.push(best);
        let q: Vec<Real> = cols[best].iter().map(|v| v / &best_norm).collect();
        for (j, col) in cols.iter_mut().enumerate() {
            if chosen.contains(&j) {
                continue;
            }
            let proj = Real::dot(&q, col, prec);
            for (c, qi) in col.iter_mut().zip(&q) {
                *c -= &proj * qi;
            }
        }
    }
    Some(chosen)
}

/// Weights `λ(L_j)` for the Lagrange basis of `P_q^d` on a unisolvent subset.
pub fn build_lagrange(lambda: &Functional, nodes: &NodeSet, q: usize) -> Result<Stencil> {
    let (a, b) = exactness_system(lambda, nodes, q)?;
    let available = reproduction_order(nodes, None)?;
    if available < q {
        return Err(Error::InsufficientReproduction { needed: q, available });
    }
    let tol = default_tolerance(nodes.prec());
    let subset = pivot_columns(&a, a.rows(), tol)
        .ok_or(Error::InsufficientReproduction { needed: q, available })?;
    let square = Matrix::from_fn(a.rows(), a.rows(), |i, k| a[(i, subset[k])].clone());
    let local = lu_solve(&square, &b)?;
    let prec = nodes.prec();
    let mut weights = vec![Real::zero(prec); nodes.len()];
    for (k, &j) in subset.iter().enumerate() {
        weights[j] = local[k].clone();
    }
    Ok(Stencil {
        lambda: lambda.clone(),
        nodes: nodes.clone(),
        weights,
        exactness_order: q,
        method: Method::Lagrange,
        scalable: true,
        scale: Real::one(prec),
        warnings: Vec::new(),
    })
}

fn check_continuity(lambda: &Functional, kernel: &Kernel) -> Result<()> {
    let s = lambda.scaling_order() as usize;
    if kernel.family() != Family::Gaussian && !kernel.smooth_to_order(2 * s) {
        return Err(Error::Continuity(format!(
            "{lambda} (order {s}) is not continuous on the {} space with m = {}, d = {}",
            kernel.family(),
            kernel.spec().m,
            kernel.dim()
        )));
    }
    Ok(())
}

/// Kernel matrix `K(‖x_j - x_k‖)` and right-hand side `λ^x K(x, x_j)`.
fn kernel_system(lambda: &Functional, kernel: &Kernel, nodes: &NodeSet) -> Result<(Matrix, Vec<Real>)> {
    let n = nodes.len();
    let prec = nodes.prec().min(kernel.prec());
    let rows: Vec<Vec<Real>> = (0..n)
        .into_par_iter()
        .map(|j| {
            (0..n)
                .map(|k| {
                    if k < j {
                        return Ok(Real::zero(prec));
                    }
                    let sq: Vec<Real> = nodes
                        .point(j)
                        .iter()
                        .zip(nodes.point(k))
                        .map(|(p, q)| {
                            let t = p - q;
                            &t * &t
                        })
                        .collect();
                    kernel.value(&Real::sum_of(sq.iter(), prec).sqrt())
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let a = Matrix::from_fn(n, n, |j, k| if k >= j { rows[j][k].clone() } else { rows[k][j].clone() });
    let b = nodes
        .points()
        .par_iter()
        .map(|x| apply_to_kernel_slice(lambda, kernel, x))
        .collect::<Result<Vec<_>>>()?;
    Ok((a, b))
}

/// `BL_{m,d}`-optimal stencil among those exact on `P_q^d`, `q = ⌊m - d/2⌋ + 1`.
pub fn build_polyharmonic(lambda: &Functional, nodes: &NodeSet, m: f64) -> Result<Stencil> {
    lambda.check_dim(nodes.dim())?;
    let prec = nodes.prec();
    let kernel = Kernel::new(&KernelSpec::polyharmonic(m, nodes.dim()), prec)?;
    check_continuity(lambda, &kernel)?;
    let q = kernel.cpd_order();
    let (p, c) = exactness_system(lambda, nodes, q)?;
    let (a, b) = kernel_system(lambda, &kernel, nodes)?;
    let sol = solve_saddle(&a, &p, &b, &c)?;
    let stencil = Stencil {
        lambda: lambda.clone(),
        nodes: nodes.clone(),
        weights: sol.weights,
        exactness_order: q,
        method: Method::Polyharmonic { m },
        scalable: true,
        scale: Real::one(prec),
        warnings: Vec::new(),
    };
    let residual = stencil.exactness_residual(q)?;
    if residual > default_tolerance(prec) {
        return Err(Error::InfeasibleOrder { q, residual });
    }
    Ok(stencil)
}

/// Optimal recovery weights in the native space of `space` on nodes `hX`.
///
/// `space` is a Matérn (Sobolev) or Gaussian kernel; the Gram system is solved
/// at the node precision.
pub fn build_sobolev_optimal(lambda: &Functional, nodes: &NodeSet, space: &KernelSpec, h: &Real) -> Result<Stencil> {
    lambda.check_dim(nodes.dim())?;
    if space.family == Family::Polyharmonic {
        return Err(Error::Invalid("optimal weights need a positive definite space; use build_polyharmonic".into()));
    }
    if space.d != nodes.dim() {
        return Err(Error::DimensionMismatch(format!("{}-d space for {}-d nodes", space.d, nodes.dim())));
    }
    if !h.is_positive() {
        return Err(Error::Invalid(format!("scale h = {h} must be positive")));
    }
    let prec = nodes.prec().min(h.prec());
    let kernel = Kernel::new(space, prec)?;
    check_continuity(lambda, &kernel)?;
    let scaled = nodes.scaled(h);
    let (a, b) = kernel_system(lambda, &kernel, &scaled)?;
    let mut warnings = Vec::new();
    let optimal = match cholesky_solve(&a, &b) {
        Ok(sol) => {
            if sol.condition_bits > f64::from(prec) / 2.0 {
                let advice = 2 * (sol.condition_bits.ceil() as u32) + 64;
                let msg = format!(
                    "Gram matrix condition ~2^{:.0} uses more than half of {prec} bits; use at least {advice} bits",
                    sol.condition_bits
                );
                log::warn!("{msg}");
                warnings.push(msg);
            }
            sol.x
        }
        Err(Error::Singular(_)) => {
            let msg = format!("Cholesky failed at {prec} bits; fell back to LU, increase precision");
            log::warn!("{msg}");
            warnings.push(msg);
            lu_solve(&a, &b)?
        }
        Err(e) => return Err(e),
    };
    let hs = h.powi(i64::from(lambda.scaling_order()));
    Ok(Stencil {
        lambda: lambda.clone(),
        nodes: nodes.clone(),
        weights: optimal.iter().map(|w| w * &hs).collect(),
        exactness_order: 0,
        method: Method::SobolevOptimal { space: space.clone(), h: h.to_decimal_string() },
        scalable: false,
        scale: h.clone(),
        warnings,
    })
}

/// Error on `x^α` at scale `h`: `λ(x^α) - Σ a_j h^{-s} (h x_j)^α`.
pub fn monomial_error(stencil: &Stencil, alpha: &[u32], h: &Real) -> Real {
    let prec = stencil.prec().min(h.prec());
    let s = i64::from(stencil.lambda.scaling_order());
    let hs = h.powi(-s);
    let parts: Vec<Real> = stencil
        .nodes
        .points()
        .iter()
        .zip(&stencil.weights)
        .map(|(x, a)| {
            let hx: Vec<Real> = x.iter().map(|c| c * h).collect();
            a * &hs * monomial(alpha, &hx)
        })
        .collect();
    Real::from_i64(stencil.lambda.apply_to_monomial(alpha), prec) - Real::sum_of(parts.iter(), prec)
}
