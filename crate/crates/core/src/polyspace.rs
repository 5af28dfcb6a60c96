//! Polynomial spaces `P_q^d` (total degree below `q`) on scattered nodes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::Functional;
use crate::linalg::{default_tolerance, least_squares_min_norm, rank_decision, Matrix};
use crate::scalar::Real;

/// A finite set of distinct points in `R^d`.
#[derive(Clone, Debug)]
pub struct NodeSet {
    dim: usize,
    points: Vec<Vec<Real>>,
    pub label: String,
}

impl NodeSet {
    pub fn new(dim: usize, points: Vec<Vec<Real>>, label: impl Into<String>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("node set dimension must be >= 1".into()));
        }
        if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| p.len() != dim) {
            return Err(Error::DimensionMismatch(format!("node {i} has {} coordinates, expected {dim}", p.len())));
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(Error::Invalid(format!("nodes {i} and {j} coincide")));
                }
            }
        }
        Ok(NodeSet { dim, points, label: label.into() })
    }

    pub fn from_f64(dim: usize, points: &[Vec<f64>], prec: u32, label: &str) -> Result<Self> {
        let pts = points.iter().map(|p| p.iter().map(|&x| Real::from_f64(x, prec)).collect()).collect();
        NodeSet::new(dim, pts, label)
    }

    /// The plus-shaped stencil: origin, `±e1`, `±e2` (in that order).
    pub fn five_point_star(prec: u32) -> Self {
        let pts = [[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]];
        NodeSet::from_f64(2, &pts.map(|p| p.to_vec()), prec, "five-point star").expect("distinct nodes")
    }

    /// `count` nodes drawn uniformly from `[-1, 1]^dim` with a minimum pairwise
    /// separation of `0.1 · count^{-1/dim}`; coordinates are exact doubles.
    pub fn random(count: usize, dim: usize, seed: u64, prec: u32) -> Result<Self> {
        let sep = 0.1 * (count.max(1) as f64).powf(-1.0 / dim.max(1) as f64);
        NodeSet::random_with_separation(count, dim, seed, sep, prec)
    }

    pub fn random_with_separation(count: usize, dim: usize, seed: u64, min_sep: f64, prec: u32) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("node set dimension must be >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pts: Vec<Vec<f64>> = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while pts.len() < count {
            attempts += 1;
            if attempts > 10_000 * count.max(1) {
                return Err(Error::Invalid(format!(
                    "cannot place {count} nodes in [-1,1]^{dim} with separation {min_sep}"
                )));
            }
            let p: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let ok = pts.iter().all(|q| {
                let d2: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
                d2.sqrt() >= min_sep
            });
            if ok {
                pts.push(p);
            }
        }
        NodeSet::from_f64(dim, &pts, prec, &format!("random n={count} d={dim} seed={seed}"))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<Real>] {
        &self.points
    }

    pub fn point(&self, j: usize) -> &[Real] {
        &self.points[j]
    }

    pub fn prec(&self) -> u32 {
        self.points.iter().flatten().map(Real::prec).min().unwrap_or(crate::scalar::MIN_PRECISION)
    }

    /// Same nodes rounded or widened to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> NodeSet {
        NodeSet {
            dim: self.dim,
            points: self.points.iter().map(|p| p.iter().map(|x| x.with_prec(prec)).collect()).collect(),
            label: self.label.clone(),
        }
    }

    /// The node set `hX`.
    pub fn scaled(&self, h: &Real) -> NodeSet {
        NodeSet {
            dim: self.dim,
            points: self.points.iter().map(|p| p.iter().map(|x| x * h).collect()).collect(),
            label: self.label.clone(),
        }
    }

    /// Index of the node at the origin, if any.
    pub fn origin_index(&self) -> Option<usize> {
        self.points.iter().position(|p| p.iter().all(Real::is_zero))
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.iter().map(Real::to_f64).collect()).collect()
    }
}

/// `dim P_q^d = C(q+d-1, d)`; zero for `q = 0`.
pub fn dimension(q: usize, d: usize) -> usize {
    if q == 0 {
        return 0;
    }
    // C(q+d-1, d) computed incrementally, exact at every step.
    let mut c: u128 = 1;
    for i in 1..=d as u128 {
        c = c * (q as u128 - 1 + i) / i;
    }
    c as usize
}

/// Monomials `x^α` with `|α| < q` in graded order; within one degree the
/// exponent of `x_1` descends (`x²`, `xy`, `y²`, …).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialBasis {
    pub dim: usize,
    pub order: usize,
    pub exponents: Vec<Vec<u32>>,
}

fn exponents_of_degree(d: usize, deg: u32) -> Vec<Vec<u32>> {
    if d == 1 {
        return vec![vec![deg]];
    }
    let mut out = Vec::new();
    for first in (0..=deg).rev() {
        for mut rest in exponents_of_degree(d - 1, deg - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl MonomialBasis {
    pub fn new(order: usize, dim: usize) -> Self {
        let exponents = (0..order as u32).flat_map(|deg| exponents_of_degree(dim, deg)).collect();
        MonomialBasis { dim, order, exponents }
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }
}

/// `x^α` at a point.
pub fn monomial(alpha: &[u32], x: &[Real]) -> Real {
    let prec = x.iter().map(Real::prec).min().unwrap_or(crate::scalar::MIN_PRECISION);
    let mut v = Real::one(prec);
    for (xi, &a) in x.iter().zip(alpha) {
        if a > 0 {
            v *= xi.powi(i64::from(a));
        }
    }
    v
}

/// `Q x M` matrix with entries `p_k(x_j)`.
pub fn value_matrix(basis: &MonomialBasis, nodes: &NodeSet) -> Result<Matrix> {
    if basis.dim != nodes.dim() {
        return Err(Error::DimensionMismatch(format!(
            "basis in {} dimensions, nodes in {}",
            basis.dim,
            nodes.dim()
        )));
    }
    Ok(Matrix::from_fn(basis.len(), nodes.len(), |k, j| monomial(&basis.exponents[k], nodes.point(j))))
}

/// Largest `q` such that values on `X` determine every polynomial in `P_q^d`.
pub fn reproduction_order(nodes: &NodeSet, tolerance: Option<f64>) -> Result<usize> {
    if nodes.is_empty() {
        return Ok(0);
    }
    let tol = tolerance.unwrap_or_else(|| default_tolerance(nodes.prec()));
    let mut best = 0;
    let mut q = 1;
    while dimension(q, nodes.dim()) <= nodes.len() {
        let a = value_matrix(&MonomialBasis::new(q, nodes.dim()), nodes)?;
        if rank_decision(&a, Some(tol))?.numerical_rank < a.rows() {
            break;
        }
        best = q;
        q += 1;
    }
    Ok(best)
}

/// Diagnostics for one order of the exactness search.
#[derive(Clone, Debug, Serialize)]
pub struct OrderDiagnostic {
    pub q: usize,
    pub consistent: bool,
    pub residual: f64,
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QmaxSearch {
    /// Largest consistent order found before the cap.
    pub qmax: usize,
    pub cap_reached: bool,
    pub ladder: Vec<OrderDiagnostic>,
}

/// Right-hand side `λ(p_k)` of the exactness system.
pub fn functional_on_basis(lambda: &Functional, basis: &MonomialBasis, prec: u32) -> Vec<Real> {
    basis.exponents.iter().map(|a| Real::from_i64(lambda.apply_to_monomial(a), prec)).collect()
}

/// Monotone search for the largest exactness order with full diagnostics.
pub fn qmax_search(lambda: &Functional, nodes: &NodeSet, tolerance: Option<f64>, cap: usize) -> Result<QmaxSearch> {
    lambda.check_dim(nodes.dim())?;
    if cap == 0 {
        return Err(Error::Invalid("qmax cap must be >= 1".into()));
    }
    let prec = nodes.prec();
    let tol = tolerance.unwrap_or_else(|| default_tolerance(prec));
    let mut ladder = Vec::new();
    let mut best = 0;
    for q in 1..=cap {
        let basis = MonomialBasis::new(q, nodes.dim());
        let a = value_matrix(&basis, nodes)?;
        let b = functional_on_basis(lambda, &basis, prec);
        let ls = least_squares_min_norm(&a, &b, Some(tol))?;
        let consistent = ls.residual <= tol;
        ladder.push(OrderDiagnostic {
            q,
            consistent,
            residual: ls.residual,
            rank: ls.rank.numerical_rank,
            singular_values: ls.rank.singular_values.iter().map(Real::to_f64).collect(),
        });
        if !consistent {
            return Ok(QmaxSearch { qmax: best, cap_reached: false, ladder });
        }
        best = q;
    }
    Ok(QmaxSearch { qmax: best, cap_reached: true, ladder })
}

/// Largest polynomial exactness order attainable by weights on `X`.
pub fn qmax(lambda: &Functional, nodes: &NodeSet, tolerance: Option<f64>, cap: usize) -> Result<usize> {
    let search = qmax_search(lambda, nodes, tolerance, cap)?;
    if search.cap_reached {
        return Err(Error::CapReached { cap });
    }
    Ok(search.qmax)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(dimension(4, 2), 10);
        assert_eq!(dimension(1, 7), 1);
        assert_eq!(dimension(7, 2), 28);
        assert_eq!(dimension(3, 3), 10);
    }

    #[test]
    fn graded_order() {
        let b = MonomialBasis::new(3, 2);
        assert_eq!(b.exponents, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(MonomialBasis::new(4, 3).len(), dimension(4, 3));
    }

    #[test]
    fn star_value_matrix_row() {
        let x = NodeSet::five_point_star(64);
        let a = value_matrix(&MonomialBasis::new(3, 2), &x).unwrap();
        assert_eq!((a.rows(), a.cols()), (6, 5));
        assert_eq!(a.row(3).iter().map(Real::to_f64).collect::<Vec<_>>(), vec![0.0, 1.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn single_node_value_column() {
        let x = NodeSet::from_f64(1, &[vec![0.0]], 64, "origin").unwrap();
        let a = value_matrix(&MonomialBasis::new(2, 1), &x).unwrap();
        assert_eq!(a.col(0).iter().map(Real::to_f64).collect::<Vec<_>>(), vec![1.0, 0.0]);
    }

    #[test]
    fn reproduction_orders() {
        let single = NodeSet::from_f64(2, &[vec![0.3, 0.1]], 128, "one").unwrap();
        assert_eq!(reproduction_order(&single, None).unwrap(), 1);
        assert_eq!(reproduction_order(&NodeSet::five_point_star(128), None).unwrap(), 2);
    }

    #[test]
    fn star_qmax_for_laplacian() {
        let x = NodeSet::five_point_star(256);
        assert_eq!(qmax(&Functional::Laplacian, &x, None, 12).unwrap(), 4);
    }

    #[test]
    fn nodal_functional_hits_cap() {
        let x = NodeSet::from_f64(2, &[vec![0.0, 0.0]], 128, "origin").unwrap();
        assert!(matches!(qmax(&Functional::PointValue, &x, None, 6), Err(Error::CapReached { cap: 6 })));
    }

    #[test]
    fn duplicate_nodes_rejected() {
        assert!(NodeSet::from_f64(1, &[vec![0.5], vec![0.5]], 64, "dup").is_err());
    }

    #[test]
    fn random_nodes_are_reproducible() {
        let a = NodeSet::random(18, 2, 7, 128).unwrap();
        let b = NodeSet::random(18, 2, 7, 128).unwrap();
        assert_eq!(a.to_f64(), b.to_f64());
        assert!(a.to_f64().iter().flatten().all(|v| v.abs() <= 1.0));
    }
}
