//! Derivative functionals at the origin and their nodal error functionals.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{Family, Kernel};
use crate::linalg::default_tolerance;
use crate::polyspace::{monomial, MonomialBasis, NodeSet};
use crate::scalar::Real;

/// A functional applied at the origin.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "atom", rename_all = "snake_case")]
pub enum Functional {
    /// `u ↦ u(0)`.
    PointValue,
    /// `u ↦ ∂^α u(0)` with `|α| <= 2`.
    Partial { alpha: Vec<u32> },
    /// `u ↦ Δu(0)`.
    Laplacian,
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Functional::PointValue => write!(f, "point value"),
            Functional::Partial { alpha } => write!(f, "partial {alpha:?}"),
            Functional::Laplacian => write!(f, "laplacian"),
        }
    }
}

impl Functional {
    pub fn partial(alpha: &[u32]) -> Self {
        Functional::Partial { alpha: alpha.to_vec() }
    }

    /// Homogeneity `s` with `λ(u(h·)) = h^s λ(u)`.
    pub fn scaling_order(&self) -> u32 {
        match self {
            Functional::PointValue => 0,
            Functional::Partial { alpha } => alpha.iter().sum(),
            Functional::Laplacian => 2,
        }
    }

    /// Validates the functional for use in `d` dimensions.
    pub fn check_dim(&self, d: usize) -> Result<()> {
        match self {
            Functional::Partial { alpha } if alpha.len() != d => Err(Error::DimensionMismatch(format!(
                "partial derivative index {alpha:?} used in {d} dimensions"
            ))),
            Functional::Partial { alpha } if alpha.iter().sum::<u32>() > 2 => Err(Error::Invalid(format!(
                "partial derivatives are supported up to order 2, got {alpha:?}"
            ))),
            _ if d == 0 => Err(Error::Invalid("dimension must be >= 1".into())),
            _ => Ok(()),
        }
    }

    /// The functional as `Σ c · ∂^γ` evaluated at 0.
    pub fn derivative_terms(&self, d: usize) -> Vec<(Vec<u32>, i64)> {
        match self {
            Functional::PointValue => vec![(vec![0; d], 1)],
            Functional::Partial { alpha } => vec![(alpha.clone(), 1)],
            Functional::Laplacian => (0..d)
                .map(|i| {
                    let mut g = vec![0; d];
                    g[i] = 2;
                    (g, 1)
                })
                .collect(),
        }
    }

    /// `λ(x^α)`, an integer in closed form.
    pub fn apply_to_monomial(&self, alpha: &[u32]) -> i64 {
        match self {
            Functional::PointValue => i64::from(alpha.iter().all(|&a| a == 0)),
            Functional::Partial { alpha: beta } => {
                if beta.as_slice() == alpha {
                    alpha.iter().map(|&a| (1..=i64::from(a)).product::<i64>()).product()
                } else {
                    0
                }
            }
            Functional::Laplacian => {
                let pure_square = alpha.iter().filter(|&&a| a == 2).count() == 1
                    && alpha.iter().filter(|&&a| a != 0).count() == 1;
                if pure_square {
                    2
                } else {
                    0
                }
            }
        }
    }
}

/// `λ^x K(x, center)` at `x = 0`.
pub fn apply_to_kernel_slice(lambda: &Functional, kernel: &Kernel, center: &[Real]) -> Result<Real> {
    lambda.check_dim(kernel.dim())?;
    let z: Vec<Real> = center.iter().map(|c| -c).collect();
    kernel.derivative_combination(&lambda.derivative_terms(kernel.dim()), &z)
}

/// `ε_h = λ - Σ_j a_j h^{-s} δ_{h x_j}`.
#[derive(Clone, Debug)]
pub struct ErrorFunctional {
    pub lambda: Functional,
    pub nodes: NodeSet,
    pub weights: Vec<Real>,
    pub h: Real,
}

impl ErrorFunctional {
    pub fn new(lambda: Functional, nodes: NodeSet, weights: Vec<Real>, h: Real) -> Result<Self> {
        lambda.check_dim(nodes.dim())?;
        if weights.len() != nodes.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} nodes",
                weights.len(),
                nodes.len()
            )));
        }
        if !h.is_positive() {
            return Err(Error::Invalid(format!("scale h = {h} must be positive")));
        }
        Ok(ErrorFunctional { lambda, nodes, weights, h })
    }

    /// Same functional and base weights at scale `h`.
    pub fn scale(&self, h: &Real) -> Result<ErrorFunctional> {
        ErrorFunctional::new(self.lambda.clone(), self.nodes.clone(), self.weights.clone(), h.clone())
    }

    /// Multiplies the current scale by `factor`.
    pub fn rescale(&self, factor: &Real) -> Result<ErrorFunctional> {
        self.scale(&(&self.h * factor))
    }

    pub fn dim(&self) -> usize {
        self.nodes.dim()
    }

    pub fn prec(&self) -> u32 {
        self.nodes.prec().min(self.h.prec()).min(self.weights.iter().map(Real::prec).min().unwrap_or(u32::MAX))
    }

    /// Nodes `h x_j`.
    pub fn induced_nodes(&self) -> NodeSet {
        self.nodes.scaled(&self.h)
    }

    /// Weights `a_j h^{-s}`.
    pub fn induced_weights(&self) -> Vec<Real> {
        let factor = self.h.powi(-i64::from(self.lambda.scaling_order()));
        self.weights.iter().map(|a| a * &factor).collect()
    }

    /// Same data at a different working precision.
    pub fn with_prec(&self, prec: u32) -> ErrorFunctional {
        ErrorFunctional {
            lambda: self.lambda.clone(),
            nodes: self.nodes.with_prec(prec),
            weights: self.weights.iter().map(|w| w.with_prec(prec)).collect(),
            h: self.h.with_prec(prec),
        }
    }

    /// Largest relative exactness defect `|ε(p)| / scale` over `P_q^d`.
    pub fn exactness_defect(&self, q: usize) -> f64 {
        let prec = self.prec();
        let basis = MonomialBasis::new(q, self.dim());
        let nodes = self.induced_nodes();
        let weights = self.induced_weights();
        let mut worst = 0.0f64;
        for alpha in &basis.exponents {
            let exact = Real::from_i64(self.lambda.apply_to_monomial(alpha), prec);
            let parts: Vec<Real> = nodes.points().iter().zip(&weights).map(|(x, a)| a * monomial(alpha, x)).collect();
            let scale = parts.iter().map(|p| p.abs().to_f64()).sum::<f64>().max(exact.abs().to_f64()).max(1e-300);
            let approx = Real::sum_of(parts.iter(), prec);
            worst = worst.max((exact - approx).abs().to_f64() / scale);
        }
        worst
    }
}

/// Bilinear value `ε₁^x ε₂^y K(x, y)` with its cancellation diagnostics.
#[derive(Clone, Debug)]
pub struct Pairing {
    pub value: Real,
    /// `log2(max |term| / |value|)`, the bits lost to cancellation.
    pub lost_bits: f64,
    pub terms: usize,
}

fn check_pairing_preconditions(e: &ErrorFunctional, kernel: &Kernel) -> Result<()> {
    if e.dim() != kernel.dim() {
        return Err(Error::DimensionMismatch(format!(
            "functional on {}-d nodes paired with a {}-d kernel",
            e.dim(),
            kernel.dim()
        )));
    }
    let s = e.lambda.scaling_order();
    if kernel.family() != Family::Gaussian && !kernel.smooth_to_order(2 * s as usize) {
        return Err(Error::Continuity(format!(
            "{} (order {s}) needs m - d/2 > {s} for the {} kernel with m = {}, d = {}",
            e.lambda,
            kernel.family(),
            kernel.spec().m,
            kernel.dim()
        )));
    }
    if kernel.family() == Family::Polyharmonic {
        let q = kernel.cpd_order();
        let defect = e.exactness_defect(q);
        if defect > default_tolerance(e.prec()) {
            return Err(Error::ExactnessViolation { order: q });
        }
    }
    Ok(())
}

/// Full bilinear expansion of `ε₁^x ε₂^y K(x, y)`.
pub fn dual_pairing_detailed(e1: &ErrorFunctional, e2: &ErrorFunctional, kernel: &Kernel) -> Result<Pairing> {
    check_pairing_preconditions(e1, kernel)?;
    check_pairing_preconditions(e2, kernel)?;
    let d = kernel.dim();
    let prec = e1.prec().min(e2.prec()).min(kernel.prec());
    let origin = vec![Real::zero(prec); d];
    let terms1 = e1.lambda.derivative_terms(d);
    let terms2 = e2.lambda.derivative_terms(d);
    let x = e1.induced_nodes();
    let a = e1.induced_weights();
    let y = e2.induced_nodes();
    let b = e2.induced_weights();

    let mut parts: Vec<Real> = Vec::with_capacity(1 + x.len() + y.len() + x.len() * y.len());

    // λ₁^x λ₂^y K at x = y = 0: D^{α+β} φ(0) with sign (-1)^{|β|}.
    let combined: Vec<(Vec<u32>, i64)> = terms1
        .iter()
        .flat_map(|(al, ca)| {
            terms2.iter().map(move |(be, cb)| {
                let g: Vec<u32> = al.iter().zip(be).map(|(p, q)| p + q).collect();
                let sign = if be.iter().sum::<u32>() % 2 == 1 { -1 } else { 1 };
                (g, ca * cb * sign)
            })
        })
        .collect();
    parts.push(kernel.derivative_combination(&combined, &origin)?);

    // -Σ_k b_k λ₁^x K(x, y_k)
    let cross1: Vec<Real> = y
        .points()
        .par_iter()
        .zip(b.par_iter())
        .map(|(yk, bk)| Ok(-(bk * apply_to_kernel_slice(&e1.lambda, kernel, yk)?)))
        .collect::<Result<_>>()?;
    parts.extend(cross1);
    // -Σ_j a_j λ₂^y K(x_j, y)
    let cross2: Vec<Real> = x
        .points()
        .par_iter()
        .zip(a.par_iter())
        .map(|(xj, aj)| Ok(-(aj * apply_to_kernel_slice(&e2.lambda, kernel, xj)?)))
        .collect::<Result<_>>()?;
    parts.extend(cross2);
    // Σ_j Σ_k a_j b_k K(x_j, y_k)
    let nodal: Vec<Vec<Real>> = x
        .points()
        .par_iter()
        .zip(a.par_iter())
        .map(|(xj, aj)| {
            y.points()
                .iter()
                .zip(&b)
                .map(|(yk, bk)| {
                    let diff: Vec<Real> = xj.iter().zip(yk).map(|(p, q)| p - q).collect();
                    let sq: Vec<Real> = diff.iter().map(|v| v * v).collect();
                    let r = Real::sum_of(sq.iter(), prec).sqrt();
                    Ok(aj * bk * kernel.value(&r)?)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    parts.extend(nodal.into_iter().flatten());

    let value = Real::sum_of(parts.iter(), prec);
    let max_term = parts.iter().map(Real::log2_abs).fold(f64::NEG_INFINITY, f64::max);
    let lost_bits = if value.is_zero() {
        if max_term.is_finite() {
            f64::from(prec)
        } else {
            0.0
        }
    } else {
        (max_term - value.log2_abs()).max(0.0)
    };
    Ok(Pairing { value, lost_bits, terms: parts.len() })
}

/// `ε₁^x ε₂^y K(x, y)`.
pub fn dual_pairing(e1: &ErrorFunctional, e2: &ErrorFunctional, kernel: &Kernel) -> Result<Real> {
    Ok(dual_pairing_detailed(e1, e2, kernel)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelSpec;

    #[test]
    fn monomial_actions() {
        let lap = Functional::Laplacian;
        assert_eq!(lap.apply_to_monomial(&[2, 0]), 2);
        assert_eq!(lap.apply_to_monomial(&[1, 1]), 0);
        assert_eq!(lap.apply_to_monomial(&[0, 0, 2]), 2);
        assert_eq!(Functional::PointValue.apply_to_monomial(&[0, 0]), 1);
        assert_eq!(Functional::PointValue.apply_to_monomial(&[1, 0]), 0);
        assert_eq!(Functional::partial(&[2, 0]).apply_to_monomial(&[2, 0]), 2);
        assert_eq!(Functional::partial(&[1, 1]).apply_to_monomial(&[1, 1]), 1);
        assert_eq!(Functional::partial(&[1, 0]).apply_to_monomial(&[0, 1]), 0);
    }

    #[test]
    fn scaling_orders() {
        assert_eq!(Functional::PointValue.scaling_order(), 0);
        assert_eq!(Functional::partial(&[1, 1]).scaling_order(), 2);
        assert_eq!(Functional::Laplacian.scaling_order(), 2);
    }

    #[test]
    fn config_format() {
        let f: Functional = serde_json::from_str(r#"{"atom":"partial","alpha":[1,0]}"#).unwrap();
        assert_eq!(f, Functional::partial(&[1, 0]));
        let g: Functional = serde_json::from_str(r#"{"atom":"laplacian"}"#).unwrap();
        assert_eq!(g, Functional::Laplacian);
    }

    #[test]
    fn slice_values() {
        let prec = 128;
        let gauss = Kernel::new(&KernelSpec::gaussian(3), prec).unwrap();
        let zero = vec![Real::zero(prec); 3];
        assert_eq!(apply_to_kernel_slice(&Functional::Laplacian, &gauss, &zero).unwrap().to_f64(), -6.0);
        let center = vec![Real::from_f64(0.6, prec), Real::from_f64(0.8, prec), Real::zero(prec)];
        let v = apply_to_kernel_slice(&Functional::PointValue, &gauss, &center).unwrap();
        assert!((v.to_f64() - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn laplacian_of_r6_log_r() {
        // H for m = 4, d = 2 is r^6 log r; Δ(r^6 log r) = 36 r^4 log r + 12 r^4.
        let prec = 128;
        let k = Kernel::new(&KernelSpec::polyharmonic(4.0, 2), prec).unwrap();
        let center = vec![Real::one(prec), Real::zero(prec)];
        let v = apply_to_kernel_slice(&Functional::Laplacian, &k, &center).unwrap();
        assert!((v.to_f64() - 12.0).abs() < 1e-30);
        // d = 3, m = 4: -r^5, Δ(-r^5) = -30 r^3.
        let k = Kernel::new(&KernelSpec::polyharmonic(4.0, 3), prec).unwrap();
        let center = vec![Real::zero(prec), Real::one(prec), Real::zero(prec)];
        let v = apply_to_kernel_slice(&Functional::Laplacian, &k, &center).unwrap();
        assert!((v.to_f64() + 30.0).abs() < 1e-30);
    }

    #[test]
    fn induced_weights_and_nodes() {
        let prec = 128;
        let star = NodeSet::five_point_star(prec);
        let w: Vec<Real> = [-4.0, 1.0, 1.0, 1.0, 1.0].iter().map(|&v| Real::from_f64(v, prec)).collect();
        let e = ErrorFunctional::new(Functional::Laplacian, star, w, Real::one(prec)).unwrap();
        let h = Real::from_f64(0.25, prec);
        let eh = e.scale(&h).unwrap();
        assert_eq!(eh.induced_weights()[0].to_f64(), -64.0);
        assert_eq!(eh.induced_nodes().point(1)[0].to_f64(), 0.25);
        let composed = e.scale(&Real::from_f64(0.5, prec)).unwrap().rescale(&Real::from_f64(0.5, prec)).unwrap();
        assert_eq!(composed.induced_weights(), eh.induced_weights());
        assert!(e.exactness_defect(4) < 1e-30);
        assert!(e.exactness_defect(5) > 0.1);
    }

    #[test]
    fn zero_error_functional() {
        let prec = 128;
        let x = NodeSet::from_f64(2, &[vec![0.0, 0.0], vec![0.5, 0.1]], prec, "t").unwrap();
        let e = ErrorFunctional::new(
            Functional::PointValue,
            x,
            vec![Real::one(prec), Real::zero(prec)],
            Real::one(prec),
        )
        .unwrap();
        let k = Kernel::new(&KernelSpec::matern(2.0, 2), prec).unwrap();
        assert!(dual_pairing(&e, &e, &k).unwrap().is_zero());
    }

    #[test]
    fn continuity_enforced() {
        let prec = 128;
        let x = NodeSet::five_point_star(prec);
        let e = ErrorFunctional::new(Functional::Laplacian, x, vec![Real::zero(prec); 5], Real::one(prec)).unwrap();
        let k = Kernel::new(&KernelSpec::matern(2.5, 2), prec).unwrap();
        assert!(matches!(dual_pairing(&e, &e, &k), Err(Error::Continuity(_))));
    }

    #[test]
    fn polyharmonic_needs_exactness() {
        let prec = 128;
        let x = NodeSet::five_point_star(prec);
        let e = ErrorFunctional::new(Functional::Laplacian, x, vec![Real::zero(prec); 5], Real::one(prec)).unwrap();
        let k = Kernel::new(&KernelSpec::polyharmonic(3.5, 2), prec).unwrap();
        assert!(matches!(dual_pairing(&e, &e, &k), Err(Error::ExactnessViolation { order: 3 })));
    }
}
