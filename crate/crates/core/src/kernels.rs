//! Radial kernels: polyharmonic, Whittle–Matérn and Gaussian.
//!
//! Everything is expressed through the radial profile
//! `F_k = (r⁻¹ d/dr)^k φ`, which makes Cartesian derivatives of `φ(‖z‖)`
//! a finite sum `Σ c · z^μ · F_k(‖z‖)` and gives clean limits at `z = 0`
//! from the even part of the small-`r` series.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{
    gaussian_series, kv_rv_signed, matern_normalization, matern_series, Real, SeriesExpansion,
};

/// Highest profile index needed: fourth-order mixed derivatives.
pub const MAX_PROFILE_DEPTH: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Polyharmonic,
    Matern,
    Gaussian,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Family::Polyharmonic => "polyharmonic",
            Family::Matern => "matern",
            Family::Gaussian => "gaussian",
        };
        f.write_str(name)
    }
}

/// Kernel description as it appears in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: Family,
    /// Smoothness order; ignored for the Gaussian.
    #[serde(default)]
    pub m: f64,
    pub d: usize,
}

impl KernelSpec {
    pub fn new(family: Family, m: f64, d: usize) -> Self {
        KernelSpec { family, m, d }
    }

    pub fn polyharmonic(m: f64, d: usize) -> Self {
        KernelSpec::new(Family::Polyharmonic, m, d)
    }

    pub fn matern(m: f64, d: usize) -> Self {
        KernelSpec::new(Family::Matern, m, d)
    }

    pub fn gaussian(d: usize) -> Self {
        KernelSpec::new(Family::Gaussian, 0.0, d)
    }
}

/// `σ r^β (log r)^{log}` with `σ = ±1`.
#[derive(Clone, Debug)]
struct PowerShape {
    beta: Real,
    log: bool,
    sign: i64,
}

#[derive(Clone, Debug)]
pub struct Kernel {
    spec: KernelSpec,
    m: Real,
    nu: Real,
    cpd_order: usize,
    normalization: Real,
    prec: u32,
    power: Option<PowerShape>,
    series: Option<SeriesExpansion>,
}

impl Kernel {
    pub fn new(spec: &KernelSpec, prec: u32) -> Result<Kernel> {
        if spec.d == 0 {
            return Err(Error::Invalid("kernel dimension must be >= 1".into()));
        }
        if !spec.m.is_finite() {
            return Err(Error::Invalid(format!("kernel order m = {} is not finite", spec.m)));
        }
        let m = Real::from_f64_decimal(spec.m, prec);
        let nu = &m - Real::from_i64(spec.d as i64, prec) / 2;
        let mut kernel = Kernel {
            spec: spec.clone(),
            m,
            nu: nu.clone(),
            cpd_order: 0,
            normalization: Real::one(prec),
            prec,
            power: None,
            series: None,
        };
        match spec.family {
            Family::Polyharmonic | Family::Matern if !nu.is_positive() => {
                return Err(Error::Invalid(format!(
                    "{} kernel needs m - d/2 > 0 (m = {}, d = {})",
                    spec.family, spec.m, spec.d
                )));
            }
            Family::Polyharmonic => {
                let floor = nu.floor().to_f64() as i64;
                kernel.cpd_order = (floor + 1) as usize;
                let beta = &nu * 2;
                let log = crate::scalar::as_integer(&beta).is_some_and(|b| b % 2 == 0);
                let sign = if (floor + 1) % 2 == 0 { 1 } else { -1 };
                kernel.power = Some(PowerShape { beta, log, sign });
            }
            Family::Matern => {
                kernel.normalization = matern_normalization(&nu, prec);
                let order = (2.0 * nu.to_f64()).ceil() as u32 + 2 + 2 * MAX_PROFILE_DEPTH as u32;
                kernel.series = Some(matern_series(&nu, order, prec)?);
            }
            Family::Gaussian => {
                kernel.series = Some(gaussian_series(2 * MAX_PROFILE_DEPTH as u32 + 2, prec));
            }
        }
        Ok(kernel)
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn family(&self) -> Family {
        self.spec.family
    }

    pub fn dim(&self) -> usize {
        self.spec.d
    }

    pub fn m(&self) -> &Real {
        &self.m
    }

    /// `m - d/2`, the Bessel order for the Matérn family.
    pub fn nu(&self) -> &Real {
        &self.nu
    }

    /// Order of conditional positive definiteness (0 for positive definite).
    pub fn cpd_order(&self) -> usize {
        self.cpd_order
    }

    pub fn normalization(&self) -> &Real {
        &self.normalization
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Exponent `2m - d` and log flag of the polyharmonic kernel.
    pub fn polyharmonic_shape(&self) -> Option<(Real, bool, i64)> {
        self.power.as_ref().map(|p| (p.beta.clone(), p.log, p.sign))
    }

    /// Smallest exponent at which the kernel stops being an even power series
    /// (infinite for the Gaussian).
    fn smoothness_exponent(&self) -> f64 {
        match self.spec.family {
            Family::Polyharmonic => self.power.as_ref().map_or(0.0, |p| p.beta.to_f64()),
            Family::Matern => self
                .series
                .as_ref()
                .and_then(|s| s.leading_non_even())
                .map_or(f64::INFINITY, |t| t.exponent.to_f64()),
            Family::Gaussian => f64::INFINITY,
        }
    }

    /// True when all derivatives of total order `n` of `φ(‖z‖)` extend
    /// continuously to `z = 0`.
    pub fn smooth_to_order(&self, n: usize) -> bool {
        self.smoothness_exponent() > n as f64
    }

    /// Radial profile `F_0..F_depth` at `r > 0`.
    pub fn profile(&self, r: &Real, depth: usize) -> Result<Vec<Real>> {
        if !r.is_positive() {
            return Err(Error::Domain { function: "kernel profile", detail: format!("r = {r} must be > 0") });
        }
        if depth > MAX_PROFILE_DEPTH {
            return Err(Error::UnsupportedOrder(format!("profile depth {depth} > {MAX_PROFILE_DEPTH}")));
        }
        let prec = self.prec.min(r.prec());
        match self.spec.family {
            Family::Gaussian => {
                let e = (-(r * r)).exp();
                Ok((0..=depth).map(|k| &e * (-2i64).pow(k as u32)).collect())
            }
            Family::Matern => (0..=depth)
                .map(|k| {
                    let f = kv_rv_signed(&(&self.nu - k as i64), r, prec)?;
                    let v = f * &self.normalization;
                    Ok(if k % 2 == 1 { -v } else { v })
                })
                .collect(),
            Family::Polyharmonic => {
                let shape = self.power.as_ref().expect("polyharmonic shape");
                let ln_r = r.ln();
                // F = r^p (A log r + B), D F = r^{p-2} (p A log r + p B + A)
                let mut p = shape.beta.with_prec(prec);
                let (mut a, mut b) = if shape.log {
                    (Real::from_i64(shape.sign, prec), Real::zero(prec))
                } else {
                    (Real::zero(prec), Real::from_i64(shape.sign, prec))
                };
                let mut out = Vec::with_capacity(depth + 1);
                for k in 0..=depth {
                    out.push(r.pow(&p) * (&a * &ln_r + &b));
                    if k < depth {
                        let na = &p * &a;
                        let nb = &p * &b + &a;
                        a = na;
                        b = nb;
                        p -= 2i64;
                    }
                }
                Ok(out)
            }
        }
    }

    /// `F_k(0)`, defined when the kernel is smooth to order `2k`.
    pub fn profile_at_zero(&self, k: usize) -> Result<Real> {
        if !self.smooth_to_order(2 * k) {
            return Err(Error::SingularAtOrigin(format!(
                "{} kernel (m = {}, d = {}) has no finite radial derivative of order {} at 0",
                self.spec.family,
                self.spec.m,
                self.spec.d,
                2 * k
            )));
        }
        match self.spec.family {
            // r^β with β > 2k: every profile vanishes at the origin.
            Family::Polyharmonic => Ok(Real::zero(self.prec)),
            Family::Matern | Family::Gaussian => {
                let series = self.series.as_ref().expect("series for smooth kernel");
                let mut fact = Real::one(self.prec);
                for j in 1..=k {
                    fact *= j as i64;
                }
                Ok(series.even_coeff(k, self.prec) * fact.mul_pow2(k as i32))
            }
        }
    }

    /// `φ(r)` for `r >= 0`.
    pub fn value(&self, r: &Real) -> Result<Real> {
        if r.is_negative() {
            return Err(Error::Domain { function: "kernel value", detail: format!("r = {r} < 0") });
        }
        if r.is_zero() {
            return self.profile_at_zero(0);
        }
        Ok(self.profile(r, 0)?.remove(0))
    }

    /// Ordinary radial derivatives `φ, φ', …, φ^{(depth)}` at `r > 0`.
    pub fn radial_derivatives(&self, r: &Real, depth: usize) -> Result<Vec<Real>> {
        let f = self.profile(r, depth)?;
        let r2 = r * r;
        let mut out = vec![f[0].clone()];
        if depth >= 1 {
            out.push(r * &f[1]);
        }
        if depth >= 2 {
            out.push(&f[1] + &r2 * &f[2]);
        }
        if depth >= 3 {
            out.push(r * &f[2] * 3 + &r2 * r * &f[3]);
        }
        if depth >= 4 {
            out.push(&f[2] * 3 + &r2 * &f[3] * 6 + &r2 * &r2 * &f[4]);
        }
        Ok(out)
    }

    /// Small-`r` expansion; defined for the Matérn and Gaussian families.
    pub fn near_zero_series(&self, order: u32) -> Result<SeriesExpansion> {
        match self.spec.family {
            Family::Polyharmonic => Err(Error::Invalid(
                "polyharmonic kernels are their own leading term; no series expansion".into(),
            )),
            Family::Gaussian => Ok(gaussian_series(order, self.prec)),
            Family::Matern => {
                let min_order = (2.0 * self.nu.to_f64()).ceil() as u32 + 2;
                matern_series(&self.nu, order.max(min_order), self.prec)
            }
        }
    }

    /// `D^γ φ(‖z‖)` for a multi-index `γ` with `|γ| <= 4`.
    pub fn derivative(&self, gamma: &[u32], z: &[Real]) -> Result<Real> {
        self.derivative_combination(&[(gamma.to_vec(), 1)], z)
    }

    /// `Σ c_i D^{γ_i} φ(‖z‖)` for integer coefficients, sharing one radial
    /// profile evaluation. All `γ_i` must have the same total order.
    pub fn derivative_combination(&self, combo: &[(Vec<u32>, i64)], z: &[Real]) -> Result<Real> {
        let d = self.spec.d;
        if z.len() != d || combo.iter().any(|(g, _)| g.len() != d) {
            return Err(Error::DimensionMismatch(format!(
                "derivative of a {d}-d kernel with mismatched multi-index or point length"
            )));
        }
        let order: u32 = combo.first().map_or(0, |(g, _)| g.iter().sum());
        if combo.iter().any(|(g, _)| g.iter().sum::<u32>() != order) {
            return Err(Error::Invalid("derivative combination mixes orders".into()));
        }
        if order as usize > MAX_PROFILE_DEPTH {
            return Err(Error::UnsupportedOrder(format!("derivative order {order} > {MAX_PROFILE_DEPTH}")));
        }
        let mut terms: Vec<DerivTerm> = Vec::new();
        for (gamma, c) in combo {
            for t in expand_derivative(gamma) {
                let coeff = t.coeff * c;
                if let Some(e) = terms.iter_mut().find(|e| e.mu == t.mu && e.k == t.k) {
                    e.coeff += coeff;
                } else {
                    terms.push(DerivTerm { coeff, ..t });
                }
            }
        }
        terms.retain(|t| t.coeff != 0);
        let prec = self.prec.min(z.iter().map(Real::prec).min().unwrap_or(self.prec));
        let squares: Vec<Real> = z.iter().map(|v| v * v).collect();
        let r2 = Real::sum_of(squares.iter(), prec);
        if r2.is_zero() {
            if !self.smooth_to_order(order as usize) {
                return Err(Error::SingularAtOrigin(format!(
                    "derivative of order {order} of the {} kernel (m = {}, d = {}) at coincident points",
                    self.spec.family, self.spec.m, self.spec.d
                )));
            }
            if order % 2 == 1 {
                return Ok(Real::zero(prec));
            }
            let coeff: i64 = terms.iter().filter(|t| t.mu.iter().all(|&e| e == 0)).map(|t| t.coeff).sum();
            if coeff == 0 {
                return Ok(Real::zero(prec));
            }
            return Ok(self.profile_at_zero(order as usize / 2)? * coeff);
        }
        if terms.is_empty() {
            return Ok(Real::zero(prec));
        }
        let r = r2.sqrt();
        let max_k = terms.iter().map(|t| t.k).max().unwrap_or(0);
        let profile = self.profile(&r, max_k)?;
        let parts: Vec<Real> = terms
            .iter()
            .map(|t| {
                let mut v = &profile[t.k] * t.coeff;
                for (zi, &e) in z.iter().zip(&t.mu) {
                    if e > 0 {
                        v *= zi.powi(i64::from(e));
                    }
                }
                v
            })
            .collect();
        Ok(Real::sum_of(parts.iter(), prec))
    }

    /// Mixed derivative `D^α_x D^β_y φ(‖x - y‖)`.
    pub fn bilinear_atom(&self, alpha: &[u32], beta: &[u32], x: &[Real], y: &[Real]) -> Result<Real> {
        if alpha.len() != beta.len() || x.len() != y.len() {
            return Err(Error::DimensionMismatch("bilinear atom operands differ in dimension".into()));
        }
        let gamma: Vec<u32> = alpha.iter().zip(beta).map(|(a, b)| a + b).collect();
        let z: Vec<Real> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        let v = self.derivative(&gamma, &z)?;
        let beta_order: u32 = beta.iter().sum();
        Ok(if beta_order % 2 == 1 { -v } else { v })
    }
}

/// One term `coeff · z^mu · F_k(‖z‖)`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct DerivTerm {
    coeff: i64,
    mu: Vec<u32>,
    k: usize,
}

/// Expands `D^γ φ(‖z‖)` with `∂_i [z^μ F_k] = μ_i z^{μ-e_i} F_k + z^{μ+e_i} F_{k+1}`.
fn expand_derivative(gamma: &[u32]) -> Vec<DerivTerm> {
    let d = gamma.len();
    let mut terms = vec![DerivTerm { coeff: 1, mu: vec![0; d], k: 0 }];
    for (i, &g) in gamma.iter().enumerate() {
        for _ in 0..g {
            let mut next: Vec<DerivTerm> = Vec::new();
            let mut push = |t: DerivTerm| {
                if let Some(existing) = next.iter_mut().find(|e| e.mu == t.mu && e.k == t.k) {
                    existing.coeff += t.coeff;
                } else {
                    next.push(t);
                }
            };
            for t in &terms {
                if t.mu[i] > 0 {
                    let mut mu = t.mu.clone();
                    mu[i] -= 1;
                    push(DerivTerm { coeff: t.coeff * i64::from(t.mu[i]), mu, k: t.k });
                }
                let mut mu = t.mu.clone();
                mu[i] += 1;
                push(DerivTerm { coeff: t.coeff, mu, k: t.k + 1 });
            }
            terms = next.into_iter().filter(|t| t.coeff != 0).collect();
        }
    }
    terms
}
