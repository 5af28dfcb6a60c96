//! Dual norms of error functionals, the Beppo-Levi scaling law and
//! convergence studies over geometric `h` grids.

mod fourier;
mod rates;

pub use fourier::{fourier_oracle_norm_squared, FourierOptions};
pub use rates::{
    compare_methods, estimate_rates, fit_log_power, median_of_last, quotient_study, slopes, stencil_convergence_study,
    HGrid, LogPowerFit, QuotientReport, RateReport, RateStudy, RateVerdict, StencilConvergenceReport, StencilRecipe,
};

use crate::error::{Error, Result};
use crate::functionals::{dual_pairing_detailed, ErrorFunctional};
use crate::kernels::{Kernel, KernelSpec};
use crate::scalar::Real;
use crate::stencils::Stencil;

/// Bits of agreement a norm must keep to count as trustworthy (10 digits).
pub const TRUSTED_BITS: f64 = 34.0;

/// `ε^x ε^y K(x, y)` with its cancellation diagnostics.
#[derive(Clone, Debug)]
pub struct NormSquared {
    pub value: Real,
    /// Bits lost to cancellation in the bilinear sum.
    pub lost_bits: f64,
    /// True when a slightly negative result was clamped to 0.
    pub clamped: bool,
}

impl NormSquared {
    /// `‖ε‖`, the square root of the clamped value.
    pub fn norm(&self) -> Real {
        self.value.sqrt()
    }

    /// Significant bits left after cancellation.
    pub fn trusted_bits(&self) -> f64 {
        f64::from(self.value.prec()) - self.lost_bits
    }
}

/// Squared dual norm `ε^x ε^y K(x, y)` in the space of `kernel`.
///
/// Results that are negative by no more than the rounding level of the
/// largest bilinear term are clamped to zero; anything more negative means the
/// working precision was exhausted.
pub fn dual_norm_squared_with(e: &ErrorFunctional, kernel: &Kernel) -> Result<NormSquared> {
    let pairing = dual_pairing_detailed(e, e, kernel)?;
    let prec = pairing.value.prec();
    if pairing.value.is_negative() {
        if pairing.lost_bits + 16.0 >= f64::from(prec) {
            log::warn!("squared dual norm {} is within rounding of zero; clamped", pairing.value.to_string_digits(6));
            return Ok(NormSquared { value: Real::zero(prec), lost_bits: f64::from(prec), clamped: true });
        }
        return Err(Error::PrecisionExhausted {
            bits: prec,
            detail: format!(
                "squared dual norm came out negative ({}) with {:.0} bits lost",
                pairing.value.to_string_digits(6),
                pairing.lost_bits
            ),
        });
    }
    Ok(NormSquared { value: pairing.value, lost_bits: pairing.lost_bits, clamped: false })
}

/// Squared dual norm of `e` in the space described by `space`.
pub fn dual_norm_squared(e: &ErrorFunctional, space: &KernelSpec) -> Result<NormSquared> {
    let kernel = Kernel::new(space, e.prec())?;
    dual_norm_squared_with(e, &kernel)
}

/// `‖ε_h‖_{BL*} / (h^{m - s - d/2} ‖ε_1‖_{BL*})`, identically 1 for stencils
/// exact on the polyharmonic kernel's CPD order.
pub fn bl_scaling_check(stencil: &Stencil, m: f64, h: &Real) -> Result<Real> {
    if !stencil.scalable {
        return Err(Error::Invalid("the Beppo-Levi scaling law applies to scalable stencils".into()));
    }
    let prec = stencil.prec().min(h.prec());
    let d = stencil.nodes.dim();
    let kernel = Kernel::new(&KernelSpec::polyharmonic(m, d), prec)?;
    let one = Real::one(prec);
    let n1 = dual_norm_squared_with(&stencil.error_functional(&one)?, &kernel)?;
    let nh = dual_norm_squared_with(&stencil.error_functional(h)?, &kernel)?;
    if n1.value.is_zero() {
        return Err(Error::Invalid("stencil has zero Beppo-Levi error at h = 1; the ratio is undefined".into()));
    }
    let s = i64::from(stencil.lambda.scaling_order());
    let exponent = kernel.m() - s - Real::from_i64(d as i64, prec) / 2;
    Ok(nh.norm() / (h.pow(&exponent) * n1.norm()))
}
