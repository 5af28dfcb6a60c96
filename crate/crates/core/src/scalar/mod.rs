//! Extended-precision scalars and the special functions behind kernel
//! evaluation.

mod bessel;
mod gamma;
mod real;
mod series;

pub use bessel::{bessel_kv_rv, kv_rv_derivative_ladder, MAX_ARGUMENT};
pub(crate) use bessel::{as_integer, kv_rv_signed};
pub use gamma::{digamma_int, gamma, gamma_at};
pub use real::{Real, MIN_PRECISION};
pub use series::{
    gaussian_series, is_half_integer, matern_normalization, matern_series, SeriesExpansion, SeriesTerm,
};

/// Default working precision for stencil construction, in bits.
pub const DEFAULT_STENCIL_PRECISION: u32 = 256;

/// Default working precision for h-scaling studies (about 256 decimal digits).
pub const DEFAULT_STUDY_PRECISION: u32 = 850;
