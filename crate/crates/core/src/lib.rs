//! Nodal stencils for derivative functionals on scattered nodes, with
//! extended-precision evaluation of their errors in Sobolev and Beppo-Levi
//! dual norms.
//!
//! The crate is organized bottom-up: [`scalar`] (precision-tracked reals and
//! special functions), [`linalg`] (dense factorizations), [`polyspace`]
//! (polynomial spaces on node sets), [`kernels`], [`functionals`],
//! [`stencils`] and [`analysis`] (dual norms and convergence studies).

pub mod analysis;
pub mod error;
pub mod functionals;
pub mod kernels;
pub mod linalg;
pub mod polyspace;
pub mod scalar;
pub mod stencils;

pub use error::{Error, Result};
pub use scalar::Real;
