use thiserror::Error;

/// Errors raised by stencil construction and error analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("gamma function pole at nonpositive integer {0}")]
    Pole(String),

    #[error("argument outside the domain of {function}: {detail}")]
    Domain { function: &'static str, detail: String },

    #[error("{function} overflow/underflow for argument {arg}")]
    Overflow { function: &'static str, arg: String },

    #[error("cancellation in {function} exceeded {guard_bits} guard bits")]
    PrecisionLoss { function: &'static str, guard_bits: u32 },

    #[error("unsupported series order: {0}")]
    UnsupportedOrder(String),

    #[error("iteration did not converge after {iterations} sweeps in {routine}")]
    NonConvergence { routine: &'static str, iterations: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("inconsistent linear system: attained residual {residual}")]
    Inconsistent { residual: f64 },

    #[error("singular matrix in {0}")]
    Singular(&'static str),

    #[error("rank-deficient constraints: {0}")]
    RankDeficientConstraints(String),

    #[error("infeasible exactness order {q}: attained residual {residual}")]
    InfeasibleOrder { q: usize, residual: f64 },

    #[error("insufficient polynomial reproduction: need order {needed}, node set has {available}")]
    InsufficientReproduction { needed: usize, available: usize },

    #[error("q_max search reached the cap {cap}")]
    CapReached { cap: usize },

    #[error("functional not continuous on the kernel's space: {0}")]
    Continuity(String),

    #[error("error functional not exact on polynomials of order {order} required by the kernel")]
    ExactnessViolation { order: usize },

    #[error("coincident-point limit does not exist: {0}")]
    SingularAtOrigin(String),

    #[error("precision exhausted at {bits} bits: {detail}")]
    PrecisionExhausted { bits: u32, detail: String },

    #[error("stencil of exactness order {q} is not unique (null space dimension {nullity})")]
    NonUniqueStencil { q: usize, nullity: usize },

    #[error("quadrature tolerance not met: {0}")]
    QuadratureTolerance(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Short machine-readable kind, used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Pole(_) => "pole",
            Error::Domain { .. } => "domain",
            Error::Overflow { .. } => "overflow",
            Error::PrecisionLoss { .. } => "precision-loss",
            Error::UnsupportedOrder(_) => "unsupported-order",
            Error::NonConvergence { .. } => "non-convergence",
            Error::DimensionMismatch(_) => "dimension-mismatch",
            Error::Inconsistent { .. } => "inconsistent-system",
            Error::Singular(_) => "singular",
            Error::RankDeficientConstraints(_) => "rank-deficient-constraints",
            Error::InfeasibleOrder { .. } => "infeasible-order",
            Error::InsufficientReproduction { .. } => "insufficient-reproduction",
            Error::CapReached { .. } => "cap-reached",
            Error::Continuity(_) => "continuity-violation",
            Error::ExactnessViolation { .. } => "exactness-violation",
            Error::SingularAtOrigin(_) => "singular-at-origin",
            Error::PrecisionExhausted { .. } => "precision-exhaustion",
            Error::NonUniqueStencil { .. } => "non-unique-stencil",
            Error::QuadratureTolerance(_) => "quadrature-tolerance",
            Error::Invalid(_) => "invalid-input",
        }
    }

    /// True when the error is caused by the caller's inputs rather than a
    /// numerical breakdown inside the library.
    pub fn is_user_error(&self) -> bool {
        !matches!(
            self,
            Error::NonConvergence { .. }
                | Error::PrecisionLoss { .. }
                | Error::PrecisionExhausted { .. }
                | Error::QuadratureTolerance(_)
                | Error::Singular(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
