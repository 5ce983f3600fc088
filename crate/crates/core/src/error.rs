use thiserror::Error;

/// Every failure the library can report. Nothing in the crate panics on bad input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },
    #[error("dimension {dim} exceeds the configured maximum {max}")]
    DimensionOverflow { dim: usize, max: usize },
    #[error("non-finite entry in {0}")]
    NonFinite(String),
    #[error("operator is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("operator is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid stochastic data: {0}")]
    NotStochastic(String),
    #[error("operator is rank deficient (smallest eigenvalue {min_eigenvalue:.3e})")]
    RankDeficient { min_eigenvalue: f64 },
    #[error("retrodiction undefined: output states {zero_states:?} have zero probability")]
    UndefinedRetrodiction { zero_states: Vec<usize> },
    #[error("retrodiction undefined: propagated prior is rank deficient on a {deficient_dim}-dimensional subspace")]
    RankDeficientOutput { deficient_dim: usize },
    #[error("map is not a quantum channel: {0}")]
    NotChannel(String),
    #[error("{context} did not converge")]
    NonConvergence { context: String },
    #[error("exponent overflow: |kappa| * spectral radius = {value:.3e} exceeds {limit}")]
    ExponentOverflow { value: f64, limit: f64 },
    #[error("tuple is not product preserving (residual {residual:.3e})")]
    NotProductPreserving { residual: f64 },
    #[error("states are not orthogonal (overlap {overlap:.3e})")]
    NotOrthogonal { overlap: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    /// Short machine-readable tag, used in JSON reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::DimensionOverflow { .. } => "dimension_overflow",
            Error::NonFinite(_) => "non_finite",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NotUnitary { .. } => "not_unitary",
            Error::InvalidState(_) => "invalid_state",
            Error::NotStochastic(_) => "not_stochastic",
            Error::RankDeficient { .. } => "rank_deficient",
            Error::UndefinedRetrodiction { .. } => "undefined_retrodiction",
            Error::RankDeficientOutput { .. } => "undefined_retrodiction",
            Error::NotChannel(_) => "not_channel",
            Error::NonConvergence { .. } => "non_convergence",
            Error::ExponentOverflow { .. } => "exponent_overflow",
            Error::NotProductPreserving { .. } => "not_product_preserving",
            Error::NotOrthogonal { .. } => "not_orthogonal",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Parse(_) => "parse",
            Error::Internal(_) => "internal_consistency",
        }
    }

    pub(crate) fn mismatch(context: &str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            context: context.to_string(),
            expected,
            found,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
