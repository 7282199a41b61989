use alloc::string::String;

/// Errors raised by systems, metrics, measures and estimators.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point kind does not match the system state space")]
    KindMismatch,
    #[error("symbolic horizon exhausted: need {needed} symbols, word has {available}")]
    HorizonExhausted { needed: usize, available: usize },
    #[error("word too short: need {needed} symbols, got {available}")]
    LengthTooShort { needed: usize, available: usize },
    #[error("measure spec is not compatible with the system: {0}")]
    SpecMismatch(String),
    #[error("empirical ball has zero mass")]
    EmptyBall,
    #[error("no subset of candidates satisfies the cover constraint")]
    Infeasible,
    #[error("exhaustive cover requested for {size} candidates (cap {cap})")]
    ExactTooLarge { size: usize, cap: usize },
    #[error("grid is not eps/2-dense: {0}")]
    GridTooCoarse(String),
    #[error("transition matrix is not primitive")]
    NotPrimitive,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Stable upper-case code used in result rows and reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::KindMismatch => "KIND_MISMATCH",
            Error::HorizonExhausted { .. } => "HORIZON_EXHAUSTED",
            Error::LengthTooShort { .. } => "LENGTH_TOO_SHORT",
            Error::SpecMismatch(_) => "SPEC_MISMATCH",
            Error::EmptyBall => "EMPTY_BALL",
            Error::Infeasible => "INFEASIBLE",
            Error::ExactTooLarge { .. } => "EXACT_TOO_LARGE",
            Error::GridTooCoarse(_) => "GRID_TOO_COARSE",
            Error::NotPrimitive => "NOT_PRIMITIVE",
            Error::InvalidParameter(_) => "INVALID_PARAMETER",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = core::result::Result<T, Error>;
