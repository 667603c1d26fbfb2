use thiserror::Error;

/// Errors produced by the polynomial, sampling and estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("expanded degree {degree} exceeds cap {cap}")]
    DegreeCapExceeded { degree: u32, cap: u32 },

    #[error("polynomial threshold function needs a nonzero polynomial")]
    ZeroPolynomial,

    #[error("degenerate restriction: polynomial vanishes on the circle")]
    DegenerateRestriction,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("linear forms are not distinct: directions {0} and {1} are dependent")]
    NotDistinct(usize, usize),

    #[error("insufficient resolution: only {crossings} crossings at eps = {eps}")]
    InsufficientResolution { eps: f64, crossings: u64 },

    #[error("too many degenerate samples: {skipped} of {total}")]
    TooManyDegenerate { skipped: u64, total: u64 },

    #[error("sample budget exceeded: {required} samples needed, cap is {cap}")]
    BudgetExceeded { required: u64, cap: u64 },

    #[error("root finding failed to converge")]
    RootFinding,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
