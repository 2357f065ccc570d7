use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Argument or parameter outside the documented domain.
    #[error("{0}")]
    Domain(String),

    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    #[error("catalog entry `{0}` is data-only and cannot be iterated")]
    UnsupportedEntry(String),

    /// A division by an exact zero. Callers that know the recurrence index
    /// rewrap this as [`Error::Singularity`].
    #[error("division by zero")]
    ZeroPivot,

    #[error("singularity at n = {index}: zero pivot")]
    Singularity { index: i64 },

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("no stabilization to {target_digits} digits after {doublings} doublings (last run at {last_digits} digits)")]
    Convergence {
        target_digits: u32,
        doublings: u32,
        last_digits: u32,
    },

    #[error("reconstruction failed at n = {index}: {reason}")]
    Reconstruction { index: i64, reason: String },

    #[error("series truncation insufficient: {0}")]
    TruncationInsufficient(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Whether retrying at a higher working precision can help.
    pub fn is_precision_related(&self) -> bool {
        matches!(self, Error::PrecisionExhausted(_) | Error::Convergence { .. })
    }
}
