use alloc::string::String;

/// Errors raised by the library. Verification failures are not errors; they
/// are reported as verdicts inside a [`crate::VerificationReport`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid distribution: {0}")]
    Validation(String),

    #[error("P(A|E={0}) is undefined because P_E({0}) = 0")]
    UndefinedConditional(usize),

    #[error("parameter out of domain: {0}")]
    Parameter(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("resource cap exceeded: {0}")]
    Resource(String),

    #[error("rate {rate} is outside the achievable interval ({lo}, {hi}]")]
    Range { rate: f64, lo: f64, hi: f64 },

    #[error("0 has no multiplicative inverse")]
    NoInverse,

    #[error("mask must be a nonzero field element")]
    InvalidMask,

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
