use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("eta-quotient is not modular on Gamma0({level}): Newman conditions fail")]
    NotModular { level: u64 },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("insufficient precision: {required} coefficients required, {available} available")]
    Precision { required: usize, available: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("enumeration would produce {count} vanishing tuples, above the cap of {cap}")]
    TupleCap { count: u128, cap: u128 },

    #[error("no spanning eta-quotient basis found up to weight {max_weight}: {detail}")]
    NoSpanningWeight { max_weight: i64, detail: String },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
