use thiserror::Error;

/// Errors raised by the exact-arithmetic core and the constructions built on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An exponent span or shift exceeded the configured bit budget.
    #[error("exponent span of {span} bits exceeds the guard of {guard} bits")]
    GuardExceeded { span: u64, guard: u64 },

    /// A quotient or interpolation that must be dyadic was not.
    #[error("result is not a dyadic rational: {0}")]
    NotExact(String),

    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: String, len: String },

    #[error("point {point} is outside the admissible domain {domain}")]
    OutOfInterval { point: String, domain: String },

    #[error("(1,0) has no predecessor")]
    NoPredecessor,

    #[error("invalid index ({j},{k}): {reason}")]
    InvalidIndex { j: u64, k: u64, reason: String },

    /// A brute-force routine would exceed its enumeration budget.
    #[error("enumeration budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: String, budget: String },

    /// A claimed inequality or identity of a construction failed.
    #[error("violated: {0}")]
    Violation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
