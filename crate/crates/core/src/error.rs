use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("series order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("series has a zero constant term and cannot be inverted")]
    ZeroConstantTerm,
    #[error("exponential needs a zero constant term")]
    NonzeroConstantTerm,
    #[error("gamma weight exponent must be at least 1, got {0}")]
    InvalidWeight(usize),
    #[error("order r must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("partial Bell polynomial B({n},{k}) needs {needed} arguments, got {got}")]
    InsufficientArguments {
        n: usize,
        k: usize,
        needed: usize,
        got: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot parse `{token}`: {reason}")]
    Parse { token: String, reason: String },
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),
    #[error("invalid check configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
