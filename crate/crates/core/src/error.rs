use thiserror::Error;

/// Failures surfaced by the engine. The variant name is what the CLI prints
/// on the diagnostic stream, so keep names stable.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("q = {0} is outside the admissible range for this operation")]
    InvalidQ(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("phi(x) = 1 has no positive root on the domain of phi")]
    NoRoot,
    #[error("no bracket found: {0}")]
    NoBracket(String),
    #[error("series evaluation did not converge: {0}")]
    NonConvergent(String),
    #[error("{0} is outside the domain of phi")]
    DomainViolation(f64),
    #[error("floating point overflow while evaluating {0}")]
    Overflow(String),
    #[error("division by a non-invertible element: {0}")]
    DivisionByZero(String),
    #[error("requested n = {n} exceeds the oracle bound {bound}")]
    OracleBound { n: usize, bound: usize },
    #[error("operation requires exact rational data: {0}")]
    NotExact(String),
    #[error("internal check failed: {0}")]
    Assertion(String),
}

impl Error {
    /// Short variant name, used for CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidQ(_) => "InvalidQ",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Parse(_) => "Parse",
            Error::NoRoot => "NoRoot",
            Error::NoBracket(_) => "NoBracket",
            Error::NonConvergent(_) => "NonConvergent",
            Error::DomainViolation(_) => "DomainViolation",
            Error::Overflow(_) => "Overflow",
            Error::DivisionByZero(_) => "DivisionByZero",
            Error::OracleBound { .. } => "OracleBound",
            Error::NotExact(_) => "NotExact",
            Error::Assertion(_) => "Assertion",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
