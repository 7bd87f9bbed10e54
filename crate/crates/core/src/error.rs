use thiserror::Error;

/// Errors raised by the library. Negative verdicts (non-conjugate, non-solvable)
/// are values, not errors; these variants cover malformed input and exhausted budgets.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),
    #[error("missing inverse images: {0}")]
    MissingInverse(String),
    #[error("rewriting budget of {budget} steps exceeded; partial form: {partial}")]
    BudgetExceeded { budget: usize, partial: String },
    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),
    #[error("weight overflow: commutator of weight {weight} exceeds bound {bound}")]
    WeightOverflow { weight: usize, bound: usize },
    #[error("non-unit constant term")]
    NonUnit,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("quotient is not injective on the given set: {0}")]
    NotInjective(String),
    #[error("trivial image: {0}")]
    TrivialImage(String),
    #[error("invalid graph of groups: {0}")]
    InvalidGraph(String),
    #[error("unsupported vertex-group operation: {0}")]
    Unsupported(String),
    #[error("not hyperbolic: {0}")]
    NotHyperbolic(String),
    #[error("zero twisting number at turn ({0})")]
    ZeroTwist(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid filling: {0}")]
    InvalidFilling(String),
    #[error("separation check failed at {check}: {detail}; suggestion: {suggestion}")]
    SeparationFailed {
        check: String,
        detail: String,
        suggestion: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
