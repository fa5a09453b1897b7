use thiserror::Error;

/// Errors raised by lattice, valuation, quotient and model operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("order violation: {0}")]
    OrderViolation(String),
    #[error("projection domain error: {target} is not below {label}")]
    ProjectionDomain { target: String, label: String },
    #[error("operation unsupported for {instance}: {what}")]
    Unsupported { instance: &'static str, what: &'static str },
    #[error("null valuation: {0}")]
    NullInput(String),
    #[error("invalid valuation: {0}")]
    InvalidValuation(String),
    #[error("cardinality mismatch on variable {var}: {left} vs {right}")]
    CardinalityMismatch { var: u32, left: usize, right: usize },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("not invertible in place: numerator and denominator lie in different groups")]
    GroupMismatch,
    #[error("domination violated: {0}")]
    DominationViolation(String),
    #[error("partial projection undefined: {0}")]
    ProjectionUndefined(String),
    #[error("quotient is not reducible: {0}")]
    NotReducible(String),
    #[error("composition undefined: {0}")]
    CompositionUndefined(String),
    #[error("step {index}: {source}")]
    AtStep {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    /// Malformed input: TOML syntax, unknown fields, pipeline syntax.
    #[error("{line}:{column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    /// Well-formed input whose content violates an invariant.
    #[error("{line}:{column}: {message}")]
    Invalid { line: usize, column: usize, message: String },
    #[error("{0}")]
    Model(String),
}

impl Error {
    pub(crate) fn at_step(self, index: usize) -> Error {
        Error::AtStep { index, source: Box::new(self) }
    }

    /// The innermost error, looking through step annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
