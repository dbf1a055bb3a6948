use thiserror::Error;

/// Errors raised by constructors and decision procedures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("size limit exceeded: {what} needs {requested} morphisms, limit is {limit}")]
    SizeLimitExceeded {
        what: String,
        requested: usize,
        limit: usize,
    },
    #[error("classes belong to different categories")]
    OwnerMismatch,
    #[error("property `{0}` needs a second class")]
    MissingSecondClass(String),
    #[error("class is empty")]
    EmptyClass,
    #[error("class is not multiplicative: {0}")]
    RequiresMultiplicative(String),
    #[error("class is not right localizing: {0}")]
    RequiresRightLocalizing(String),
    #[error("map is not monotone")]
    NotMonotone,
    #[error("endpoints do not match: {0}")]
    EndpointMismatch(String),
    #[error("functor does not invert {0}")]
    DoesNotInvert(String),
    #[error("{0} is not a cofibration")]
    NotCofibration(String),
    #[error("missing construction: {0}")]
    Missing(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("not a weak equivalence")]
    NotWeakEquivalence,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("internal: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
