//! Error type shared by every operation in the crate.

/// Errors produced by constructors, metric operations, and retractions.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("norm descriptors differ: {0}")]
    DescriptorMismatch(String),

    #[error("{what} is unsupported for snowflake exponent {epsilon} (requires epsilon = 1)")]
    SnowflakeUnsupported { what: &'static str, epsilon: f64 },

    #[error("singular direction: the two points coincide")]
    SingularDirection,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no matching guarantee: {0}")]
    NoMatchingGuarantee(String),

    #[error("relation is not reduced: pair ({0}, {1}) is inessential")]
    NotReduced(usize, usize),

    #[error("pair ({i}, {j}) at distance {dist} violates the lambda bound {bound}")]
    NotALambdaRelation { i: usize, j: usize, dist: f64, bound: f64 },

    #[error("speed ratio undefined: path endpoints coincide")]
    UndefinedRatio,

    #[error("cardinality {got} exceeds the exact-enumeration limit {limit}")]
    SizeLimit { got: usize, limit: usize },

    #[error("vector field singular: configuration has coincident points")]
    SingularField,

    #[error("integration failure: {0}")]
    IntegrationFailure(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("no usable samples: {0}")]
    NoData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
