use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grading: {0}")]
    InvalidGrading(String),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("weights must sum to n (sum {sum}, n {n})")]
    WeightSum { sum: usize, n: usize },

    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },

    #[error("operator is not homogeneous: decompose it into parts of definite parity first")]
    NonHomogeneous,

    #[error("site collision: site {0} used more than once")]
    SiteCollision(usize),

    #[error("sites must be distinct (got {0} twice)")]
    SameSite(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular spectral parameter: {0}")]
    SingularSpectralParameter(String),

    #[error("coincident positions x_{0} and x_{1}")]
    CoincidentPositions(usize, usize),

    #[error("division by zero")]
    DivisionByZero,

    #[error("{family} has no {what}")]
    UnsupportedFamily { family: String, what: String },

    #[error("vector does not exist: {0}")]
    NoInvariantVector(String),

    #[error("order d={d} out of range 1..={n}")]
    OrderOutOfRange { d: usize, n: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
