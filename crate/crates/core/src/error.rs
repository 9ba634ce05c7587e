use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("domain error at byte {offset}: {message}")]
    Domain { offset: usize, message: String },

    #[error("quaternion is not unit: norm {norm}")]
    NotUnit { norm: f64 },

    #[error("unknown named constant `{0}`")]
    UnknownConstant(String),

    #[error("matrix is not orthogonal (deviation {deviation:e})")]
    NotOrthogonal { deviation: f64 },

    #[error("expected a matrix of determinant +1")]
    NotProper,

    #[error("no n <= {cap} with e^n = identity")]
    OrderCapExceeded { cap: usize },

    #[error("group closure exceeded {max_order} elements")]
    MaxOrderExceeded { max_order: usize },

    #[error("element does not satisfy the chirality precondition: {0}")]
    Precondition(String),

    #[error("invalid parameters for {family}: {violated}")]
    InvalidParameters { family: String, violated: String },

    #[error("group passes every K screen but no conjugator was found ({evidence})")]
    ConjugatorNotFound { evidence: String },

    #[error("trichotomy violated: {diagnostics}")]
    TrichotomyViolation { diagnostics: String },
}

pub type Result<T> = std::result::Result<T, Error>;
