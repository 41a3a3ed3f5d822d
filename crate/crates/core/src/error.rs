use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("matrix is rank deficient: smallest eigenvalue of M*M^T is {smallest:e}, largest {largest:e}")]
    RankDeficient { smallest: f64, largest: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid problem shape: {0}")]
    InvalidShape(String),

    #[error("point set is empty")]
    EmptySet,

    #[error("prox stepsize must be positive, got {0}")]
    InvalidStepsize(f64),

    #[error("point is not on the set (distance {distance:e})")]
    NotOnSet { distance: f64 },

    #[error("set is not affine: {0}")]
    NotAffine(&'static str),

    #[error("argument out of domain: {0}")]
    OutOfDomain(String),

    #[error("no nonzero proximal normals relative to the affine hull: one set contains the other")]
    DegenerateNormals,

    #[error("no admissible samples in the requested region")]
    NoSamples,

    #[error("insufficient data for rate fit: {0}")]
    InsufficientData(String),

    #[error("operation requires convex sets, got {0}")]
    NonConvexInput(&'static str),

    #[error("fixed point set is empty for the inconsistent problem at lambda = 1")]
    LambdaOne,

    #[error("operation requires a complex ambient space")]
    RequiresComplex,

    #[error("operator does not support this operation: {0}")]
    UnsupportedOperator(&'static str),

    #[error("parse error{}: {message} (field `{field}`)", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse {
        line: Option<usize>,
        field: String,
        message: String,
    },

    #[error("schema version mismatch: expected {expected}, found {found}")]
    VersionMismatch { expected: String, found: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            line: None,
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
