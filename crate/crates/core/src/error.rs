use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid body at `{path}`: {reason}")]
    InvalidBody { path: String, reason: String },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("linear program exceeded its pivot cap of {cap}")]
    IterationCap { cap: usize },

    #[error("point is not interior to the body (gauge {gauge})")]
    NotInterior { gauge: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infinite value encountered: {0}")]
    NotFinite(String),

    #[error("norm is not separating: {0}")]
    NotSeparating(String),

    #[error("body is unbounded along {direction:?}")]
    Unbounded { direction: Vec<f64> },

    #[error("degenerate point set: no spread along {direction:?}")]
    Degenerate { direction: Vec<f64> },

    #[error("oracle returned NaN at {points:?}")]
    MalformedOracle { points: Vec<Vec<f64>> },

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("matrix is singular (|det| = {det})")]
    Singular { det: f64 },
}

impl Error {
    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidBody { .. } => "invalid_body",
            Error::Json(_) => "json",
            Error::IterationCap { .. } => "iteration_cap",
            Error::NotInterior { .. } => "not_interior",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NotFinite(_) => "not_finite",
            Error::NotSeparating(_) => "not_separating",
            Error::Unbounded { .. } => "unbounded",
            Error::Degenerate { .. } => "degenerate",
            Error::MalformedOracle { .. } => "malformed_oracle",
            Error::NumericalBreakdown(_) => "numerical_breakdown",
            Error::Singular { .. } => "singular",
        }
    }

    pub(crate) fn body(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidBody {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
