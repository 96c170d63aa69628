use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum DevarError {
    #[error("matrix must have at least {min_rows} rows and 1 column, got {rows}x{cols}")]
    TooSmall {
        rows: usize,
        cols: usize,
        min_rows: usize,
    },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("zero-variance column {column}")]
    ZeroVariance { column: String },

    #[error("row count mismatch: {left} vs {right}")]
    RowMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("covariate matrix is rank deficient (condition ratio {ratio:.3e})")]
    RankDeficient { ratio: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("all singular values are zero")]
    ZeroSpectrum,

    #[error("numerical routine failed to converge: {0}")]
    NoConvergence(String),

    #[error("rank constraint violated: {0}")]
    RankConstraint(String),

    #[error("degenerate aspect ratio: {0}")]
    DegenerateAspectRatio(String),

    #[error("missing input: {0}")]
    MissingInput(String),
}

impl DevarError {
    /// Whether the failure is a numerical one, as opposed to bad input or bad parameters.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            DevarError::NotPositiveDefinite
                | DevarError::ZeroSpectrum
                | DevarError::NoConvergence(_)
                | DevarError::DegenerateAspectRatio(_)
                | DevarError::RankDeficient { .. }
        )
    }
}

pub type Result<T, E = DevarError> = std::result::Result<T, E>;
