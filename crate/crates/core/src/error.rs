use thiserror::Error;

/// Errors raised anywhere in the seal toolkit.
#[derive(Debug, Error)]
pub enum SealError {
    #[error("null state")]
    NullState,

    #[error("state not normalized: squared norm {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("dimension cap: {what} exceeds {cap}")]
    DimensionCap { what: String, cap: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("instrument incomplete: residual {residual:e} exceeds tolerance {tolerance:e}")]
    Incomplete { residual: f64, tolerance: f64 },

    #[error("operator is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid parameter `{field}`: {message}")]
    InvalidParameter { field: String, message: String },

    #[error("index {index} out of range for {len} entries")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("undefined per-bit probability: scheme is not a product seal")]
    NotProduct,

    #[error("seal states not orthonormal; projective decode undefined")]
    NotOrthonormal,

    #[error("table too large: {entries} entries exceeds {limit}")]
    TableTooLarge { entries: u128, limit: u128 },

    #[error("grid too small: {points} points, trend window needs {window}")]
    GridTooSmall { points: usize, window: usize },

    #[error("at n = {n}: {source}")]
    AtLength {
        n: usize,
        #[source]
        source: Box<SealError>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("numerical invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl SealError {
    pub(crate) fn param(field: impl Into<String>, message: impl Into<String>) -> Self {
        SealError::InvalidParameter {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn at_length(self, n: usize) -> Self {
        SealError::AtLength {
            n,
            source: Box::new(self),
        }
    }

    /// True when the error (or the error it wraps) is a numerical invariant failure.
    pub fn is_invariant_failure(&self) -> bool {
        match self {
            SealError::Invariant(_) | SealError::Incomplete { .. } => true,
            SealError::AtLength { source, .. } => source.is_invariant_failure(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, SealError>;
