use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("constellation cardinality must be a power of two >= 2, got {0}")]
    InvalidCardinality(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("minimum distance undefined for a singleton set")]
    UndefinedDistance,

    #[error("operation only defined for binary sets, got cardinality {0}")]
    UnsupportedCardinality(usize),

    #[error("shape mismatch: expected length {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("mode {mode} out of range for an order-{order} tensor (modes are 1-based)")]
    ModeOutOfRange { mode: usize, order: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("pilot erasure: first entry of the dominant direction is numerically zero")]
    PilotErasure,

    #[error("bit count mismatch: expected {expected} payload bits, got {got}")]
    BitCount { expected: usize, got: usize },

    #[error("symbol at branch {branch}, position {position} is not a point of the assigned set")]
    InvalidSymbol { branch: usize, position: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("framing error: observation length {0} is not a multiple of 2")]
    Framing(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("target BER {0:e} is not bracketed by the curve; refusing to extrapolate")]
    NotBracketed(f64),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Coarse classification used by the CLI for exit codes.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidCardinality(_)
                | Error::InvalidArgument(_)
                | Error::InvalidConfig(_)
                | Error::Json(_)
        )
    }
}
