use thiserror::Error;

/// Failures raised by the core kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("matrix {what} is not positive definite (index {index})")]
    NonPositiveDefinite { what: &'static str, index: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operator decomposition needs horizon >= 2, got {horizon}")]
    HorizonTooShort { horizon: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("config: {0}")]
    Config(String),
}

impl CoreError {
    /// Short variant name, used in run manifests.
    pub fn name(&self) -> &'static str {
        match self {
            CoreError::NonPositiveDefinite { .. } => "NonPositiveDefinite",
            CoreError::DimensionMismatch(_) => "DimensionMismatch",
            CoreError::HorizonTooShort { .. } => "HorizonTooShort",
            CoreError::InvalidInstance(_) => "InvalidInstance",
            CoreError::Config(_) => "Config",
        }
    }
}
