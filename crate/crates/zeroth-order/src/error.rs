use lqrlab_opt::OptError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZoError {
    #[error("sphere sampler produced a degenerate draw 100 times in a row")]
    DegenerateDraw,
    #[error("invalid smoothing configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Opt(#[from] OptError),
}

impl ZoError {
    pub fn name(&self) -> &'static str {
        match self {
            ZoError::DegenerateDraw => "DegenerateDraw",
            ZoError::InvalidConfig(_) => "InvalidConfig",
            ZoError::Opt(e) => e.name(),
        }
    }
}

impl From<lqrlab_core::CoreError> for ZoError {
    fn from(e: lqrlab_core::CoreError) -> Self {
        ZoError::Opt(OptError::Core(e))
    }
}
