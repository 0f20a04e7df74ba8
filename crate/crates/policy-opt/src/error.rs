use lqrlab_core::CoreError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptError {
    #[error("backtracking shrank the step below 1e-15 at iteration {iter}")]
    StepSizeUnderflow { iter: usize, eta: f64 },
    #[error("cost {cost:e} exceeded 1e12 times the initial cost at iteration {iter}")]
    Diverged { iter: usize, cost: f64 },
    #[error("initial policy is not in the constraint set")]
    NotInSet,
    #[error("constraint set is empty: {0}")]
    EmptySet(String),
    #[error("optimal cost {cost:e} is too small to normalize by")]
    ZeroOptimalCost { cost: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl OptError {
    /// Short variant name, used in run manifests.
    pub fn name(&self) -> &'static str {
        match self {
            OptError::StepSizeUnderflow { .. } => "StepSizeUnderflow",
            OptError::Diverged { .. } => "Diverged",
            OptError::NotInSet => "NotInSet",
            OptError::EmptySet(_) => "EmptySet",
            OptError::ZeroOptimalCost { .. } => "ZeroOptimalCost",
            OptError::InvalidConfig(_) => "InvalidConfig",
            OptError::Core(e) => e.name(),
        }
    }
}
