use lqrlab_core::CoreError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BaselineError {
    #[error("tabular Q-learning needs a scalar instance, got d={d}, k={k}")]
    NotScalar { d: usize, k: usize },
    #[error("grid needs at least one state and one action bin")]
    EmptyGrid,
    #[error("learning rate {0} must lie in [0, 1]")]
    InvalidRate(f64),
    #[error("table horizon {table} does not match instance horizon {instance}")]
    HorizonMismatch { table: usize, instance: usize },
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl BaselineError {
    pub fn name(&self) -> &'static str {
        match self {
            BaselineError::NotScalar { .. } => "NotScalar",
            BaselineError::EmptyGrid => "EmptyGrid",
            BaselineError::InvalidRate(_) => "InvalidRate",
            BaselineError::HorizonMismatch { .. } => "HorizonMismatch",
            BaselineError::Csv(_) => "Csv",
            BaselineError::Core(e) => e.name(),
        }
    }
}

impl From<csv::Error> for BaselineError {
    fn from(e: csv::Error) -> Self {
        BaselineError::Csv(e.to_string())
    }
}
