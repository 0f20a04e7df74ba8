use lqrlab_core::CoreError;
use lqrlab_opt::OptError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LiqError {
    #[error("temporary impact must exceed half the permanent impact (delta = {delta:e})")]
    NonPositiveDelta { delta: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("order of {requested} shares exceeds displayed depth {available}")]
    InsufficientDepth { requested: f64, available: f64 },
    #[error("impact regression needs at least two distinct flow imbalances")]
    DegenerateDesign,
    #[error("queue length must be positive")]
    ZeroQueue,
    #[error("invalid book: {0}")]
    InvalidBook(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Opt(#[from] OptError),
}

impl LiqError {
    pub fn name(&self) -> &'static str {
        match self {
            LiqError::NonPositiveDelta { .. } => "NonPositiveDelta",
            LiqError::InvalidParams(_) => "InvalidParams",
            LiqError::InsufficientDepth { .. } => "InsufficientDepth",
            LiqError::DegenerateDesign => "DegenerateDesign",
            LiqError::ZeroQueue => "ZeroQueue",
            LiqError::InvalidBook(_) => "InvalidBook",
            LiqError::Csv(_) => "Csv",
            LiqError::Core(e) => e.name(),
            LiqError::Opt(e) => e.name(),
        }
    }
}

impl From<csv::Error> for LiqError {
    fn from(e: csv::Error) -> Self {
        LiqError::Csv(e.to_string())
    }
}
