use lqrlab_baselines::BaselineError;
use lqrlab_core::CoreError;
use lqrlab_liquidation::LiqError;
use lqrlab_opt::OptError;
use lqrlab_zo::ZoError;
use thiserror::Error;

/// Whether a failure is the caller's fault (exit 2) or the computation's (exit 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureClass {
    Config,
    Numerical,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
    #[error("{module}: {message}")]
    Module { module: &'static str, name: &'static str, message: String, class: FailureClass },
}

impl HarnessError {
    pub fn config(msg: impl Into<String>) -> Self {
        HarnessError::Config(msg.into())
    }

    pub fn class(&self) -> FailureClass {
        match self {
            HarnessError::Config(_) | HarnessError::Io(_) => FailureClass::Config,
            HarnessError::Module { class, .. } => *class,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.class() {
            FailureClass::Config => 2,
            FailureClass::Numerical => 3,
        }
    }

    pub fn module(&self) -> &'static str {
        match self {
            HarnessError::Config(_) | HarnessError::Io(_) => "harness-cli",
            HarnessError::Module { module, .. } => module,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            HarnessError::Config(_) => "Config",
            HarnessError::Io(_) => "Io",
            HarnessError::Module { name, .. } => name,
        }
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}

fn module(module: &'static str, name: &'static str, message: String, class: FailureClass) -> HarnessError {
    HarnessError::Module { module, name, message, class }
}

fn core_class(e: &CoreError) -> FailureClass {
    match e {
        CoreError::NonPositiveDefinite { .. } => FailureClass::Numerical,
        _ => FailureClass::Config,
    }
}

fn opt_class(e: &OptError) -> FailureClass {
    match e {
        OptError::StepSizeUnderflow { .. } | OptError::Diverged { .. } | OptError::ZeroOptimalCost { .. } => {
            FailureClass::Numerical
        }
        OptError::NotInSet | OptError::EmptySet(_) | OptError::InvalidConfig(_) => FailureClass::Config,
        OptError::Core(c) => core_class(c),
    }
}

impl From<CoreError> for HarnessError {
    fn from(e: CoreError) -> Self {
        module("lqr-core", e.name(), e.to_string(), core_class(&e))
    }
}

impl From<OptError> for HarnessError {
    fn from(e: OptError) -> Self {
        match e {
            OptError::Core(c) => c.into(),
            e => module("policy-opt", e.name(), e.to_string(), opt_class(&e)),
        }
    }
}

impl From<ZoError> for HarnessError {
    fn from(e: ZoError) -> Self {
        match e {
            ZoError::Opt(o) => o.into(),
            ZoError::DegenerateDraw => module("zeroth-order", e.name(), e.to_string(), FailureClass::Numerical),
            ZoError::InvalidConfig(_) => module("zeroth-order", e.name(), e.to_string(), FailureClass::Config),
        }
    }
}

impl From<LiqError> for HarnessError {
    fn from(e: LiqError) -> Self {
        let class = match &e {
            LiqError::Core(c) => return c.clone().into(),
            LiqError::Opt(o) => return o.clone().into(),
            LiqError::InsufficientDepth { .. } | LiqError::DegenerateDesign => FailureClass::Numerical,
            _ => FailureClass::Config,
        };
        module("liquidation", e.name(), e.to_string(), class)
    }
}

impl From<BaselineError> for HarnessError {
    fn from(e: BaselineError) -> Self {
        match e {
            BaselineError::Core(c) => c.into(),
            e => module("baselines", e.name(), e.to_string(), FailureClass::Config),
        }
    }
}
