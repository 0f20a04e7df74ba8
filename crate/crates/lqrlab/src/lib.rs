//! Experiment runner: TOML configs in, per-seed traces, cross-seed aggregates
//! and a manifest out.

pub mod artifacts;
pub mod config;
pub mod error;
pub mod experiments;
pub mod run;
pub mod seeds;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::{FailureClass, HarnessError};
pub use run::{run_config_text, run_experiment, RunOptions, RunOutcome};
pub use seeds::parse_seeds;
