//! Tabular Q-learning on discretized scalar LQR, used as a sample-efficiency
//! baseline for policy gradient.

pub mod error;
pub mod learn;
pub mod qtable;

pub use error::BaselineError;
pub use learn::{
    greedy_policy_cost, q_learning_step, q_learning_step_with, qlearning_samples, sweeps_for_budget, train,
    Exploration, SweepStats,
};
pub use qtable::{bin_center, bin_of, QTable};
