//! Finite-horizon noisy LQR toolkit: instance types, the Riccati solver, exact
//! cost, covariance and gradient kernels, and seeded simulation.

pub mod config;
pub mod covariance;
pub mod error;
pub mod gradient;
pub mod instance;
pub mod linalg;
pub mod presets;
pub mod random;
pub mod riccati;
pub mod rng;
pub mod simulate;
pub mod value;

pub use covariance::{covariance_profile, operator_decomposition, CovarianceProfile, OperatorDecomposition};
pub use error::CoreError;
pub use gradient::{exact_gradient, gain_curvature, ExactGradient};
pub use instance::{
    scalar, InitKind, InitialStateModel, InstanceParts, LqrInstance, NoiseKind, NoiseModel, PolicySequence,
    StateCostCheck,
};
pub use linalg::Mat;
pub use nalgebra::{DMatrix, DVector};
pub use riccati::{solve_riccati, RiccatiSolution};
pub use rng::{derive_seed, rng_for};
pub use simulate::{pathwise_terms, rollout_cost, simulate_trajectory, PathwiseTerms, Trajectory};
pub use value::{backup_value, closed_loop, exact_cost, ValueBackup};
