//! Model-free policy optimization: sphere sampling, the single-rollout
//! smoothed gradient estimator, and model-free (projected) policy gradient.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod descent;
pub mod error;
pub mod estimate;
pub mod sampler;
pub mod sphere;

pub use descent::{
    rollouts_per_iteration, run_modelfree_pg, run_modelfree_ppg, run_modelfree_with, run_modelfree_with_oracle,
    GradientOracle, ZerothOrderDirection,
};
pub use error::ZoError;
pub use estimate::{estimate_gradient, smoothed_gradient_reference, GradientEstimate, SmoothingConfig};
pub use sampler::{LqrSimulator, RolloutSampler};
pub use sphere::sample_sphere;
