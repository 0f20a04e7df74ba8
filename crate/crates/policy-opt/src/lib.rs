//! Exact-gradient policy optimization for finite-horizon LQR: plain and
//! projected gradient descent, constraint sets and the normalized-error metric.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmark;
pub mod config;
pub mod descent;
pub mod error;
pub mod projection;
pub mod trace;

pub use benchmark::{normalized_error, Benchmark};
pub use config::DescentConfig;
pub use descent::{
    descend, gradient_mapping_sq, run_exact_pg, run_exact_ppg, DirectionSource, ExactDirection, ExactMonitor, Monitor,
    Report, Step,
};
pub use error::OptError;
pub use projection::{in_triangle, project_triangle, ProjectionSet};
pub use trace::{DescentTrace, EstimateInfo, TraceRecord};
