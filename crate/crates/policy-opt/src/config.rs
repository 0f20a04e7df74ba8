use serde::{Deserialize, Serialize};

use crate::error::OptError;

/// Step-size and stopping rules shared by every descent loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescentConfig {
    pub step_size: f64,
    pub max_iters: usize,
    #[serde(default = "default_target")]
    pub target_normalized_error: f64,
    #[serde(default)]
    pub line_search: bool,
    #[serde(default = "default_backtracking")]
    pub backtracking_factor: f64,
    #[serde(default = "default_armijo")]
    pub armijo_constant: f64,
    /// Stop once the full gradient Frobenius norm drops below this.
    #[serde(default)]
    pub grad_tolerance: Option<f64>,
}

fn default_target() -> f64 {
    1e-12
}
fn default_backtracking() -> f64 {
    0.5
}
fn default_armijo() -> f64 {
    1e-4
}

impl DescentConfig {
    /// Constant step, no line search, run for `max_iters`.
    pub fn constant(step_size: f64, max_iters: usize) -> Self {
        Self {
            step_size,
            max_iters,
            target_normalized_error: default_target(),
            line_search: false,
            backtracking_factor: default_backtracking(),
            armijo_constant: default_armijo(),
            grad_tolerance: None,
        }
    }

    pub fn with_line_search(mut self) -> Self {
        self.line_search = true;
        self
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.target_normalized_error = target;
        self
    }

    pub fn validate(&self) -> Result<(), OptError> {
        let bad = |s: &str| Err(OptError::InvalidConfig(s.into()));
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return bad("step_size must be positive");
        }
        if !(self.target_normalized_error > 0.0) {
            return bad("target_normalized_error must be positive");
        }
        if !(self.backtracking_factor > 0.0 && self.backtracking_factor < 1.0) {
            return bad("backtracking_factor must lie in (0, 1)");
        }
        if !(self.armijo_constant > 0.0 && self.armijo_constant < 1.0) {
            return bad("armijo_constant must lie in (0, 1)");
        }
        if self.grad_tolerance.is_some_and(|g| !(g >= 0.0)) {
            return bad("grad_tolerance must be nonnegative");
        }
        Ok(())
    }
}
