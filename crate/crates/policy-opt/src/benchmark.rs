//! Normalized error against the Riccati optimum.

use lqrlab_core::{exact_cost, solve_riccati, LqrInstance, PolicySequence, RiccatiSolution};

use crate::error::OptError;

/// Optimal costs at or below this cannot normalize an error.
pub const ZERO_COST_TOLERANCE: f64 = 1e-12;

/// Cached Riccati optimum for repeated normalization.
#[derive(Debug, Clone)]
pub struct Benchmark {
    pub solution: RiccatiSolution,
}

impl Benchmark {
    pub fn new(inst: &LqrInstance) -> Result<Self, OptError> {
        let solution = solve_riccati(inst)?;
        if solution.optimal_cost <= ZERO_COST_TOLERANCE {
            return Err(OptError::ZeroOptimalCost { cost: solution.optimal_cost });
        }
        Ok(Self { solution })
    }

    pub fn optimal_cost(&self) -> f64 {
        self.solution.optimal_cost
    }

    /// `(C − C*)/C*`.
    pub fn normalize(&self, cost: f64) -> f64 {
        (cost - self.solution.optimal_cost) / self.solution.optimal_cost
    }
}

/// `(C(K) − C(K*))/C(K*)` with both costs computed exactly.
pub fn normalized_error(inst: &LqrInstance, policy: &PolicySequence) -> Result<f64, OptError> {
    let bench = Benchmark::new(inst)?;
    Ok(bench.normalize(exact_cost(inst, policy)))
}
