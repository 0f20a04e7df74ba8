//! Simulation access for model-free learners.

use lqrlab_core::{rollout_cost, LqrInstance, PolicySequence};

/// The only view of the system a model-free learner gets: run one seeded
/// episode under a policy and observe its total cost.
pub trait RolloutSampler: Sync {
    fn horizon(&self) -> usize;
    /// `(k, d)` of each gain.
    fn gain_shape(&self) -> (usize, usize);
    fn rollout_cost(&self, policy: &PolicySequence, seed: u64) -> f64;
}

/// Opaque episode simulator over an LQR instance. It exposes no model data.
pub struct LqrSimulator<'a> {
    inst: &'a LqrInstance,
}

impl<'a> LqrSimulator<'a> {
    pub fn new(inst: &'a LqrInstance) -> Self {
        Self { inst }
    }
}

impl RolloutSampler for LqrSimulator<'_> {
    fn horizon(&self) -> usize {
        self.inst.horizon()
    }

    fn gain_shape(&self) -> (usize, usize) {
        (self.inst.control_dim(), self.inst.state_dim())
    }

    fn rollout_cost(&self, policy: &PolicySequence, seed: u64) -> f64 {
        rollout_cost(self.inst, policy, seed)
    }
}
