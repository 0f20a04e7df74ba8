//! Model-free policy gradient: estimate from rollouts, then (project and) step.

use lqrlab_core::{derive_seed, LqrInstance, PolicySequence};
use lqrlab_opt::{
    descend, DescentConfig, DescentTrace, DirectionSource, EstimateInfo, ExactDirection, ExactMonitor, Monitor,
    ProjectionSet, Step,
};

use crate::error::ZoError;
use crate::estimate::{estimate_gradient, SmoothingConfig};
use crate::sampler::{LqrSimulator, RolloutSampler};

/// Zeroth-order direction built from sampler rollouts only. Iteration `n`
/// uses estimator seed `derive_seed(seed, [n])`.
pub struct ZerothOrderDirection<'a, S: RolloutSampler + ?Sized> {
    sampler: &'a S,
    cfg: SmoothingConfig,
    seed: u64,
}

impl<'a, S: RolloutSampler + ?Sized> ZerothOrderDirection<'a, S> {
    pub fn new(sampler: &'a S, cfg: SmoothingConfig, seed: u64) -> Self {
        Self { sampler, cfg, seed }
    }
}

impl<S: RolloutSampler + ?Sized> DirectionSource for ZerothOrderDirection<'_, S> {
    type Error = ZoError;

    fn direction(&mut self, iter: usize, policy: &PolicySequence) -> Result<Step, ZoError> {
        let est = estimate_gradient(self.sampler, policy, &self.cfg, derive_seed(self.seed, &[iter as u64]))?;
        let info = EstimateInfo { m: self.cfg.trajectories, r: self.cfg.radius, est_grad_fro_norm: est.fro_norm() };
        Ok(Step { direction: est.grad, estimate: Some(info) })
    }
}

/// Gradient source for the model-free loops.
#[derive(Debug, Clone, PartialEq)]
pub enum GradientOracle {
    Sampled(SmoothingConfig),
    /// The `m → ∞` limit: exact gradients in place of estimates.
    ExactLimit,
}

struct Adapted<'a>(ExactDirection<'a>);

impl DirectionSource for Adapted<'_> {
    type Error = ZoError;

    fn direction(&mut self, iter: usize, policy: &PolicySequence) -> Result<Step, ZoError> {
        Ok(self.0.direction(iter, policy)?)
    }
}

/// Generic model-free loop: the learner sees only `sampler`; `monitor` is the
/// separate reporting hook.
pub fn run_modelfree_with<M: Monitor, S: RolloutSampler + ?Sized>(
    monitor: &M,
    sampler: &S,
    policy0: &PolicySequence,
    descent: &DescentConfig,
    smoothing: &SmoothingConfig,
    set: &ProjectionSet,
    seed: u64,
) -> Result<(PolicySequence, DescentTrace), ZoError> {
    smoothing.validate()?;
    if policy0.len() != sampler.horizon() || policy0.shape() != sampler.gain_shape() {
        return Err(ZoError::InvalidConfig("initial policy does not match the sampler".into()));
    }
    let mut source = ZerothOrderDirection::new(sampler, smoothing.clone(), seed);
    descend(monitor, policy0, descent, set, &mut source)
}

/// Model-free projected policy gradient on an LQR instance with either
/// gradient oracle. The instance feeds only the reporting monitor and, in
/// the sampled case, an opaque simulator.
pub fn run_modelfree_with_oracle(
    inst: &LqrInstance,
    policy0: &PolicySequence,
    descent: &DescentConfig,
    oracle: &GradientOracle,
    set: &ProjectionSet,
    seed: u64,
) -> Result<(PolicySequence, DescentTrace), ZoError> {
    inst.check_policy(policy0)?;
    let monitor = ExactMonitor::new(inst)?;
    match oracle {
        GradientOracle::Sampled(smoothing) => {
            run_modelfree_with(&monitor, &LqrSimulator::new(inst), policy0, descent, smoothing, set, seed)
        }
        GradientOracle::ExactLimit => descend(&monitor, policy0, descent, set, &mut Adapted(ExactDirection { inst })),
    }
}

pub fn run_modelfree_pg(
    inst: &LqrInstance,
    policy0: &PolicySequence,
    descent: &DescentConfig,
    smoothing: &SmoothingConfig,
    seed: u64,
) -> Result<(PolicySequence, DescentTrace), ZoError> {
    run_modelfree_ppg(inst, policy0, descent, smoothing, &ProjectionSet::Unconstrained, seed)
}

pub fn run_modelfree_ppg(
    inst: &LqrInstance,
    policy0: &PolicySequence,
    descent: &DescentConfig,
    smoothing: &SmoothingConfig,
    set: &ProjectionSet,
    seed: u64,
) -> Result<(PolicySequence, DescentTrace), ZoError> {
    run_modelfree_with_oracle(inst, policy0, descent, &GradientOracle::Sampled(smoothing.clone()), set, seed)
}

/// Rollouts drawn per iteration: `T·m`.
pub fn rollouts_per_iteration(horizon: usize, smoothing: &SmoothingConfig) -> usize {
    horizon * smoothing.trajectories
}
