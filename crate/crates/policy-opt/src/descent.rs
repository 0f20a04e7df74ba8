//! Descent engine shared by the exact and model-free loops.
//!
//! The engine steps with whatever direction a [`DirectionSource`] supplies and
//! reports every iterate through a [`Monitor`], which may hold the exact model.
//! Sources that are not allowed to see the model simply never receive it.

use lqrlab_core::{exact_cost, exact_gradient, linalg::sum_fro_sq, LqrInstance, Mat, PolicySequence};

use crate::benchmark::Benchmark;
use crate::config::DescentConfig;
use crate::error::OptError;
use crate::projection::ProjectionSet;
use crate::trace::{DescentTrace, EstimateInfo, TraceRecord};

/// Costs above this multiple of the initial cost abort the run.
pub const DIVERGENCE_FACTOR: f64 = 1e12;
/// Backtracking gives up below this step size.
pub const MIN_STEP: f64 = 1e-15;

/// Direction proposed for one iterate.
#[derive(Debug, Clone)]
pub struct Step {
    pub direction: Vec<Mat>,
    pub estimate: Option<EstimateInfo>,
}

pub trait DirectionSource {
    type Error: From<OptError>;

    fn direction(&mut self, iter: usize, policy: &PolicySequence) -> Result<Step, Self::Error>;

    /// Cost of a trial point for backtracking. Sources that only see
    /// trajectories return `None`, which forbids line search.
    fn trial_cost(&mut self, _policy: &PolicySequence) -> Option<f64> {
        None
    }
}

/// Exact gradient `∇C(K)` from the model.
pub struct ExactDirection<'a> {
    pub inst: &'a LqrInstance,
}

impl DirectionSource for ExactDirection<'_> {
    type Error = OptError;

    fn direction(&mut self, _iter: usize, policy: &PolicySequence) -> Result<Step, OptError> {
        Ok(Step { direction: exact_gradient(self.inst, policy).grad, estimate: None })
    }

    fn trial_cost(&mut self, policy: &PolicySequence) -> Option<f64> {
        Some(exact_cost(self.inst, policy))
    }
}

/// What the monitor knows about one iterate.
#[derive(Debug, Clone)]
pub struct Report {
    pub cost: f64,
    /// `NaN` when no optimum is available.
    pub normalized_error: f64,
    /// Exact gradient, when a model is available.
    pub grad: Option<Vec<Mat>>,
}

/// Reporting hook called on every iterate. It never feeds the step.
pub trait Monitor {
    fn report(&self, policy: &PolicySequence) -> Report;
}

/// Reporting oracle backed by the exact model and its Riccati optimum.
pub struct ExactMonitor<'a> {
    inst: &'a LqrInstance,
    bench: Benchmark,
}

impl<'a> ExactMonitor<'a> {
    pub fn new(inst: &'a LqrInstance) -> Result<Self, OptError> {
        Ok(Self { inst, bench: Benchmark::new(inst)? })
    }

    pub fn benchmark(&self) -> &Benchmark {
        &self.bench
    }
}

impl Monitor for ExactMonitor<'_> {
    fn report(&self, policy: &PolicySequence) -> Report {
        let g = exact_gradient(self.inst, policy);
        Report { cost: g.cost, normalized_error: self.bench.normalize(g.cost), grad: Some(g.grad) }
    }
}

/// `Σ_t ‖G_t(K)‖_F²` with `G(K) = (Π(K − η∇) − K)/(2η)`.
pub fn gradient_mapping_sq(
    set: &ProjectionSet,
    policy: &PolicySequence,
    grad: &[Mat],
    eta: f64,
) -> Result<f64, OptError> {
    let moved = set.project(&policy.axpy(-eta, grad))?;
    Ok(moved.diff(policy).iter().map(|d| (d / (2.0 * eta)).norm_squared()).sum())
}

/// Runs `K ← Π(K − η·direction)` until the normalized error target, the
/// gradient tolerance or `max_iters` is reached. Records iterates `0..=N`.
pub fn descend<M: Monitor, S: DirectionSource>(
    monitor: &M,
    policy0: &PolicySequence,
    cfg: &DescentConfig,
    set: &ProjectionSet,
    source: &mut S,
) -> Result<(PolicySequence, DescentTrace), S::Error> {
    cfg.validate()?;
    set.validate()?;
    if !set.contains(policy0) {
        return Err(OptError::NotInSet.into());
    }
    let mut policy = policy0.clone();
    let mut trace = DescentTrace::default();
    let mut initial_cost = None;
    for iter in 0..=cfg.max_iters {
        let rep = monitor.report(&policy);
        let c0 = *initial_cost.get_or_insert(rep.cost);
        if !rep.cost.is_finite() || rep.cost.abs() > DIVERGENCE_FACTOR * c0.abs() {
            return Err(OptError::Diverged { iter, cost: rep.cost }.into());
        }
        let grad_fro_norm = rep.grad.as_deref().map_or(f64::NAN, |g| sum_fro_sq(g).sqrt());
        let grad_mapping_sq = match (&rep.grad, set.is_unconstrained()) {
            (Some(g), false) => Some(gradient_mapping_sq(set, &policy, g, cfg.step_size)?),
            _ => None,
        };
        trace.records.push(TraceRecord {
            iter,
            cost: rep.cost,
            normalized_error: rep.normalized_error,
            grad_fro_norm,
            eta: cfg.step_size,
            grad_mapping_sq,
            estimate: None,
        });
        let done = rep.normalized_error <= cfg.target_normalized_error
            || cfg.grad_tolerance.is_some_and(|tol| grad_fro_norm <= tol)
            || iter == cfg.max_iters;
        if done {
            break;
        }

        let step = source.direction(iter, &policy)?;
        let mut eta = cfg.step_size;
        let next = loop {
            let cand = set.project(&policy.axpy(-eta, &step.direction))?;
            if !cfg.line_search {
                break cand;
            }
            let trial = source
                .trial_cost(&cand)
                .ok_or_else(|| OptError::InvalidConfig("line search needs a source with cost access".into()))?;
            let decrease = sum_fro_sq(&cand.diff(&policy)) / eta;
            if trial <= rep.cost - cfg.armijo_constant * decrease && (trial < rep.cost || decrease == 0.0) {
                break cand;
            }
            eta *= cfg.backtracking_factor;
            if eta < MIN_STEP {
                return Err(OptError::StepSizeUnderflow { iter, eta }.into());
            }
        };
        let last = trace.records.last_mut().expect("record pushed above");
        last.eta = eta;
        last.estimate = step.estimate;
        policy = next;
    }
    Ok((policy, trace))
}

/// Plain gradient descent with exact gradients.
pub fn run_exact_pg(
    inst: &LqrInstance,
    policy0: &PolicySequence,
    cfg: &DescentConfig,
) -> Result<(PolicySequence, DescentTrace), OptError> {
    run_exact_ppg(inst, policy0, cfg, &ProjectionSet::Unconstrained)
}

/// Projected gradient descent with exact gradients.
pub fn run_exact_ppg(
    inst: &LqrInstance,
    policy0: &PolicySequence,
    cfg: &DescentConfig,
    set: &ProjectionSet,
) -> Result<(PolicySequence, DescentTrace), OptError> {
    inst.check_policy(policy0)?;
    let monitor = ExactMonitor::new(inst)?;
    descend(&monitor, policy0, cfg, set, &mut ExactDirection { inst })
}
