//! Synthetic bid book: Bachelier mid price, tick-aligned levels, queues
//! regenerated around level-dependent means every step.

use lqrlab_core::{derive_seed, rng_for, PolicySequence};
use lqrlab_opt::{Monitor, Report};
use lqrlab_zo::RolloutSampler;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::book::LobSnapshot;
use crate::error::LiqError;
use crate::execution::{execute_policy, implementation_shortfall, ExecutionRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticBookConfig {
    pub horizon: usize,
    /// Initial mid price.
    pub s0: f64,
    pub tick: f64,
    /// Mean queue per level, best bid first.
    pub mean_queue: Vec<f64>,
    /// Queues are drawn uniformly in `mean·[1 − jitter, 1 + jitter]`, `0 ≤ jitter < 1`.
    #[serde(default)]
    pub queue_jitter: f64,
    /// Mid-price volatility per step.
    pub volatility: f64,
    /// Mid-price drop per share sold.
    #[serde(default)]
    pub permanent_impact: f64,
    pub q0: f64,
    #[serde(default)]
    pub q0_sd: f64,
    /// Holding-cost weight φ′.
    pub phi_prime: f64,
}

impl SyntheticBookConfig {
    /// Flat book with `levels` queues of `queue` shares.
    pub fn flat(horizon: usize, s0: f64, tick: f64, levels: usize, queue: f64, q0: f64) -> Self {
        Self {
            horizon,
            s0,
            tick,
            mean_queue: vec![queue; levels],
            queue_jitter: 0.0,
            volatility: 0.0,
            permanent_impact: 0.0,
            q0,
            q0_sd: 0.0,
            phi_prime: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), LiqError> {
        let bad = |s: &str| Err(LiqError::InvalidParams(s.into()));
        if self.horizon == 0 {
            return bad("horizon must be at least 1");
        }
        if !(self.tick > 0.0) || self.mean_queue.is_empty() || self.mean_queue.iter().any(|&v| !(v > 0.0)) {
            return bad("tick and mean queues must be positive");
        }
        if !(0.0..1.0).contains(&self.queue_jitter) {
            return bad("queue_jitter must lie in [0, 1)");
        }
        for v in [self.volatility, self.permanent_impact, self.q0_sd, self.phi_prime] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad("volatility, impact, q0_sd and phi_prime must be finite and >= 0");
            }
        }
        if !(self.q0 >= 0.0) {
            return bad("q0 must be nonnegative");
        }
        let min_depth: f64 = self.mean_queue.iter().map(|v| v * (1.0 - self.queue_jitter)).sum();
        if min_depth < self.q0 + 6.0 * self.q0_sd {
            return bad("book depth cannot absorb the initial inventory");
        }
        Ok(())
    }

    fn book_at<R: Rng + ?Sized>(&self, mid: f64, rng: &mut R) -> Result<LobSnapshot, LiqError> {
        let best = self.tick * (mid / self.tick).floor();
        let levels = self
            .mean_queue
            .iter()
            .enumerate()
            .map(|(j, &mean)| {
                let jitter =
                    if self.queue_jitter > 0.0 { rng.random_range(-self.queue_jitter..self.queue_jitter) } else { 0.0 };
                ((best - j as f64 * self.tick), (mean * (1.0 + jitter)).round().max(1.0))
            })
            .collect();
        LobSnapshot::new(levels, self.tick)
    }

    /// Book path and mids for one seed. Draw order: initial inventory, then
    /// per step the queues followed by the price shock.
    fn path(&self, policy: &PolicySequence, seed: u64) -> Result<ExecutionRecord, LiqError> {
        let mut rng = rng_for(seed);
        let q0 = if self.q0_sd > 0.0 {
            (self.q0 + self.q0_sd * rng.sample::<f64, _>(StandardNormal)).max(0.0)
        } else {
            self.q0
        };
        // Sales depend on the path, so books are generated as the execution runs.
        let mut books = Vec::with_capacity(self.horizon + 1);
        let mut mids = Vec::with_capacity(self.horizon + 1);
        let mut mid = self.s0;
        let mut q = q0;
        for t in 0..=self.horizon {
            books.push(self.book_at(mid, &mut rng)?);
            mids.push(mid);
            if t < self.horizon {
                let want = crate::execution::feedback_sale(policy, t, mid, q);
                let u = want.clamp(0.0, q.max(0.0));
                q -= u;
                mid += self.volatility * rng.sample::<f64, _>(StandardNormal) - self.permanent_impact * u;
            }
        }
        execute_policy(&books, &mids, q0, self.phi_prime, policy)
    }
}

/// Runs `policy` on one synthetic book path.
pub fn simulate_lob(
    cfg: &SyntheticBookConfig,
    policy: &PolicySequence,
    seed: u64,
) -> Result<ExecutionRecord, LiqError> {
    cfg.validate()?;
    if policy.len() != cfg.horizon || policy.shape() != (1, 2) {
        return Err(LiqError::InvalidParams("policy must have T gains of shape 1x2".into()));
    }
    cfg.path(policy, seed)
}

/// Episode access to the synthetic book for model-free learners. The episode
/// cost is `Σ_{t<T} c_t(u_t) + c_T(residual)`.
pub struct LobSimulator {
    cfg: SyntheticBookConfig,
}

impl LobSimulator {
    pub fn new(cfg: SyntheticBookConfig) -> Result<Self, LiqError> {
        cfg.validate()?;
        Ok(Self { cfg })
    }

    pub fn config(&self) -> &SyntheticBookConfig {
        &self.cfg
    }
}

impl RolloutSampler for LobSimulator {
    fn horizon(&self) -> usize {
        self.cfg.horizon
    }

    fn gain_shape(&self) -> (usize, usize) {
        (1, 2)
    }

    fn rollout_cost(&self, policy: &PolicySequence, seed: u64) -> f64 {
        // Validation guarantees enough depth, so a failure here is not expected.
        self.cfg.path(policy, seed).map_or(f64::NAN, |r| r.total_cost())
    }
}

/// Reports the mean implementation shortfall over fixed evaluation paths.
pub struct ShortfallMonitor<'a> {
    sim: &'a LobSimulator,
    seeds: Vec<u64>,
}

impl<'a> ShortfallMonitor<'a> {
    pub fn new(sim: &'a LobSimulator, root_seed: u64, paths: usize) -> Self {
        Self { sim, seeds: (0..paths as u64).map(|i| derive_seed(root_seed, &[i])).collect() }
    }

    pub fn mean_shortfall(&self, policy: &PolicySequence) -> f64 {
        let values: Vec<f64> = self
            .seeds
            .par_iter()
            .map(|&s| self.sim.cfg.path(policy, s).map_or(f64::NAN, |r| implementation_shortfall(&r)))
            .collect();
        values.iter().sum::<f64>() / values.len() as f64
    }
}

impl Monitor for ShortfallMonitor<'_> {
    fn report(&self, policy: &PolicySequence) -> Report {
        Report { cost: self.mean_shortfall(policy), normalized_error: f64::NAN, grad: None }
    }
}
