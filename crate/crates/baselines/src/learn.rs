//! Backward-sweep Q-learning and greedy evaluation.

use lqrlab_core::{derive_seed, rng_for, LqrInstance};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::BaselineError;
use crate::qtable::{bin_center, bin_of, check_scalar, QTable};

/// How state-action cells are chosen within one layer of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exploration {
    /// `n_s·n_a` cells drawn uniformly with replacement.
    #[default]
    Uniform,
    /// Every cell exactly once, in index order.
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SweepStats {
    /// Simulated transitions, one per update.
    pub updates: u64,
    /// Next states that fell outside `[−1, 1]` and were clamped.
    pub out_of_grid: u64,
}

impl SweepStats {
    fn add(&mut self, other: SweepStats) {
        self.updates += other.updates;
        self.out_of_grid += other.out_of_grid;
    }
}

fn check_table(table: &QTable, inst: &LqrInstance) -> Result<(), BaselineError> {
    check_scalar(inst)?;
    if table.horizon() != inst.horizon() {
        return Err(BaselineError::HorizonMismatch { table: table.horizon(), instance: inst.horizon() });
    }
    Ok(())
}

/// One sweep of `q ← (1−η̃)q + η̃[c_t(x,u) + min_{u′} q_{t+1}(x′,u′)]`, backward
/// in `t` so each layer bootstraps from the already updated next layer.
/// States and actions sit at bin centers; `x′` is binned after simulation.
pub fn q_learning_step(
    table: &QTable,
    inst: &LqrInstance,
    eta: f64,
    seed: u64,
) -> Result<(QTable, SweepStats), BaselineError> {
    q_learning_step_with(table, inst, eta, seed, Exploration::Uniform)
}

pub fn q_learning_step_with(
    table: &QTable,
    inst: &LqrInstance,
    eta: f64,
    seed: u64,
    exploration: Exploration,
) -> Result<(QTable, SweepStats), BaselineError> {
    check_table(table, inst)?;
    if !(0.0..=1.0).contains(&eta) {
        return Err(BaselineError::InvalidRate(eta));
    }
    let (n_s, n_a) = (table.state_bins(), table.action_bins());
    let (a, b) = (inst.a()[(0, 0)], inst.b()[(0, 0)]);
    let mut next = table.clone();
    let mut stats = SweepStats::default();
    for t in (0..table.horizon()).rev() {
        let minima = next.row_minima(t + 1);
        let (qt, rt) = (inst.q(t)[(0, 0)], inst.r(t)[(0, 0)]);
        let mut rng = rng_for(derive_seed(seed, &[t as u64]));
        for n in 0..n_s * n_a {
            let (i, j) = match exploration {
                Exploration::Uniform => (rng.random_range(0..n_s), rng.random_range(0..n_a)),
                Exploration::Exhaustive => (n / n_a, n % n_a),
            };
            let (x, u) = (bin_center(i, n_s), bin_center(j, n_a));
            let w = inst.noise().sample(&mut rng)[0];
            let (bin, outside) = bin_of(a * x + b * u + w, n_s);
            stats.out_of_grid += outside as u64;
            let target = qt * x * x + rt * u * u + minima[bin];
            let cell = next.get_mut(t, i, j);
            *cell = (1.0 - eta) * *cell + eta * target;
        }
        stats.updates += (n_s * n_a) as u64;
    }
    Ok((next, stats))
}

/// Runs `sweeps` sweeps from a fresh table; sweep `s` uses `derive_seed(seed, [s])`.
pub fn train(
    inst: &LqrInstance,
    n_s: usize,
    n_a: usize,
    eta: f64,
    sweeps: usize,
    seed: u64,
) -> Result<(QTable, SweepStats), BaselineError> {
    let mut table = QTable::new(inst, n_s, n_a)?;
    let mut total = SweepStats::default();
    for s in 0..sweeps {
        let (t, stats) = q_learning_step(&table, inst, eta, derive_seed(seed, &[s as u64]))?;
        table = t;
        total.add(stats);
    }
    Ok((table, total))
}

/// Realized cost of one greedy rollout. Draw order matches the core simulator:
/// `x_0`, then `w_0..w_{T-1}`.
fn greedy_rollout(table: &QTable, inst: &LqrInstance, seed: u64) -> f64 {
    let (n_s, n_a) = (table.state_bins(), table.action_bins());
    let (a, b) = (inst.a()[(0, 0)], inst.b()[(0, 0)]);
    let mut rng = rng_for(seed);
    let mut x = inst.init().sample(&mut rng)[0];
    let mut cost = 0.0;
    for t in 0..table.horizon() {
        let u = bin_center(table.greedy_action(t, bin_of(x, n_s).0), n_a);
        let w = inst.noise().sample(&mut rng)[0];
        cost += inst.q(t)[(0, 0)] * x * x + inst.r(t)[(0, 0)] * u * u;
        x = a * x + b * u + w;
    }
    cost + inst.q(table.horizon())[(0, 0)] * x * x
}

/// Mean realized cost of the greedy policy over `n_rollouts` seeded rollouts;
/// rollout `n` uses `derive_seed(seed, [n])`.
pub fn greedy_policy_cost(
    table: &QTable,
    inst: &LqrInstance,
    n_rollouts: usize,
    seed: u64,
) -> Result<f64, BaselineError> {
    check_table(table, inst)?;
    let costs: Vec<f64> =
        (0..n_rollouts as u64).into_par_iter().map(|n| greedy_rollout(table, inst, derive_seed(seed, &[n]))).collect();
    Ok(costs.iter().sum::<f64>() / n_rollouts as f64)
}

/// Simulator transitions consumed by `sweeps` sweeps.
pub fn qlearning_samples(horizon: usize, n_s: usize, n_a: usize, sweeps: usize) -> u64 {
    (horizon * n_s * n_a * sweeps) as u64
}

/// Largest sweep count that stays within `budget` transitions.
pub fn sweeps_for_budget(horizon: usize, n_s: usize, n_a: usize, budget: u64) -> usize {
    (budget / qlearning_samples(horizon, n_s, n_a, 1).max(1)) as usize
}
