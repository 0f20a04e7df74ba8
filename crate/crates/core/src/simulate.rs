//! Seeded trajectory rollouts.

use nalgebra::DVector;

use crate::instance::{LqrInstance, PolicySequence};
use crate::rng::rng_for;
use crate::value::{closed_loop, ValueBackup};

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `x_0..x_T`.
    pub states: Vec<DVector<f64>>,
    /// `u_0..u_{T-1}`.
    pub controls: Vec<DVector<f64>>,
    /// `w_0..w_{T-1}`.
    pub noises: Vec<DVector<f64>>,
    pub realized_cost: f64,
    pub seed: u64,
}

fn quad(x: &DVector<f64>, m: &nalgebra::DMatrix<f64>) -> f64 {
    x.dot(&(m * x))
}

/// One rollout under `u_t = −K_t x_t`. Draw order per seed: `x_0`, then `w_0..w_{T-1}`.
pub fn simulate_trajectory(inst: &LqrInstance, policy: &PolicySequence, seed: u64) -> Trajectory {
    inst.check_policy(policy).expect("policy/instance mismatch");
    let horizon = inst.horizon();
    let mut rng = rng_for(seed);
    let mut x = inst.init().sample(&mut rng);
    let mut states = Vec::with_capacity(horizon + 1);
    let mut controls = Vec::with_capacity(horizon);
    let mut noises = Vec::with_capacity(horizon);
    let mut cost = 0.0;
    for t in 0..horizon {
        let u = -(&policy[t] * &x);
        let w = inst.noise().sample(&mut rng);
        cost += quad(&x, inst.q(t)) + quad(&u, inst.r(t));
        let next = inst.a() * &x + inst.b() * &u + &w;
        states.push(x);
        controls.push(u);
        noises.push(w);
        x = next;
    }
    cost += quad(&x, inst.q(horizon));
    states.push(x);
    Trajectory { states, controls, noises, realized_cost: cost, seed }
}

/// Realized cost of the rollout [`simulate_trajectory`] would produce for
/// the same seed, without storing the path.
pub fn rollout_cost(inst: &LqrInstance, policy: &PolicySequence, seed: u64) -> f64 {
    let horizon = inst.horizon();
    let mut rng = rng_for(seed);
    let mut x = inst.init().sample(&mut rng);
    let mut cost = 0.0;
    for t in 0..horizon {
        let u = -(&policy[t] * &x);
        let w = inst.noise().sample(&mut rng);
        cost += quad(&x, inst.q(t)) + quad(&u, inst.r(t));
        x = inst.a() * &x + inst.b() * &u + w;
    }
    cost + quad(&x, inst.q(horizon))
}

/// Terms of the realized cost written through the value matrices:
/// `cost = x₀ᵀP₀x₀ + Σ_t [w_tᵀP_{t+1}w_t + 2w_tᵀP_{t+1}(A−BK_t)x_t]`.
/// The cross terms have zero mean but do not vanish along a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathwiseTerms {
    pub initial: f64,
    pub noise: f64,
    pub cross: f64,
}

impl PathwiseTerms {
    pub fn total(&self) -> f64 {
        self.initial + self.noise + self.cross
    }
}

pub fn pathwise_terms(
    inst: &LqrInstance,
    policy: &PolicySequence,
    backup: &ValueBackup,
    traj: &Trajectory,
) -> PathwiseTerms {
    let initial = quad(&traj.states[0], &backup.p[0]);
    let mut noise = 0.0;
    let mut cross = 0.0;
    for t in 0..inst.horizon() {
        let w = &traj.noises[t];
        let p = &backup.p[t + 1];
        noise += quad(w, p);
        cross += 2.0 * w.dot(&(p * (closed_loop(inst, &policy[t]) * &traj.states[t])));
    }
    PathwiseTerms { initial, noise, cross }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{scalar, NoiseModel};
    use crate::presets;
    use crate::value::{backup_value, exact_cost};

    #[test]
    fn same_seed_same_path() {
        let inst = presets::four_dim();
        let policy = PolicySequence::constant(inst.horizon(), nalgebra::DMatrix::from_element(2, 4, 0.05));
        let a = simulate_trajectory(&inst, &policy, 11);
        let b = simulate_trajectory(&inst, &policy, 11);
        assert_eq!(a, b);
        assert_eq!(a.realized_cost.to_bits(), rollout_cost(&inst, &policy, 11).to_bits());
        assert_ne!(a, simulate_trajectory(&inst, &policy, 12));
    }

    #[test]
    fn dynamics_hold_exactly() {
        let inst = presets::four_dim();
        let policy = PolicySequence::constant(inst.horizon(), nalgebra::DMatrix::from_element(2, 4, 0.05));
        let tr = simulate_trajectory(&inst, &policy, 5);
        for t in 0..inst.horizon() {
            assert_eq!(tr.controls[t], -(&policy[t] * &tr.states[t]));
            let next = inst.a() * &tr.states[t] + inst.b() * &tr.controls[t] + &tr.noises[t];
            assert_eq!(tr.states[t + 1], next);
        }
    }

    #[test]
    fn deterministic_system_matches_exact_cost() {
        let mut parts = presets::four_dim().into_parts();
        parts.noise = NoiseModel::zero(4);
        parts.init = crate::instance::InitialStateModel::point_mass(parts.init.mean.clone());
        let inst = LqrInstance::new(parts).unwrap();
        let policy = PolicySequence::constant(inst.horizon(), nalgebra::DMatrix::from_element(2, 4, 0.05));
        let c = simulate_trajectory(&inst, &policy, 0).realized_cost;
        let e = exact_cost(&inst, &policy);
        assert!((c - e).abs() < 1e-10 * e);
    }

    #[test]
    fn pathwise_terms_reconstruct_cost() {
        let inst = presets::scalar_five_step();
        let policy = PolicySequence::constant(5, scalar(0.3));
        let bk = backup_value(&inst, &policy);
        for seed in 0..100 {
            let tr = simulate_trajectory(&inst, &policy, seed);
            let terms = pathwise_terms(&inst, &policy, &bk, &tr);
            assert!((terms.total() - tr.realized_cost).abs() <= 1e-12 * (1.0 + tr.realized_cost));
        }
    }
}
