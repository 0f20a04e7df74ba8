//! Single-rollout smoothed gradient estimator and its expected-cost reference.

use lqrlab_core::{derive_seed, exact_cost, rng_for, LqrInstance, Mat, PolicySequence};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ZoError;
use crate::sampler::RolloutSampler;
use crate::sphere::sample_sphere;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothingConfig {
    /// Sphere radius `r`.
    pub radius: f64,
    /// Rollouts `m` per step `t`.
    pub trajectories: usize,
}

impl SmoothingConfig {
    pub fn new(radius: f64, trajectories: usize) -> Self {
        Self { radius, trajectories }
    }

    pub fn validate(&self) -> Result<(), ZoError> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(ZoError::InvalidConfig("radius must be positive".into()));
        }
        if self.trajectories == 0 {
            return Err(ZoError::InvalidConfig("need at least one trajectory".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientEstimate {
    /// `∇̂_t C`, each `k×d`.
    pub grad: Vec<Mat>,
    /// Rollouts behind each `∇̂_t`.
    pub counts: Vec<usize>,
    /// Mean single-rollout cost of the perturbed policies for each `t`.
    pub mean_costs: Vec<f64>,
}

impl GradientEstimate {
    pub fn fro_norm(&self) -> f64 {
        lqrlab_core::linalg::sum_fro_sq(&self.grad).sqrt()
    }
}

/// Seed of draw `(t, i)`: `derive_seed(seed, [t, i])`, split into a sphere
/// stream (`[.., 0]`) and a rollout seed (`[.., 1]`).
fn draw_seeds(seed: u64, t: usize, i: usize) -> (u64, u64) {
    let s = derive_seed(seed, &[t as u64, i as u64]);
    (derive_seed(s, &[0]), derive_seed(s, &[1]))
}

/// `∇̂_t = (1/m)Σ_i (D/r²)·ĉ_t^i·U_t^i`, where `ĉ_t^i` is the full-episode cost
/// with only `K_t` replaced by `K_t + U_t^i`. Rollouts run in parallel; sums
/// are taken in index order.
pub fn estimate_gradient<S: RolloutSampler + ?Sized>(
    sampler: &S,
    policy: &PolicySequence,
    cfg: &SmoothingConfig,
    seed: u64,
) -> Result<GradientEstimate, ZoError> {
    cfg.validate()?;
    let horizon = sampler.horizon();
    let (k, d) = sampler.gain_shape();
    let m = cfg.trajectories;
    let r = cfg.radius;
    let scale = (k * d) as f64 / (r * r);
    let draws: Vec<(f64, Mat)> = (0..horizon * m)
        .into_par_iter()
        .map(|j| {
            let (t, i) = (j / m, j % m);
            let (sphere_seed, rollout_seed) = draw_seeds(seed, t, i);
            let u = sample_sphere(k, d, r, &mut rng_for(sphere_seed))?;
            let perturbed = policy.with_gain(t, &policy[t] + &u);
            Ok((sampler.rollout_cost(&perturbed, rollout_seed), u))
        })
        .collect::<Result<_, ZoError>>()?;
    let mut grad = Vec::with_capacity(horizon);
    let mut mean_costs = Vec::with_capacity(horizon);
    for chunk in draws.chunks(m) {
        let mut acc = Mat::zeros(k, d);
        let mut cost_sum = 0.0;
        for (c, u) in chunk {
            acc += u * (scale * c);
            cost_sum += c;
        }
        grad.push(acc / m as f64);
        mean_costs.push(cost_sum / m as f64);
    }
    Ok(GradientEstimate { grad, counts: vec![m; horizon], mean_costs })
}

/// Monte Carlo value of `(D/r²)·E_U[C(K with K_t + U)·U]` using exact costs.
pub fn smoothed_gradient_reference(
    inst: &LqrInstance,
    policy: &PolicySequence,
    t: usize,
    r: f64,
    n_samples: usize,
    seed: u64,
) -> Result<Mat, ZoError> {
    if !(r > 0.0) || n_samples == 0 {
        return Err(ZoError::InvalidConfig("need r > 0 and at least one sample".into()));
    }
    inst.check_policy(policy)?;
    let (k, d) = (inst.control_dim(), inst.state_dim());
    let scale = (k * d) as f64 / (r * r);
    let terms: Vec<Mat> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let (sphere_seed, _) = draw_seeds(seed, t, i);
            let u = sample_sphere(k, d, r, &mut rng_for(sphere_seed))?;
            let c = exact_cost(inst, &policy.with_gain(t, &policy[t] + &u));
            Ok(u * (scale * c))
        })
        .collect::<Result<_, ZoError>>()?;
    let sum = terms.iter().fold(Mat::zeros(k, d), |acc, m| acc + m);
    Ok(sum / n_samples as f64)
}
