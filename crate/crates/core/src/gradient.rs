//! Exact policy gradient `∇_t C = 2E_tΣ_t`.

use crate::covariance::{covariance_profile, CovarianceProfile};
use crate::instance::{LqrInstance, PolicySequence};
use crate::linalg::{symmetrize, Mat};
use crate::value::{backup_value, ValueBackup};

#[derive(Debug, Clone, PartialEq)]
pub struct ExactGradient {
    /// `∇_t C(K)`, each `k×d`.
    pub grad: Vec<Mat>,
    /// `E_t = (R_t + BᵀP_{t+1}B)K_t − BᵀP_{t+1}A`.
    pub e: Vec<Mat>,
    pub cost: f64,
    pub backup: ValueBackup,
    pub profile: CovarianceProfile,
}

/// `H_t = R_t + BᵀP_{t+1}B` for a given backup.
pub fn gain_curvature(inst: &LqrInstance, backup: &ValueBackup, t: usize) -> Mat {
    symmetrize(&(inst.r(t) + inst.b().transpose() * &backup.p[t + 1] * inst.b()))
}

pub fn exact_gradient(inst: &LqrInstance, policy: &PolicySequence) -> ExactGradient {
    let backup = backup_value(inst, policy);
    let profile = covariance_profile(inst, policy);
    let mut grad = Vec::with_capacity(inst.horizon());
    let mut e = Vec::with_capacity(inst.horizon());
    for t in 0..inst.horizon() {
        let h = gain_curvature(inst, &backup, t);
        let et = &h * &policy[t] - inst.b().transpose() * &backup.p[t + 1] * inst.a();
        grad.push(&et * &profile.sigma[t] * 2.0);
        e.push(et);
    }
    let cost = backup.cost(inst);
    ExactGradient { grad, e, cost, backup, profile }
}
