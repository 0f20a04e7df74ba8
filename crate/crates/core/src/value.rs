//! Policy evaluation: value matrices, noise offsets and exact cost.

use crate::instance::{LqrInstance, PolicySequence};
use crate::linalg::{symmetrize, trace_of_product, Mat};

#[derive(Debug, Clone, PartialEq)]
pub struct ValueBackup {
    /// `P_0..P_T` for the policy.
    pub p: Vec<Mat>,
    /// `L_0..L_T`, `L_t = L_{t+1} + tr(W·P_{t+1})`.
    pub l: Vec<f64>,
}

/// Closed-loop matrix `A − BK_t`.
pub fn closed_loop(inst: &LqrInstance, gain: &Mat) -> Mat {
    inst.a() - inst.b() * gain
}

/// `P_t = Q_t + K_tᵀR_tK_t + (A−BK_t)ᵀP_{t+1}(A−BK_t)`, backward from `P_T = Q_T`.
///
/// Panics if the policy does not match the instance dimensions.
pub fn backup_value(inst: &LqrInstance, policy: &PolicySequence) -> ValueBackup {
    inst.check_policy(policy).expect("policy/instance mismatch");
    let horizon = inst.horizon();
    let mut p = vec![Mat::zeros(0, 0); horizon + 1];
    let mut l = vec![0.0; horizon + 1];
    p[horizon] = inst.q(horizon).clone();
    for t in (0..horizon).rev() {
        let k = &policy[t];
        let acl = closed_loop(inst, k);
        let pt = inst.q(t) + k.transpose() * inst.r(t) * k + acl.transpose() * &p[t + 1] * &acl;
        l[t] = l[t + 1] + trace_of_product(inst.w(), &p[t + 1]);
        p[t] = symmetrize(&pt);
    }
    ValueBackup { p, l }
}

impl ValueBackup {
    /// `C(K) = tr(Σ₀P₀) + L₀`.
    pub fn cost(&self, inst: &LqrInstance) -> f64 {
        trace_of_product(inst.sigma0(), &self.p[0]) + self.l[0]
    }
}

/// Expected cost `C(K)`.
pub fn exact_cost(inst: &LqrInstance, policy: &PolicySequence) -> f64 {
    backup_value(inst, policy).cost(inst)
}
