//! Almgren-Chriss reference schedule: the `ε = 0` embedding solved exactly.

use lqrlab_core::{closed_loop, exact_cost, solve_riccati, DVector, LqrInstance, PolicySequence, RiccatiSolution};

use crate::error::LiqError;
use crate::params::{ac_to_lqr, AcParams};

#[derive(Debug, Clone, PartialEq)]
pub struct AcReference {
    pub policy: PolicySequence,
    pub riccati: RiccatiSolution,
    /// Optimal mean-variance cost including [`AcParams::cost_offset`].
    pub cost: f64,
    /// Expected inventory `E[q_0..q_T]` under `policy`.
    pub expected_inventory: Vec<f64>,
}

/// `E[x_0..x_T]`, propagated through the closed loop (the noise has mean zero).
pub fn mean_path(inst: &LqrInstance, policy: &PolicySequence) -> Vec<DVector<f64>> {
    let mut x = inst.init().mean.clone();
    let mut out = Vec::with_capacity(policy.len() + 1);
    for k in policy.iter() {
        let next = closed_loop(inst, k) * &x;
        out.push(x);
        x = next;
    }
    out.push(x);
    out
}

pub fn expected_inventory(inst: &LqrInstance, policy: &PolicySequence) -> Vec<f64> {
    mean_path(inst, policy).iter().map(|x| x[1]).collect()
}

/// Solves the embedding with `ε` forced to 0. `R_t = δ > 0` keeps every
/// Cholesky step well posed although `Q` is only semidefinite.
pub fn almgren_chriss_reference(p: &AcParams) -> Result<AcReference, LiqError> {
    let inst = ac_to_lqr(&p.with_epsilon(0.0))?;
    let riccati = solve_riccati(&inst)?;
    let policy = riccati.k_star.clone();
    let expected_inventory = expected_inventory(&inst, &policy);
    Ok(AcReference { cost: riccati.optimal_cost + p.cost_offset(), policy, riccati, expected_inventory })
}

/// Optimal costs with and without the price regularizer, both including the
/// constant offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizerGap {
    pub c_lqr: f64,
    pub c_ac: f64,
    /// Cost of the regularized optimum evaluated without the regularizer.
    pub c_lqr_policy_unregularized: f64,
}

impl RegularizerGap {
    /// `|C_LQR(ε) − C_AC| / C_AC`.
    pub fn relative(&self) -> f64 {
        (self.c_lqr - self.c_ac).abs() / self.c_ac.abs()
    }
}

pub fn regularizer_gap(p: &AcParams) -> Result<RegularizerGap, LiqError> {
    let reg = solve_riccati(&ac_to_lqr(p)?)?;
    let ac = almgren_chriss_reference(p)?;
    let plain = ac_to_lqr(&p.with_epsilon(0.0))?;
    Ok(RegularizerGap {
        c_lqr: reg.optimal_cost + p.cost_offset(),
        c_ac: ac.cost,
        c_lqr_policy_unregularized: exact_cost(&plain, &reg.k_star) + p.cost_offset(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(phi: f64, sigma: f64) -> AcParams {
        AcParams { gamma: 0.0, beta: 1.0, sigma, phi, epsilon: 0.0, horizon: 3, q0: 12.0, q0_sd: 0.0, s0: 10.0 }
    }

    /// Integer-grid dynamic program over `Σ_t [φσ²q_t² + δu_t²] + δq_T²`.
    fn grid_dp(p: &AcParams) -> Vec<f64> {
        let n = p.q0 as usize;
        let (delta, hold) = (p.delta(), p.phi * p.sigma * p.sigma);
        let mut value: Vec<f64> = (0..=n).map(|q| delta * (q * q) as f64).collect();
        let mut choice = vec![vec![0usize; n + 1]; p.horizon];
        for t in (0..p.horizon).rev() {
            let mut next = vec![0.0; n + 1];
            for q in 0..=n {
                let (mut best, mut arg) = (f64::INFINITY, 0);
                for u in 0..=q {
                    let v = delta * (u * u) as f64 + value[q - u];
                    if v < best {
                        (best, arg) = (v, u);
                    }
                }
                next[q] = hold * (q * q) as f64 + best;
                choice[t][q] = arg;
            }
            value = next;
        }
        let mut q = n;
        let mut path = vec![q as f64];
        for c in &choice {
            q -= c[q];
            path.push(q as f64);
        }
        path
    }

    #[test]
    fn risk_neutral_schedule_matches_grid_dp() {
        let p = small(0.0, 0.5);
        let dp = grid_dp(&p);
        assert_eq!(dp, vec![12.0, 9.0, 6.0, 3.0]);
        let r = almgren_chriss_reference(&p).unwrap();
        for (a, b) in r.expected_inventory.iter().zip(&dp) {
            assert!((a - b).abs() < 1e-9, "{:?}", r.expected_inventory);
        }
    }

    #[test]
    fn zero_volatility_removes_risk_aversion() {
        let base = almgren_chriss_reference(&small(0.0, 0.0)).unwrap();
        let averse = almgren_chriss_reference(&small(3.0, 0.0)).unwrap();
        assert_eq!(base.expected_inventory, averse.expected_inventory);
        assert_eq!(base.cost, averse.cost);
    }

    #[test]
    fn risk_aversion_front_loads() {
        let neutral = almgren_chriss_reference(&small(0.0, 0.5)).unwrap();
        let averse = almgren_chriss_reference(&small(2.0, 0.5)).unwrap();
        for t in 1..3 {
            assert!(averse.expected_inventory[t] < neutral.expected_inventory[t]);
        }
    }

    #[test]
    fn aapl_regularizer_is_close() {
        let gap = regularizer_gap(&AcParams::aapl()).unwrap();
        assert!(gap.relative() < 1e-2, "{gap:?}");
        assert!(gap.c_lqr_policy_unregularized >= gap.c_ac * (1.0 - 1e-12));
    }
}
