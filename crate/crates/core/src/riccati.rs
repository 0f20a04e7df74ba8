//! Backward Riccati recursion for the optimal gains.

use crate::error::CoreError;
use crate::instance::{LqrInstance, PolicySequence};
use crate::linalg::{symmetrize, trace_of_product, Mat};

#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiSolution {
    /// `P*_0..P*_T`.
    pub p_star: Vec<Mat>,
    pub k_star: PolicySequence,
    pub optimal_cost: f64,
}

/// Solves `K*_t = (BᵀP_{t+1}B + R_t)⁻¹BᵀP_{t+1}A` backward from `P_T = Q_T`
/// with a Cholesky solve at every step.
pub fn solve_riccati(inst: &LqrInstance) -> Result<RiccatiSolution, CoreError> {
    let horizon = inst.horizon();
    let (a, b) = (inst.a(), inst.b());
    let mut p = vec![Mat::zeros(0, 0); horizon + 1];
    let mut k = vec![Mat::zeros(0, 0); horizon];
    p[horizon] = inst.q(horizon).clone();
    for t in (0..horizon).rev() {
        let pb = &p[t + 1] * b;
        let m = symmetrize(&(b.transpose() * &pb + inst.r(t)));
        let chol = m.cholesky().ok_or(CoreError::NonPositiveDefinite { what: "BᵀPB+R", index: t })?;
        let gain = chol.solve(&(pb.transpose() * a));
        let pt = inst.q(t) + a.transpose() * &p[t + 1] * a - a.transpose() * &pb * &gain;
        p[t] = symmetrize(&pt);
        k[t] = gain;
    }
    let optimal_cost = trace_of_product(inst.sigma0(), &p[0])
        + (0..horizon).map(|t| trace_of_product(inst.w(), &p[t + 1])).sum::<f64>();
    Ok(RiccatiSolution { p_star: p, k_star: PolicySequence::new(k)?, optimal_cost })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::scalar;
    use crate::presets;

    #[test]
    fn one_step_scalar_closed_form() {
        let sol = solve_riccati(&presets::one_step_scalar()).unwrap();
        assert!((sol.k_star[0][(0, 0)] - 0.5).abs() < 1e-12);
        assert!((sol.p_star[0][(0, 0)] - 1.5).abs() < 1e-12);
        assert_eq!(sol.p_star[1][(0, 0)], 1.0);
    }

    #[test]
    fn five_step_scalar_recursion() {
        // Scalar recursion worked out independently of this code.
        let k = [1.379526941105357, 0.7525874924798753, 0.45729095156749744, 0.27749304436960026, 0.1550387596899225];
        let p =
            [0.8897634705526787, 0.9525874924798756, 0.8859364273512462, 0.7549860887392006, 0.5875968992248062, 0.4];
        let sol = solve_riccati(&presets::scalar_five_step()).unwrap();
        for (t, (kt, e)) in sol.k_star.iter().zip(k).enumerate() {
            assert!((kt[(0, 0)] - e).abs() < 1e-10, "K_{t}");
        }
        for (t, (pt, e)) in sol.p_star.iter().zip(p).enumerate() {
            assert!((pt[(0, 0)] - e).abs() < 1e-10, "P_{t}");
        }
        assert!((sol.optimal_cost - 0.44708703783478076).abs() < 1e-10);
    }

    #[test]
    fn zero_input_matrix_gives_zero_gains() {
        let mut parts = presets::four_dim().into_parts();
        parts.b = Mat::zeros(4, 2);
        let sol = solve_riccati(&LqrInstance::new(parts).unwrap()).unwrap();
        assert!(sol.k_star.iter().all(|k| k.amax() == 0.0));
    }

    #[test]
    fn gains_reproducible_from_p_star() {
        let inst = presets::four_dim();
        let sol = solve_riccati(&inst).unwrap();
        for t in 0..inst.horizon() {
            let pb = &sol.p_star[t + 1] * inst.b();
            let m = inst.b().transpose() * &pb + inst.r(t);
            let resid = &m * &sol.k_star[t] - pb.transpose() * inst.a();
            assert!(resid.amax() < 1e-10 * (1.0 + m.amax()));
            assert!(crate::linalg::is_positive_definite(&sol.p_star[t]));
        }
        assert_eq!(sol.p_star[inst.horizon()], *inst.q(inst.horizon()));
        let _ = scalar(0.0);
    }
}
