//! Almgren-Chriss liquidation parameters and their LQR embedding.
//!
//! State `x_t = (S_t, q_t)` (price, inventory), control `u_t` shares sold:
//! `S_{t+1} = S_t − γu_t + σZ_t`, `q_{t+1} = q_t − u_t`.

use lqrlab_core::{
    DVector, InitKind, InitialStateModel, InstanceParts, LqrInstance, Mat, NoiseModel, PolicySequence, StateCostCheck,
};
use lqrlab_opt::ProjectionSet;
use serde::{Deserialize, Serialize};

use crate::error::LiqError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcParams {
    /// Permanent impact γ (price per share).
    pub gamma: f64,
    /// Temporary impact β (price per share).
    pub beta: f64,
    /// Price volatility σ per step.
    pub sigma: f64,
    /// Risk aversion φ.
    pub phi: f64,
    /// Price-state regularizer ε.
    pub epsilon: f64,
    pub horizon: usize,
    /// Mean initial inventory.
    pub q0: f64,
    /// Standard deviation of the initial inventory; 0 gives a point mass.
    #[serde(default)]
    pub q0_sd: f64,
    /// Initial price.
    pub s0: f64,
}

/// Impact and volatility estimates for one ticker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TickerImpact {
    pub ticker: &'static str,
    pub beta: f64,
    pub gamma: f64,
    pub sigma: f64,
}

pub const TICKERS: [TickerImpact; 5] = [
    TickerImpact { ticker: "AAPL", beta: 1.03e-5, gamma: 7.27e-6, sigma: 0.107 },
    TickerImpact { ticker: "FB", beta: 1.30e-5, gamma: 1.40e-5, sigma: 0.115 },
    TickerImpact { ticker: "IBM", beta: 2.65e-5, gamma: 4.60e-5, sigma: 0.082 },
    TickerImpact { ticker: "JPM", beta: 9.28e-6, gamma: 1.65e-5, sigma: 0.059 },
    TickerImpact { ticker: "AAL", beta: 3.27e-5, gamma: 1.3310e-5, sigma: 0.042 },
];

pub fn ticker(name: &str) -> Option<TickerImpact> {
    TICKERS.iter().copied().find(|t| t.ticker.eq_ignore_ascii_case(name))
}

impl AcParams {
    /// Desk-scale AAPL setting: `φ = 5e-6`, `ε = 1e-8`, `T = 10`,
    /// `q₀ ~ N(500, 1)`, `S₀ = 200`.
    pub fn aapl() -> Self {
        let t = TICKERS[0];
        Self {
            gamma: t.gamma,
            beta: t.beta,
            sigma: t.sigma,
            phi: 5e-6,
            epsilon: 1e-8,
            horizon: 10,
            q0: 500.0,
            q0_sd: 1.0,
            s0: 200.0,
        }
    }

    /// `δ = β − γ/2`.
    pub fn delta(&self) -> f64 {
        self.beta - self.gamma / 2.0
    }

    pub fn validate(&self) -> Result<(), LiqError> {
        let fields = [
            ("gamma", self.gamma),
            ("beta", self.beta),
            ("sigma", self.sigma),
            ("phi", self.phi),
            ("epsilon", self.epsilon),
            ("q0_sd", self.q0_sd),
        ];
        for (name, v) in fields {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(LiqError::InvalidParams(format!("{name} must be finite and >= 0")));
            }
        }
        if !self.q0.is_finite() || !self.s0.is_finite() {
            return Err(LiqError::InvalidParams("q0 and s0 must be finite".into()));
        }
        if self.horizon == 0 {
            return Err(LiqError::InvalidParams("horizon must be at least 1".into()));
        }
        let delta = self.delta();
        if !(delta > 0.0) {
            return Err(LiqError::NonPositiveDelta { delta });
        }
        Ok(())
    }

    /// Policy-independent cost `(γ/2)·E[q₀²]` dropped from the LQR objective.
    pub fn cost_offset(&self) -> f64 {
        0.5 * self.gamma * (self.q0 * self.q0 + self.q0_sd * self.q0_sd)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self { epsilon, ..self.clone() }
    }
}

/// `A = I₂`, `B = (−γ, −1)ᵀ`, `W = diag(σ², 0)`, `Q_t = diag(ε, φσ²)`,
/// `Q_T = diag(ε, δ + φσ²)`, `R_t = δ`. Zero diagonal entries in `Q` switch on
/// the semidefinite waiver.
pub fn ac_to_lqr(p: &AcParams) -> Result<LqrInstance, LiqError> {
    p.validate()?;
    let delta = p.delta();
    let hold = p.phi * p.sigma * p.sigma;
    let diag = |a: f64, b: f64| Mat::from_diagonal(&DVector::from_vec(vec![a, b]));
    let mut q = vec![diag(p.epsilon, hold); p.horizon];
    q.push(diag(p.epsilon, delta + hold));
    let state_cost =
        if p.epsilon > 0.0 && hold > 0.0 { StateCostCheck::Definite } else { StateCostCheck::Semidefinite };
    let init = if p.q0_sd > 0.0 {
        InitialStateModel {
            kind: InitKind::Gaussian,
            factor: diag(0.0, 1.0),
            mean: DVector::from_vec(vec![p.s0, p.q0]),
            scale: p.q0_sd,
        }
    } else {
        InitialStateModel::point_mass(DVector::from_vec(vec![p.s0, p.q0]))
    };
    Ok(LqrInstance::new(InstanceParts {
        a: Mat::identity(2, 2),
        b: Mat::from_column_slice(2, 1, &[-p.gamma, -1.0]),
        q,
        r: vec![Mat::from_element(1, 1, delta); p.horizon],
        noise: NoiseModel::gaussian(diag(1.0, 0.0), p.sigma),
        init,
        state_cost,
    })?)
}

/// `γ̄k¹_t + k²_t ≥ −1+ζ`, `k¹_t ≤ 0`, `k²_t ≤ 0` for every `t`.
pub fn membership_s(policy: &PolicySequence, gamma_bar: f64, zeta: f64) -> bool {
    liquidation_set(gamma_bar, zeta).contains(policy)
}

pub fn liquidation_set(gamma_bar: f64, zeta: f64) -> ProjectionSet {
    ProjectionSet::liquidation(gamma_bar, zeta)
}

/// Constant gain `(k¹, k²)` at every step.
pub fn constant_gain(horizon: usize, k1: f64, k2: f64) -> PolicySequence {
    PolicySequence::constant(horizon, Mat::from_row_slice(1, 2, &[k1, k2]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aapl_embedding_values() {
        let p = AcParams::aapl();
        assert!((p.delta() - 6.665e-6).abs() < 1e-18);
        let inst = ac_to_lqr(&p).unwrap();
        assert!((inst.r(0)[(0, 0)] - 6.665e-6).abs() < 1e-18);
        assert!((inst.q(0)[(1, 1)] - 5.7245e-8).abs() < 1e-20);
        assert_eq!(inst.q(0)[(0, 0)], 1e-8);
        assert!((inst.q(10)[(1, 1)] - (6.665e-6 + 5.7245e-8)).abs() < 1e-18);
        assert!((inst.w()[(0, 0)] - 0.011449).abs() < 1e-15);
        assert_eq!(inst.w()[(1, 1)], 0.0);
        assert_eq!(inst.parts().state_cost, StateCostCheck::Definite);
    }

    #[test]
    fn zero_regularizer_and_risk_aversion() {
        let mut p = AcParams::aapl();
        p.epsilon = 0.0;
        p.phi = 0.0;
        let inst = ac_to_lqr(&p).unwrap();
        assert_eq!(inst.q(0).amax(), 0.0);
        assert_eq!(inst.q(10)[(1, 1)], p.delta());
        assert_eq!(inst.q(10)[(0, 0)], 0.0);
    }

    #[test]
    fn delta_must_be_positive() {
        let mut p = AcParams::aapl();
        p.beta = p.gamma / 2.0;
        assert!(matches!(ac_to_lqr(&p), Err(LiqError::NonPositiveDelta { .. })));
    }

    #[test]
    fn membership_examples() {
        assert!(membership_s(&constant_gain(10, -0.2, -0.2), 5e-5, 1e-12));
        assert!(!membership_s(&constant_gain(10, 0.1, -0.2), 5e-5, 1e-12));
        assert!(!membership_s(&constant_gain(10, -0.2, -1.5), 5e-5, 1e-12));
    }

    #[test]
    fn ticker_lookup() {
        assert_eq!(ticker("aapl").unwrap().sigma, 0.107);
        assert!(ticker("XYZ").is_none());
    }
}
