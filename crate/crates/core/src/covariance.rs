//! State second-moment profile and its operator decomposition.

use crate::error::CoreError;
use crate::instance::{LqrInstance, PolicySequence};
use crate::linalg::{min_eigenvalue, symmetrize, Mat};
use crate::value::closed_loop;

/// Below this `σ_min(Σ_t)` the profile is reported as degenerate.
pub const DEGENERATE_SIGMA: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceProfile {
    /// `Σ_t = E[x_t x_tᵀ]`, `t = 0..=T`.
    pub sigma: Vec<Mat>,
    /// `Σ_K = Σ_t Σ_t`.
    pub sigma_k: Mat,
}

impl CovarianceProfile {
    /// `σ_x = min_t λ_min(Σ_t)`; warns when below [`DEGENERATE_SIGMA`].
    pub fn sigma_x(&self) -> f64 {
        let s = self.sigma.iter().map(min_eigenvalue).fold(f64::INFINITY, f64::min);
        if s < DEGENERATE_SIGMA {
            log::warn!("degenerate state covariance: sigma_x = {s:e}");
        }
        s
    }
}

/// Forward recursion `Σ_{t+1} = (A−BK_t)Σ_t(A−BK_t)ᵀ + W`.
pub fn covariance_profile(inst: &LqrInstance, policy: &PolicySequence) -> CovarianceProfile {
    inst.check_policy(policy).expect("policy/instance mismatch");
    let horizon = inst.horizon();
    let mut sigma = Vec::with_capacity(horizon + 1);
    sigma.push(inst.sigma0().clone());
    for t in 0..horizon {
        let acl = closed_loop(inst, &policy[t]);
        let next = &acl * &sigma[t] * acl.transpose() + inst.w();
        sigma.push(symmetrize(&next));
    }
    let d = inst.state_dim();
    let sigma_k = sigma.iter().fold(Mat::zeros(d, d), |acc, s| acc + s);
    CovarianceProfile { sigma, sigma_k }
}

/// The two parts of `Σ_K = 𝒯_K(Σ₀) + Δ(K, W)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorDecomposition {
    /// `𝒯_K(Σ₀) = Σ₀ + Σ_{t<T} Φ_t Σ₀ Φ_tᵀ` with `Φ_t = (A−BK_t)···(A−BK_0)`.
    pub t_k_sigma0: Mat,
    /// `Σ_{t=1}^{T-1} Σ_{s=1}^{t} D_{t,s} W D_{t,s}ᵀ + T·W` with `D_{t,s} = (A−BK_t)···(A−BK_s)`.
    pub delta: Mat,
}

/// Ordered product `(A−BK_hi)···(A−BK_lo)`.
fn chain(closed: &[Mat], lo: usize, hi: usize) -> Mat {
    let mut m = closed[lo].clone();
    for c in &closed[lo + 1..=hi] {
        m = c * m;
    }
    m
}

/// Builds both parts directly from closed-loop products, independently of
/// [`covariance_profile`].
pub fn operator_decomposition(inst: &LqrInstance, policy: &PolicySequence) -> Result<OperatorDecomposition, CoreError> {
    let horizon = inst.horizon();
    if horizon < 2 {
        return Err(CoreError::HorizonTooShort { horizon });
    }
    inst.check_policy(policy)?;
    let closed: Vec<Mat> = policy.iter().map(|k| closed_loop(inst, k)).collect();
    let s0 = inst.sigma0();
    let mut t_k = s0.clone();
    for t in 0..horizon {
        let phi = chain(&closed, 0, t);
        t_k += &phi * s0 * phi.transpose();
    }
    let w = inst.w();
    let mut delta = w * horizon as f64;
    for t in 1..horizon {
        for s in 1..=t {
            let dts = chain(&closed, s, t);
            delta += &dts * w * dts.transpose();
        }
    }
    Ok(OperatorDecomposition { t_k_sigma0: t_k, delta })
}
