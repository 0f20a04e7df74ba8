//! Impact estimation from trade data. Permanent impact and volatility come
//! from regressing mid-price changes on market-order flow imbalance (MFI),
//! `ΔS = γ·MFI + σε`; temporary impact from a flat-book queue length.

use lqrlab_core::rng_for;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::LiqError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImpactEstimate {
    pub gamma: f64,
    /// Residual standard deviation with `n − 1` degrees of freedom.
    pub sigma: f64,
    /// Standard error of `gamma`.
    pub gamma_se: f64,
    pub n: usize,
}

/// Least squares through the origin on `(ΔS, MFI)` pairs.
pub fn estimate_impact_params(trades: &[(f64, f64)]) -> Result<ImpactEstimate, LiqError> {
    let n = trades.len();
    if n < 2 || trades.iter().all(|t| t.1 == trades[0].1) {
        return Err(LiqError::DegenerateDesign);
    }
    if trades.iter().any(|t| !(t.0.is_finite() && t.1.is_finite())) {
        return Err(LiqError::InvalidParams("trade data must be finite".into()));
    }
    let sxx: f64 = trades.iter().map(|t| t.1 * t.1).sum();
    let sxy: f64 = trades.iter().map(|t| t.1 * t.0).sum();
    let gamma = sxy / sxx;
    let rss: f64 = trades.iter().map(|t| (t.0 - gamma * t.1).powi(2)).sum();
    let sigma = (rss / (n - 1) as f64).sqrt();
    Ok(ImpactEstimate { gamma, sigma, gamma_se: sigma / sxx.sqrt(), n })
}

/// `β = Δ/(2l)` for a flat book with tick `Δ` and queue `l` per level.
pub fn estimate_temporary_impact(tick: f64, mean_queue: f64) -> Result<f64, LiqError> {
    if !(mean_queue > 0.0) {
        return Err(LiqError::ZeroQueue);
    }
    if !(tick > 0.0 && tick.is_finite()) {
        return Err(LiqError::InvalidParams("tick must be positive".into()));
    }
    Ok(tick / (2.0 * mean_queue))
}

/// `n` synthetic `(ΔS, MFI)` windows with `MFI ~ N(0, mfi_sd²)` rounded to
/// whole shares and `ΔS = γ·MFI + σZ`.
pub fn synthetic_trades(gamma: f64, sigma: f64, mfi_sd: f64, n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = rng_for(seed);
    (0..n)
        .map(|_| {
            let mfi = (mfi_sd * rng.sample::<f64, _>(StandardNormal)).round();
            let noise: f64 = rng.sample(StandardNormal);
            (gamma * mfi + sigma * noise, mfi)
        })
        .collect()
}
