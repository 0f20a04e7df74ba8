//! Problem data: dynamics, stage costs, noise and initial-state models, policies.

use std::ops::Index;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::linalg::{is_positive_definite, is_positive_semidefinite, spectral_norm, Mat};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Distribution of the standardized per-coordinate draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    Gaussian,
    /// Uniform on `[-√3, √3]` per coordinate (unit variance).
    UniformScaled,
    Zero,
}

/// Additive process noise `w_t = σ_w·W̃·v_t` with `v_t` i.i.d. unit variance.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub factor: Mat,
    pub scale: f64,
}

impl NoiseModel {
    pub fn gaussian(factor: Mat, scale: f64) -> Self {
        Self { kind: NoiseKind::Gaussian, factor, scale }
    }

    pub fn uniform(factor: Mat, scale: f64) -> Self {
        Self { kind: NoiseKind::UniformScaled, factor, scale }
    }

    pub fn zero(d: usize) -> Self {
        Self { kind: NoiseKind::Zero, factor: Mat::zeros(d, d), scale: 0.0 }
    }

    /// `W = σ_w²·W̃·W̃ᵀ` (zero for the `Zero` kind).
    pub fn covariance(&self) -> Mat {
        match self.kind {
            NoiseKind::Zero => Mat::zeros(self.factor.nrows(), self.factor.nrows()),
            _ => &self.factor * self.factor.transpose() * (self.scale * self.scale),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let d = self.factor.nrows();
        match self.kind {
            NoiseKind::Zero => DVector::zeros(d),
            kind => {
                let v = standard_draw(kind, d, rng) * self.scale;
                &self.factor * v
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    Gaussian,
    UniformScaled,
    PointMass,
}

/// `x_0 = μ₀ + σ₀·W̃₀·z₀`; the point mass ignores factor and scale.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialStateModel {
    pub kind: InitKind,
    pub factor: Mat,
    pub mean: DVector<f64>,
    pub scale: f64,
}

impl InitialStateModel {
    pub fn gaussian(mean: DVector<f64>, factor: Mat, scale: f64) -> Self {
        Self { kind: InitKind::Gaussian, factor, mean, scale }
    }

    pub fn point_mass(mean: DVector<f64>) -> Self {
        let d = mean.len();
        Self { kind: InitKind::PointMass, factor: Mat::zeros(d, d), mean, scale: 0.0 }
    }

    /// Full second moment `Σ₀ = E[x₀x₀ᵀ] = μ₀μ₀ᵀ + σ₀²W̃₀W̃₀ᵀ`.
    pub fn second_moment(&self) -> Mat {
        let outer = &self.mean * self.mean.transpose();
        match self.kind {
            InitKind::PointMass => outer,
            _ => outer + &self.factor * self.factor.transpose() * (self.scale * self.scale),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        match self.kind {
            InitKind::PointMass => self.mean.clone(),
            InitKind::Gaussian => {
                let z = standard_draw(NoiseKind::Gaussian, self.mean.len(), rng) * self.scale;
                &self.mean + &self.factor * z
            }
            InitKind::UniformScaled => {
                let z = standard_draw(NoiseKind::UniformScaled, self.mean.len(), rng) * self.scale;
                &self.mean + &self.factor * z
            }
        }
    }
}

fn standard_draw<R: Rng + ?Sized>(kind: NoiseKind, d: usize, rng: &mut R) -> DVector<f64> {
    match kind {
        NoiseKind::Gaussian => DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal)),
        NoiseKind::UniformScaled => DVector::from_fn(d, |_, _| rng.random_range(-SQRT3..SQRT3)),
        NoiseKind::Zero => DVector::zeros(d),
    }
}

/// Feedback gains `K_0..K_{T-1}`, each `k×d`, applied as `u_t = -K_t x_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicySequence {
    gains: Vec<Mat>,
}

impl PolicySequence {
    pub fn new(gains: Vec<Mat>) -> Result<Self, CoreError> {
        if gains.is_empty() {
            return Err(CoreError::InvalidInstance("policy has no gains".into()));
        }
        let (k, d) = gains[0].shape();
        if gains.iter().any(|g| g.shape() != (k, d)) {
            return Err(CoreError::DimensionMismatch("gains differ in shape".into()));
        }
        if gains.iter().any(|g| g.iter().any(|v| !v.is_finite())) {
            return Err(CoreError::InvalidInstance("policy has non-finite entries".into()));
        }
        Ok(Self { gains })
    }

    /// Same gain at every step.
    pub fn constant(horizon: usize, gain: Mat) -> Self {
        Self { gains: vec![gain; horizon] }
    }

    pub fn zeros(horizon: usize, k: usize, d: usize) -> Self {
        Self::constant(horizon, Mat::zeros(k, d))
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }

    pub fn gains(&self) -> &[Mat] {
        &self.gains
    }

    pub fn into_gains(self) -> Vec<Mat> {
        self.gains
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Mat> {
        self.gains.iter()
    }

    /// `(k, d)` of every gain.
    pub fn shape(&self) -> (usize, usize) {
        self.gains[0].shape()
    }

    /// Copy with `K_t` replaced.
    pub fn with_gain(&self, t: usize, gain: Mat) -> Self {
        let mut gains = self.gains.clone();
        gains[t] = gain;
        Self { gains }
    }

    /// `self + alpha·dir`, stepwise.
    pub fn axpy(&self, alpha: f64, dir: &[Mat]) -> Self {
        let gains = self.gains.iter().zip(dir).map(|(k, g)| k + g * alpha).collect();
        Self { gains }
    }

    /// Stepwise difference `self − other`.
    pub fn diff(&self, other: &PolicySequence) -> Vec<Mat> {
        self.gains.iter().zip(&other.gains).map(|(a, b)| a - b).collect()
    }

    /// `|||K||| = Σ_t ‖K_t‖` with the operator 2-norm.
    pub fn triple_norm(&self) -> f64 {
        self.gains.iter().map(spectral_norm).sum()
    }

    /// `Σ_t ‖K_t‖_F`.
    pub fn fro_norm_sum(&self) -> f64 {
        self.gains.iter().map(|g| g.norm()).sum()
    }
}

impl Index<usize> for PolicySequence {
    type Output = Mat;
    fn index(&self, t: usize) -> &Mat {
        &self.gains[t]
    }
}

/// How strictly the state-cost matrices are validated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateCostCheck {
    /// Every `Q_t` positive definite.
    #[default]
    Definite,
    /// Waiver: `Q_t` only positive semidefinite. `R_t` must still be definite.
    Semidefinite,
}

/// Raw fields of an instance; build with [`LqrInstance::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceParts {
    pub a: Mat,
    pub b: Mat,
    /// `Q_0..Q_T`.
    pub q: Vec<Mat>,
    /// `R_0..R_{T-1}`.
    pub r: Vec<Mat>,
    pub noise: NoiseModel,
    pub init: InitialStateModel,
    pub state_cost: StateCostCheck,
}

/// A validated finite-horizon LQR problem `x_{t+1} = Ax_t + Bu_t + w_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LqrInstance {
    parts: InstanceParts,
    w: Mat,
    sigma0: Mat,
}

impl LqrInstance {
    pub fn new(parts: InstanceParts) -> Result<Self, CoreError> {
        validate(&parts)?;
        let w = crate::linalg::symmetrize(&parts.noise.covariance());
        let sigma0 = crate::linalg::symmetrize(&parts.init.second_moment());
        Ok(Self { parts, w, sigma0 })
    }

    pub fn parts(&self) -> &InstanceParts {
        &self.parts
    }

    pub fn into_parts(self) -> InstanceParts {
        self.parts
    }

    pub fn state_dim(&self) -> usize {
        self.parts.a.nrows()
    }

    pub fn control_dim(&self) -> usize {
        self.parts.b.ncols()
    }

    pub fn horizon(&self) -> usize {
        self.parts.r.len()
    }

    pub fn a(&self) -> &Mat {
        &self.parts.a
    }

    pub fn b(&self) -> &Mat {
        &self.parts.b
    }

    pub fn q(&self, t: usize) -> &Mat {
        &self.parts.q[t]
    }

    pub fn r(&self, t: usize) -> &Mat {
        &self.parts.r[t]
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.parts.noise
    }

    pub fn init(&self) -> &InitialStateModel {
        &self.parts.init
    }

    /// Noise covariance `W`.
    pub fn w(&self) -> &Mat {
        &self.w
    }

    /// Initial second moment `Σ₀`.
    pub fn sigma0(&self) -> &Mat {
        &self.sigma0
    }

    /// Number of policy parameters `D = k·d` per step.
    pub fn gain_dim(&self) -> usize {
        self.state_dim() * self.control_dim()
    }

    /// `σ_R = min_t λ_min(R_t)`.
    pub fn sigma_r(&self) -> f64 {
        self.parts.r.iter().map(crate::linalg::min_eigenvalue).fold(f64::INFINITY, f64::min)
    }

    /// `σ_Q = min_t λ_min(Q_t)` over `t = 0..=T`.
    pub fn sigma_q(&self) -> f64 {
        self.parts.q.iter().map(crate::linalg::min_eigenvalue).fold(f64::INFINITY, f64::min)
    }

    /// Zero policy of matching shape.
    pub fn zero_policy(&self) -> PolicySequence {
        PolicySequence::zeros(self.horizon(), self.control_dim(), self.state_dim())
    }

    /// Dimension check for a policy against this instance.
    pub fn check_policy(&self, policy: &PolicySequence) -> Result<(), CoreError> {
        if policy.len() != self.horizon() {
            return Err(CoreError::DimensionMismatch(format!(
                "policy length {} vs horizon {}",
                policy.len(),
                self.horizon()
            )));
        }
        if policy.shape() != (self.control_dim(), self.state_dim()) {
            return Err(CoreError::DimensionMismatch(format!(
                "gain shape {:?} vs ({}, {})",
                policy.shape(),
                self.control_dim(),
                self.state_dim()
            )));
        }
        Ok(())
    }
}

fn is_symmetric(m: &Mat) -> bool {
    let tol = 1e-12 * (1.0 + m.amax());
    (m - m.transpose()).amax() <= tol
}

fn validate(p: &InstanceParts) -> Result<(), CoreError> {
    let bad = |s: String| Err(CoreError::DimensionMismatch(s));
    let d = p.a.nrows();
    if d == 0 || p.a.ncols() != d {
        return bad(format!("A is {:?}, expected square and non-empty", p.a.shape()));
    }
    let k = p.b.ncols();
    if k == 0 || p.b.nrows() != d {
        return bad(format!("B is {:?}, expected ({d}, k>0)", p.b.shape()));
    }
    let horizon = p.r.len();
    if horizon == 0 {
        return Err(CoreError::InvalidInstance("horizon must be at least 1".into()));
    }
    if p.q.len() != horizon + 1 {
        return bad(format!("{} state costs for horizon {horizon}, expected T+1", p.q.len()));
    }
    for (t, q) in p.q.iter().enumerate() {
        if q.shape() != (d, d) {
            return bad(format!("Q_{t} is {:?}", q.shape()));
        }
        if !is_symmetric(q) {
            return Err(CoreError::InvalidInstance(format!("Q_{t} is not symmetric")));
        }
        let ok = match p.state_cost {
            StateCostCheck::Definite => is_positive_definite(q),
            StateCostCheck::Semidefinite => is_positive_semidefinite(q),
        };
        if !ok {
            return Err(CoreError::NonPositiveDefinite { what: "Q", index: t });
        }
    }
    for (t, r) in p.r.iter().enumerate() {
        if r.shape() != (k, k) {
            return bad(format!("R_{t} is {:?}", r.shape()));
        }
        if !is_symmetric(r) {
            return Err(CoreError::InvalidInstance(format!("R_{t} is not symmetric")));
        }
        if !is_positive_definite(r) {
            return Err(CoreError::NonPositiveDefinite { what: "R", index: t });
        }
    }
    if p.noise.factor.shape() != (d, d) {
        return bad(format!("noise factor is {:?}", p.noise.factor.shape()));
    }
    if !(p.noise.scale >= 0.0 && p.noise.scale.is_finite()) {
        return Err(CoreError::InvalidInstance("noise scale must be finite and >= 0".into()));
    }
    if p.init.mean.len() != d || p.init.factor.shape() != (d, d) {
        return bad("initial-state model dimensions".into());
    }
    if !(p.init.scale >= 0.0 && p.init.scale.is_finite()) {
        return Err(CoreError::InvalidInstance("initial scale must be finite and >= 0".into()));
    }
    let finite = |m: &Mat| m.iter().all(|v| v.is_finite());
    if !finite(&p.a) || !finite(&p.b) || !p.init.mean.iter().all(|v| v.is_finite()) {
        return Err(CoreError::InvalidInstance("non-finite entries".into()));
    }
    Ok(())
}

/// Convenience for `1×1` matrices.
pub fn scalar(v: f64) -> Mat {
    DMatrix::from_element(1, 1, v)
}
