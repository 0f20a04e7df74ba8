//! Random well-conditioned instances and policies for property checks.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::instance::{
    InitKind, InitialStateModel, InstanceParts, LqrInstance, NoiseKind, NoiseModel, PolicySequence, StateCostCheck,
};
use crate::linalg::{symmetrize, Mat};

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, sd: f64) -> Mat {
    DMatrix::from_fn(rows, cols, |_, _| sd * rng.sample::<f64, _>(StandardNormal))
}

/// `MMᵀ/n + floor·I`.
pub fn random_spd<R: Rng + ?Sized>(rng: &mut R, n: usize, floor: f64) -> Mat {
    let m = gaussian_matrix(rng, n, n, 1.0);
    symmetrize(&(&m * m.transpose() / n as f64 + Mat::identity(n, n) * floor))
}

/// Lower-triangular factor with positive diagonal, so `FFᵀ` is definite.
fn random_factor<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Mat {
    let mut f = gaussian_matrix(rng, n, n, 0.3);
    for i in 0..n {
        for j in i + 1..n {
            f[(i, j)] = 0.0;
        }
        f[(i, i)] = 0.5 + rng.random::<f64>();
    }
    f
}

/// Instance with definite `Q_t`, `R_t`, `W` and `Σ₀`. `A` has spectral scale
/// near one so costs stay moderate over short horizons.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, d: usize, k: usize, horizon: usize) -> LqrInstance {
    let a = gaussian_matrix(rng, d, d, 0.9 / (d as f64).sqrt());
    let b = gaussian_matrix(rng, d, k, 1.0 / (d as f64).sqrt());
    let q = (0..=horizon).map(|_| random_spd(rng, d, 0.2)).collect();
    let r = (0..horizon).map(|_| random_spd(rng, k, 0.2)).collect();
    let noise_kind = if rng.random_bool(0.5) { NoiseKind::Gaussian } else { NoiseKind::UniformScaled };
    let noise = NoiseModel { kind: noise_kind, factor: random_factor(rng, d), scale: 0.3 + 0.5 * rng.random::<f64>() };
    let init = InitialStateModel {
        kind: InitKind::Gaussian,
        factor: random_factor(rng, d),
        mean: DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal)),
        scale: 0.5 + rng.random::<f64>(),
    };
    LqrInstance::new(InstanceParts { a, b, q, r, noise, init, state_cost: StateCostCheck::Definite })
        .expect("random instance is valid by construction")
}

/// Gains with i.i.d. `N(0, sd²)` entries.
pub fn random_policy<R: Rng + ?Sized>(rng: &mut R, inst: &LqrInstance, sd: f64) -> PolicySequence {
    let (k, d) = (inst.control_dim(), inst.state_dim());
    PolicySequence::new((0..inst.horizon()).map(|_| gaussian_matrix(rng, k, d, sd)).collect()).expect("finite gains")
}

/// `base` plus i.i.d. `N(0, sd²)` perturbations.
pub fn perturb_policy<R: Rng + ?Sized>(rng: &mut R, base: &PolicySequence, sd: f64) -> PolicySequence {
    let (k, d) = base.shape();
    let dir: Vec<Mat> = (0..base.len()).map(|_| gaussian_matrix(rng, k, d, sd)).collect();
    base.axpy(1.0, &dir)
}
