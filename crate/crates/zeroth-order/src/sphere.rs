//! Uniform draws on the Frobenius sphere `{U : ‖U‖_F = r}`.

use lqrlab_core::Mat;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::ZoError;

const MAX_REDRAWS: usize = 100;

/// Standard normal entries rescaled to norm `r`; rotational invariance of the
/// Gaussian makes the direction uniform.
pub fn sample_sphere<R: Rng + ?Sized>(k: usize, d: usize, r: f64, rng: &mut R) -> Result<Mat, ZoError> {
    for _ in 0..MAX_REDRAWS {
        let g = Mat::from_fn(k, d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = g.norm();
        if norm >= 1e-30 {
            return Ok(g * (r / norm));
        }
    }
    Err(ZoError::DegenerateDraw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use lqrlab_core::rng_for;

    #[test]
    fn norm_is_exact() {
        let mut rng = rng_for(1);
        for _ in 0..1000 {
            let u = sample_sphere(2, 3, 0.7, &mut rng).unwrap();
            assert!((u.norm() - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_and_isotropy() {
        let (k, d, r, n) = (1, 2, 0.5, 1_000_000usize);
        let dim = (k * d) as f64;
        let mut rng = rng_for(2);
        let mut mean = Mat::zeros(k, d);
        let mut second = Mat::zeros(2, 2);
        for _ in 0..n {
            let u = sample_sphere(k, d, r, &mut rng).unwrap();
            mean += &u;
            let v = [u[(0, 0)], u[(0, 1)]];
            for i in 0..2 {
                for j in 0..2 {
                    second[(i, j)] += dim * v[i] * v[j] / (r * r);
                }
            }
        }
        mean /= n as f64;
        second /= n as f64;
        let bound = 4.0 * r / (n as f64 * dim).sqrt();
        assert!(mean.iter().all(|m| m.abs() < bound), "{mean}");
        // Entries of D·vec(U)vec(U)ᵀ/r² lie in [0, D]; 4σ of the mean is below 4·D/√n.
        let tol = 4.0 * dim / (n as f64).sqrt();
        assert!((&second - Mat::identity(2, 2)).amax() < tol, "{second}");
    }
}
