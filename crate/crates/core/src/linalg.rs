//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, SymmetricEigen};

pub type Mat = DMatrix<f64>;

/// `(M + Mᵀ)/2`.
pub fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn min_eigenvalue(m: &Mat) -> f64 {
    SymmetricEigen::new(symmetrize(m)).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Largest eigenvalue of the symmetric part of `m`.
pub fn max_eigenvalue(m: &Mat) -> f64 {
    SymmetricEigen::new(symmetrize(m)).eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Operator 2-norm (largest singular value).
pub fn spectral_norm(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// Scale-aware definiteness test: `λ_min > 1e-12·(1 + ‖M‖)`.
pub fn is_positive_definite(m: &Mat) -> bool {
    min_eigenvalue(m) > pd_tolerance(m)
}

/// `λ_min ≥ -1e-12·(1 + ‖M‖)`.
pub fn is_positive_semidefinite(m: &Mat) -> bool {
    min_eigenvalue(m) >= -pd_tolerance(m)
}

fn pd_tolerance(m: &Mat) -> f64 {
    1e-12 * (1.0 + spectral_norm(m))
}

/// `tr(XᵀY)`.
pub fn frobenius_inner(x: &Mat, y: &Mat) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b).sum()
}

/// `tr(X Y)` without forming the product.
pub fn trace_of_product(x: &Mat, y: &Mat) -> f64 {
    let n = x.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..x.ncols() {
            s += x[(i, j)] * y[(j, i)];
        }
    }
    s
}

/// `Σ_t ‖M_t‖_F²` over a sequence.
pub fn sum_fro_sq(ms: &[Mat]) -> f64 {
    ms.iter().map(|m| m.norm_squared()).sum()
}

/// Matrix from row-major nested rows. Errors on ragged input.
pub fn from_rows(rows: &[Vec<f64>]) -> Result<Mat, String> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err("ragged matrix rows".into());
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

/// Row-major nested rows of `m`.
pub fn to_rows(m: &Mat) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}
