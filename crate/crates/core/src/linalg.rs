//! Small dense symmetric-matrix helpers shared by the model and simulation code.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Dense real matrix used for every coefficient and covariance value.
pub type Mat = DMatrix<f64>;

/// Relative tolerance for nonnegative-definiteness of a single coefficient.
pub const PSD_TOLERANCE: f64 = 1e-10;
/// Entrywise tolerance for symmetry, relative to `max(1, max |entry|)`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Largest entrywise deviation `|m_ij - m_ji|`.
pub fn asymmetry(m: &Mat) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub fn symmetric_part(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

/// Symmetric eigendecomposition of the symmetric part of `m`.
pub fn sym_eigen(m: &Mat) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    let n = m.nrows();
    SymmetricEigen::try_new(symmetric_part(m), f64::EPSILON, 0)
        .ok_or_else(|| Error::Numeric(format!("symmetric eigensolver did not converge on a {n}x{n} matrix")))
}

/// Smallest and largest eigenvalue of the symmetric part of `m`.
pub fn eigen_range(m: &Mat) -> Result<(f64, f64)> {
    if m.is_empty() {
        return Ok((0.0, 0.0));
    }
    let ev: DVector<f64> = sym_eigen(m)?.eigenvalues;
    Ok((ev.min(), ev.max()))
}

/// Scale used by the relative definiteness tolerances: `max(1, λ_max)`.
pub fn eigen_scale(max_eigenvalue: f64) -> f64 {
    max_eigenvalue.max(1.0)
}

/// Operator 2-norm (largest singular value).
pub fn spectral_norm(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

pub fn is_finite(m: &Mat) -> bool {
    m.iter().all(|v| v.is_finite())
}
