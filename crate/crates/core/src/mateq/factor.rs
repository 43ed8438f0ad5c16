use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{ensure_square, relative_asymmetry, sorted_symmetric_eigen};
use crate::scalar::Real;

/// Relative eigenvalue cutoff used when none is given.
pub const DEFAULT_RANK_TOL: f64 = 1e-12;

const SYMMETRY_TOL: f64 = 1e-10;

/// Column-compressed square root `F` of a PSD matrix, `X ≈ F Fᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymPosSemiDefFactor<T: Real> {
    /// `n×rank`, columns ordered by decreasing eigenvalue.
    pub factor: DMatrix<T>,
    pub rank: usize,
}

impl<T: Real> SymPosSemiDefFactor<T> {
    pub fn reconstruct(&self) -> DMatrix<T> {
        &self.factor * self.factor.transpose()
    }

    /// The leading `k` columns (all of them when `k ≥ rank`).
    pub fn leading(&self, k: usize) -> DMatrix<T> {
        self.factor.columns(0, k.min(self.rank)).into_owned()
    }
}

/// Factors a symmetric PSD matrix through its eigen-decomposition, keeping
/// eigenvalues above `rank_tol · λ_max`.
///
/// Fails with `NotPsd` when an eigenvalue lies below `−rank_tol · λ_max`.
pub fn psd_factor<T: Real>(x: &DMatrix<T>, rank_tol: T) -> Result<SymPosSemiDefFactor<T>> {
    psd_factor_clamped(x, rank_tol, rank_tol)
}

/// Like [`psd_factor`] but with a separate relative threshold for rejecting
/// negative eigenvalues, for matrices that are PSD only up to solver
/// roundoff (ill-conditioned Gramians).
pub fn psd_factor_clamped<T: Real>(
    x: &DMatrix<T>,
    rank_tol: T,
    negative_tol: T,
) -> Result<SymPosSemiDefFactor<T>> {
    let n = ensure_square(x, "psd_factor")?;
    let asym = relative_asymmetry(x);
    if asym > T::lit(SYMMETRY_TOL) {
        return Err(Error::NotSymmetric { asymmetry: asym.as_f64() });
    }
    if n == 0 {
        return Ok(SymPosSemiDefFactor { factor: DMatrix::zeros(0, 0), rank: 0 });
    }

    let (values, vectors) = sorted_symmetric_eigen(x);
    let lambda_max = values[0].max(T::zero());
    let lambda_min = values[n - 1];
    let neg_threshold = negative_tol * lambda_max;
    if lambda_min < -neg_threshold {
        return Err(Error::NotPsd {
            min_eigenvalue: lambda_min.as_f64(),
            threshold: neg_threshold.as_f64(),
        });
    }

    let cutoff = rank_tol * lambda_max;
    let rank = if lambda_max > T::zero() {
        values.iter().take_while(|&&v| v > cutoff).count()
    } else {
        0
    };
    let mut factor = DMatrix::zeros(n, rank);
    for j in 0..rank {
        factor.set_column(j, &(vectors.column(j) * values[j].sqrt()));
    }
    Ok(SymPosSemiDefFactor { factor, rank })
}
