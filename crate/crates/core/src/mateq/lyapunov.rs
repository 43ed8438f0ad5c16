use nalgebra::{DMatrix, DVector};

use crate::error::{dims, Error, Result};
use crate::linalg::{eigen_real_parts, ensure_square, real_schur, symmetrize};
use crate::scalar::Real;

/// Below this dimension the Kronecker-vectorized direct solve is used.
pub const KRONECKER_MAX_DIM: usize = 32;

/// An eigenvalue with real part at or above `-STABILITY_MARGIN` counts as unstable.
pub const STABILITY_MARGIN: f64 = 1e-12;

/// Solves `A X + X Aᵀ + W = 0` for Hurwitz `A`.
///
/// Uses the Kronecker-vectorized direct solve for `n < 32` and
/// Bartels-Stewart on the real Schur form otherwise. The result is
/// symmetrized.
pub fn solve_lyapunov<T: Real>(a: &DMatrix<T>, w: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = check(a, w)?;
    if n < KRONECKER_MAX_DIM {
        solve_lyapunov_kronecker(a, w)
    } else {
        solve_lyapunov_schur(a, w)
    }
}

fn check<T: Real>(a: &DMatrix<T>, w: &DMatrix<T>) -> Result<usize> {
    let n = ensure_square(a, "solve_lyapunov A")?;
    if w.shape() != (n, n) {
        return Err(dims("solve_lyapunov W", format!("{n}x{n}"), format!("{}x{}", w.nrows(), w.ncols())));
    }
    Ok(n)
}

fn ensure_hurwitz<T: Real>(t: &DMatrix<T>) -> Result<()> {
    let max_real = eigen_real_parts(t)
        .into_iter()
        .fold(f64::NEG_INFINITY, |acc, r| acc.max(r.as_f64()));
    if max_real >= -STABILITY_MARGIN {
        return Err(Error::NotStable { max_real });
    }
    Ok(())
}

/// Direct solve of `(I ⊗ A + A ⊗ I) vec(X) = −vec(W)`.
pub fn solve_lyapunov_kronecker<T: Real>(a: &DMatrix<T>, w: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = check(a, w)?;
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let (_, t) = real_schur(a)?;
    ensure_hurwitz(&t)?;

    let nn = n * n;
    let mut op = DMatrix::<T>::zeros(nn, nn);
    // vec(AX) block-diagonal, vec(XAᵀ) = (A ⊗ I) vec(X)
    for blk in 0..n {
        for i in 0..n {
            for k in 0..n {
                op[(blk * n + i, blk * n + k)] += a[(i, k)];
                op[(blk * n + i, k * n + i)] += a[(blk, k)];
            }
        }
    }
    let rhs = -DVector::from_column_slice(w.as_slice());
    let sol = op
        .lu()
        .solve(&rhs)
        .ok_or(Error::Singular { context: "Kronecker Lyapunov operator" })?;
    Ok(symmetrize(&DMatrix::from_column_slice(n, n, sol.as_slice())))
}

/// Bartels-Stewart: `A = Z T Zᵀ`, solve `T Y + Y Tᵀ = −Zᵀ W Z` block by
/// block from the bottom-right corner, then `X = Z Y Zᵀ`.
pub fn solve_lyapunov_schur<T: Real>(a: &DMatrix<T>, w: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = check(a, w)?;
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let (z, t) = real_schur(a)?;
    ensure_hurwitz(&t)?;

    let c = -(z.transpose() * w * &z);
    let blocks = diagonal_blocks(&t);
    let mut y = DMatrix::<T>::zeros(n, n);

    for &(j0, q) in blocks.iter().rev() {
        for &(i0, p) in blocks.iter().rev() {
            let mut rhs = c.view((i0, j0), (p, q)).into_owned();
            let i1 = i0 + p;
            let j1 = j0 + q;
            if i1 < n {
                rhs -= t.view((i0, i1), (p, n - i1)) * y.view((i1, j0), (n - i1, q));
            }
            if j1 < n {
                rhs -= y.view((i0, j1), (p, n - j1)) * t.view((j0, j1), (q, n - j1)).transpose();
            }
            let tii = t.view((i0, i0), (p, p)).into_owned();
            let tjj = t.view((j0, j0), (q, q)).into_owned();
            let blk = small_sylvester(&tii, &tjj, &rhs)?;
            y.view_mut((i0, j0), (p, q)).copy_from(&blk);
        }
    }

    Ok(symmetrize(&(&z * y * z.transpose())))
}

/// `(start, size)` of each 1x1 or 2x2 diagonal block of a quasi-triangular matrix.
fn diagonal_blocks<T: Real>(t: &DMatrix<T>) -> Vec<(usize, usize)> {
    let n = t.nrows();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != T::zero() {
            out.push((i, 2));
            i += 2;
        } else {
            out.push((i, 1));
            i += 1;
        }
    }
    out
}

/// Solves `P Y + Y Qᵀ = R` for blocks of size at most 2.
fn small_sylvester<T: Real>(p: &DMatrix<T>, q: &DMatrix<T>, r: &DMatrix<T>) -> Result<DMatrix<T>> {
    let (np, nq) = (p.nrows(), q.nrows());
    if np == 1 && nq == 1 {
        let d = p[(0, 0)] + q[(0, 0)];
        if d == T::zero() {
            return Err(Error::Singular { context: "Bartels-Stewart diagonal block" });
        }
        return Ok(DMatrix::from_element(1, 1, r[(0, 0)] / d));
    }
    let k = np * nq;
    let mut op = DMatrix::<T>::zeros(k, k);
    // vec(PY) = (I ⊗ P) vec(Y); vec(Y Qᵀ) = (Q ⊗ I) vec(Y)
    for b in 0..nq {
        for i in 0..np {
            for l in 0..np {
                op[(b * np + i, b * np + l)] += p[(i, l)];
            }
            for l in 0..nq {
                op[(b * np + i, l * np + i)] += q[(b, l)];
            }
        }
    }
    let rhs = DVector::from_column_slice(r.as_slice());
    let sol = op
        .lu()
        .solve(&rhs)
        .ok_or(Error::Singular { context: "Bartels-Stewart diagonal block" })?;
    Ok(DMatrix::from_column_slice(np, nq, sol.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &DMatrix<f64>, x: &DMatrix<f64>, w: &DMatrix<f64>) -> f64 {
        (a * x + x * a.transpose() + w).norm()
    }

    #[test]
    fn negative_identity() {
        let a = -DMatrix::<f64>::identity(2, 2);
        let w = DMatrix::<f64>::identity(2, 2);
        let x = solve_lyapunov(&a, &w).unwrap();
        assert!((x - DMatrix::identity(2, 2) * 0.5).norm() < 1e-14);
    }

    #[test]
    fn diagonal_entrywise_formula() {
        let a = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -2.0]);
        let w = DMatrix::from_element(2, 2, 1.0);
        let expected = DMatrix::from_row_slice(2, 2, &[0.5, 1.0 / 3.0, 1.0 / 3.0, 0.25]);
        for x in [solve_lyapunov_kronecker(&a, &w).unwrap(), solve_lyapunov_schur(&a, &w).unwrap()] {
            assert!((x - &expected).norm() < 1e-14);
        }
    }

    #[test]
    fn schur_route_handles_complex_pairs() {
        let a = DMatrix::from_row_slice(
            3,
            3,
            &[-0.3, 2.0, 0.1, -2.0, -0.3, 0.4, 0.0, 0.5, -1.0],
        );
        let w = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.1, 0.5, 1.0, 0.0, 0.1, 0.0, 0.3]);
        let x = solve_lyapunov_schur(&a, &w).unwrap();
        assert!(residual(&a, &x, &w) < 1e-12);
        let xk = solve_lyapunov_kronecker(&a, &w).unwrap();
        assert!((x - xk).norm() < 1e-12);
    }

    #[test]
    fn unstable_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[0.1, 0.0, 0.0, -1.0]);
        let w = DMatrix::identity(2, 2);
        assert!(matches!(solve_lyapunov(&a, &w), Err(Error::NotStable { .. })));
        assert!(matches!(solve_lyapunov_schur(&a, &w), Err(Error::NotStable { .. })));
        let marginal = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, -1.0]);
        assert!(matches!(solve_lyapunov(&marginal, &w), Err(Error::NotStable { .. })));
    }

    #[test]
    fn dimension_mismatch() {
        let a = -DMatrix::<f64>::identity(2, 2);
        let w = DMatrix::<f64>::identity(3, 3);
        assert!(matches!(solve_lyapunov(&a, &w), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn f32_instantiation() {
        let a = -DMatrix::<f32>::identity(3, 3) * 2.0;
        let w = DMatrix::<f32>::identity(3, 3);
        let x = solve_lyapunov(&a, &w).unwrap();
        assert!((x[(1, 1)] - 0.25).abs() < 1e-6);
    }
}
