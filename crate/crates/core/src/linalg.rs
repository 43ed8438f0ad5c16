//! Small dense helpers shared across modules.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, Schur, SymmetricEigen, SVD};

use crate::error::{dims, Error, Result};
use crate::scalar::Real;

/// `(M + Mᵀ) / 2`.
pub fn symmetrize<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    let half = T::lit(0.5);
    (m + m.transpose()) * half
}

/// `‖M − Mᵀ‖_F / max(‖M‖_F, tiny)`.
pub fn relative_asymmetry<T: Real>(m: &DMatrix<T>) -> T {
    let n = m.norm();
    if n == T::zero() {
        return T::zero();
    }
    (m - m.transpose()).norm() / n
}

pub fn ensure_square<T: Real>(m: &DMatrix<T>, context: &'static str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(dims(context, "square matrix", format!("{}x{}", m.nrows(), m.ncols())));
    }
    Ok(m.nrows())
}

pub fn ensure_shape<T: Real>(
    m: &DMatrix<T>,
    rows: usize,
    cols: usize,
    context: &'static str,
) -> Result<()> {
    if m.shape() != (rows, cols) {
        return Err(dims(
            context,
            format!("{rows}x{cols}"),
            format!("{}x{}", m.nrows(), m.ncols()),
        ));
    }
    Ok(())
}

pub fn ensure_len<T: Real>(v: &DVector<T>, len: usize, context: &'static str) -> Result<()> {
    if v.len() != len {
        return Err(dims(context, len, v.len()));
    }
    Ok(())
}

/// Real Schur form `A = Z T Zᵀ`, returned as `(Z, T)`.
pub fn real_schur<T: Real>(a: &DMatrix<T>) -> Result<(DMatrix<T>, DMatrix<T>)> {
    let n = a.nrows();
    let max_iter = 100 * n.max(10);
    Schur::try_new(a.clone(), T::eps(), max_iter)
        .map(Schur::unpack)
        .ok_or(Error::Decomposition("real Schur iteration did not converge"))
}

/// Eigenvalue real parts read off the quasi-triangular Schur factor.
pub fn eigen_real_parts<T: Real>(t: &DMatrix<T>) -> Vec<T> {
    let n = t.nrows();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != T::zero() {
            let re = (t[(i, i)] + t[(i + 1, i + 1)]) * T::lit(0.5);
            let d = (t[(i, i)] - t[(i + 1, i + 1)]) * T::lit(0.5);
            let disc = d * d + t[(i, i + 1)] * t[(i + 1, i)];
            if disc >= T::zero() {
                // real pair left in a 2x2 block
                let s = disc.sqrt();
                out.push(re + s);
                out.push(re - s);
            } else {
                out.push(re);
                out.push(re);
            }
            i += 2;
        } else {
            out.push(t[(i, i)]);
            i += 1;
        }
    }
    out
}

/// Largest real part over the spectrum of `a`.
pub fn spectral_abscissa<T: Real>(a: &DMatrix<T>) -> Result<T> {
    ensure_square(a, "spectral_abscissa")?;
    if a.nrows() == 0 {
        return Ok(T::min_value().unwrap_or(-T::one()));
    }
    let (_, t) = real_schur(a)?;
    Ok(eigen_real_parts(&t)
        .into_iter()
        .fold(-T::max_value().unwrap(), |acc, r| if r > acc { r } else { acc }))
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted in
/// decreasing order (eigenvectors permuted to match).
pub fn sorted_symmetric_eigen<T: Real>(m: &DMatrix<T>) -> (DVector<T>, DMatrix<T>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(symmetrize(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// SVD with singular values in decreasing order (stable with respect to the
/// original order on ties) and each left singular vector sign-fixed so its
/// largest-magnitude entry is positive; the right vector is flipped with it.
pub fn deterministic_svd<T: Real>(m: &DMatrix<T>) -> Result<(DMatrix<T>, DVector<T>, DMatrix<T>)> {
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return Ok((DMatrix::zeros(m.nrows(), 0), DVector::zeros(0), DMatrix::zeros(m.ncols(), 0)));
    }
    let svd = SVD::try_new_unordered(m.clone(), true, true, T::eps() * T::lit(5.0), 0)
        .ok_or(Error::Decomposition("SVD did not converge"))?;
    let u = svd.u.ok_or(Error::Decomposition("SVD missing U"))?;
    let v_t = svd.v_t.ok_or(Error::Decomposition("SVD missing Vᵀ"))?;
    let s = svd.singular_values;

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| {
        s[j].partial_cmp(&s[i])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });

    let mut u_out = DMatrix::zeros(m.nrows(), k);
    let mut v_out = DMatrix::zeros(m.ncols(), k);
    let mut s_out = DVector::zeros(k);
    for (dst, &src) in order.iter().enumerate() {
        let col = u.column(src);
        let mut pivot = 0;
        for i in 0..col.len() {
            if col[i].abs() > col[pivot].abs() {
                pivot = i;
            }
        }
        let sign = if col[pivot] < T::zero() { -T::one() } else { T::one() };
        u_out.set_column(dst, &(col * sign));
        v_out.set_column(dst, &(v_t.row(src).transpose() * sign));
        s_out[dst] = s[src];
    }
    Ok((u_out, s_out, v_out))
}

/// Solves `M X = B` for symmetric positive definite `M`.
pub fn spd_solve<T: Real>(m: &DMatrix<T>, rhs: &DMatrix<T>) -> Option<DMatrix<T>> {
    Cholesky::new(symmetrize(m)).map(|c| c.solve(rhs))
}

pub fn spd_factor<T: Real>(m: &DMatrix<T>) -> Option<Cholesky<T, Dyn>> {
    Cholesky::new(symmetrize(m))
}

/// Induced 1-norm (maximum absolute column sum).
pub fn norm_one<T: Real>(m: &DMatrix<T>) -> T {
    m.column_iter()
        .map(|c| c.iter().fold(T::zero(), |acc, x| acc + x.abs()))
        .fold(T::zero(), |acc, x| if x > acc { x } else { acc })
}

pub fn max_abs<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, x| if x.abs() > acc { x.abs() } else { acc })
}

/// Dense Kronecker product.
pub fn kron<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abscissa_of_diagonal() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0f64, -3.0, -0.5]));
        assert!((spectral_abscissa(&a).unwrap() + 0.5).abs() < 1e-14);
    }

    #[test]
    fn abscissa_of_rotation_block() {
        let a = DMatrix::from_row_slice(2, 2, &[-0.2f64, 1.0, -1.0, -0.2]);
        assert!((spectral_abscissa(&a).unwrap() + 0.2).abs() < 1e-12);
    }

    #[test]
    fn svd_is_sorted_and_sign_fixed() {
        let m = DMatrix::from_row_slice(3, 2, &[1.0f64, -2.0, 0.5, 3.0, -4.0, 0.1]);
        let (u, s, v) = deterministic_svd(&m).unwrap();
        assert!(s[0] >= s[1]);
        for j in 0..2 {
            let col = u.column(j);
            let big = col.iter().cloned().fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
            assert!(big > 0.0);
        }
        let rebuilt = &u * DMatrix::from_diagonal(&s) * v.transpose();
        assert!((rebuilt - m).norm() < 1e-12);
    }

    #[test]
    fn sorted_eigen_descending() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0f64, 0.0, 0.0, 5.0]);
        let (vals, vecs) = sorted_symmetric_eigen(&m);
        assert_eq!(vals[0], 5.0);
        assert!((vecs[(1, 0)].abs() - 1.0).abs() < 1e-14);
    }
}
