use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::error::{dims, Error, Result};
use crate::linalg::{ensure_square, spd_factor, spectral_abscissa, symmetrize};
use crate::mateq::lyapunov::{solve_lyapunov, STABILITY_MARGIN};
use crate::scalar::Real;

pub const NEWTON_KLEINMAN_TOL: f64 = 1e-12;
pub const NEWTON_KLEINMAN_MAX_ITER: usize = 100;

/// Which LQG Riccati equation to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CareVariant {
    /// `A P + P Aᵀ − P Cᵀ R_w⁻¹ C P + B Bᵀ = 0`; `R_w` is `p×p`.
    Filter,
    /// `Aᵀ Q + Q A − Q B R_w⁻¹ Bᵀ Q + Cᵀ C = 0`; `R_w` is `m×m`.
    Control,
}

/// Stabilizing solution of an LQG algebraic Riccati equation by
/// Newton-Kleinman iteration. The iteration starts from the zero gain when
/// `A` is Hurwitz and from the matrix-sign-function solution otherwise.
pub fn solve_care<T: Real>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    c: &DMatrix<T>,
    r_w: &DMatrix<T>,
    variant: CareVariant,
) -> Result<DMatrix<T>> {
    let n = ensure_square(a, "solve_care A")?;
    if b.nrows() != n {
        return Err(dims("solve_care B rows", n, b.nrows()));
    }
    if c.ncols() != n {
        return Err(dims("solve_care C cols", n, c.ncols()));
    }
    let weight_dim = match variant {
        CareVariant::Filter => c.nrows(),
        CareVariant::Control => b.ncols(),
    };
    if r_w.shape() != (weight_dim, weight_dim) {
        return Err(dims(
            "solve_care R_w",
            format!("{weight_dim}x{weight_dim}"),
            format!("{}x{}", r_w.nrows(), r_w.ncols()),
        ));
    }

    // The filter equation is the control equation of the dual triple.
    let (a_eff, b_eff, q_eff) = match variant {
        CareVariant::Control => (a.clone(), b.clone(), c.transpose() * c),
        CareVariant::Filter => (a.transpose(), c.transpose(), b * b.transpose()),
    };
    newton_kleinman(&a_eff, &b_eff, &q_eff, r_w, variant)
}

/// Solves `Aᵀ X + X A − X B R⁻¹ Bᵀ X + W = 0`.
fn newton_kleinman<T: Real>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    w: &DMatrix<T>,
    r: &DMatrix<T>,
    variant: CareVariant,
) -> Result<DMatrix<T>> {
    let chol = spd_factor(r).ok_or(Error::NotPositiveDefinite { step: 0 })?;
    let not_stabilizing = |iteration: usize, max_real: f64| match variant {
        CareVariant::Control => Error::NotStabilizable { iteration, max_real },
        CareVariant::Filter => Error::NotDetectable { iteration, max_real },
    };

    let tol = T::lit(NEWTON_KLEINMAN_TOL);
    let mut gain = match initial_gain(a, b, w, &chol)? {
        Some(g) => g,
        None => return Err(not_stabilizing(0, spectral_abscissa(a)?.as_f64())),
    };
    let mut x_prev: Option<DMatrix<T>> = None;
    let mut prev_change = T::max_value().unwrap();
    let mut last_change = T::zero();

    for iteration in 0..NEWTON_KLEINMAN_MAX_ITER {
        let closed = a - b * &gain;
        let rhs = w + gain.transpose() * r * &gain;
        let x = match solve_lyapunov(&closed.transpose(), &rhs) {
            Ok(x) => x,
            Err(Error::NotStable { max_real }) => return Err(not_stabilizing(iteration, max_real)),
            Err(e) => return Err(e),
        };
        gain = chol.solve(&(b.transpose() * &x));

        if let Some(prev) = &x_prev {
            let scale = x.norm().max(T::eps());
            let change = (&x - prev).norm() / scale;
            last_change = change;
            // Converged, or stalled at the conditioning floor once the
            // quadratic phase has been reached.
            let stagnated = prev_change <= T::lit(1e-3) && change >= prev_change;
            if change <= tol || stagnated {
                return finish(a, b, r, x, variant);
            }
            prev_change = change;
        }
        x_prev = Some(x);
    }
    Err(Error::NoConvergence {
        solver: "Newton-Kleinman",
        iterations: NEWTON_KLEINMAN_MAX_ITER,
        residual: last_change.as_f64(),
    })
}

/// Zero for Hurwitz `A`; otherwise the gain of the matrix-sign-function
/// solution. `None` when the stable invariant subspace of the Hamiltonian
/// is not a graph over the state coordinates (`(A, B)` not stabilizable).
fn initial_gain<T: Real>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    w: &DMatrix<T>,
    r: &Cholesky<T, Dyn>,
) -> Result<Option<DMatrix<T>>> {
    let (n, m) = (a.nrows(), b.ncols());
    if spectral_abscissa(a)?.as_f64() < -STABILITY_MARGIN {
        return Ok(Some(DMatrix::zeros(m, n)));
    }
    Ok(sign_function_solution(a, b, w, r).map(|x| r.solve(&(b.transpose() * x))))
}

/// Stabilizing solution from `sign(H)`, `H = [A, −BR⁻¹Bᵀ; −W, −Aᵀ]`, by the
/// determinant-scaled Newton iteration; `X` solves
/// `[S₁₂; S₂₂ + I] X = −[S₁₁ + I; S₂₁]` in the least-squares sense.
fn sign_function_solution<T: Real>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    w: &DMatrix<T>,
    r: &Cholesky<T, Dyn>,
) -> Option<DMatrix<T>> {
    const MAX_ITER: usize = 100;
    let n = a.nrows();
    let g = b * r.solve(&b.transpose());
    let mut z = DMatrix::zeros(2 * n, 2 * n);
    z.view_mut((0, 0), (n, n)).copy_from(a);
    z.view_mut((0, n), (n, n)).copy_from(&(-g));
    z.view_mut((n, 0), (n, n)).copy_from(&(-w));
    z.view_mut((n, n), (n, n)).copy_from(&(-a.transpose()));

    let half = T::lit(0.5);
    let tol = T::lit(1e3) * T::eps();
    let mut converged = false;
    for _ in 0..MAX_ITER {
        let lu = z.clone().lu();
        let inv = lu.try_inverse()?;
        let det = z.clone().lu().determinant().abs();
        let c = if det > T::zero() && det.is_finite() {
            det.powf(T::one() / T::lit((2 * n) as f64))
        } else {
            T::one()
        };
        let next = (&z / c + inv * c) * half;
        let change = (&next - &z).norm() / next.norm();
        z = next;
        if change <= tol.sqrt() {
            // one more unscaled step lands on roundoff
            let inv = z.clone().lu().try_inverse()?;
            z = (&z + inv) * half;
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }

    let eye = DMatrix::<T>::identity(n, n);
    let mut lhs = DMatrix::zeros(2 * n, n);
    lhs.view_mut((0, 0), (n, n)).copy_from(&z.view((0, n), (n, n)));
    lhs.view_mut((n, 0), (n, n)).copy_from(&(z.view((n, n), (n, n)) + &eye));
    let mut rhs = DMatrix::zeros(2 * n, n);
    rhs.view_mut((0, 0), (n, n)).copy_from(&(-(z.view((0, 0), (n, n)) + &eye)));
    rhs.view_mut((n, 0), (n, n)).copy_from(&(-z.view((n, 0), (n, n))));
    let qr = lhs.qr();
    let upper = qr.r();
    let diag_max = upper.diagonal().amax();
    if !(upper.diagonal().iter().all(|d| d.abs() > T::lit(1e-12) * diag_max)) {
        return None;
    }
    let x = upper.solve_upper_triangular(&(qr.q().transpose() * rhs))?;
    Some(symmetrize(&x))
}

fn finish<T: Real>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    r: &DMatrix<T>,
    x: DMatrix<T>,
    variant: CareVariant,
) -> Result<DMatrix<T>> {
    let x = symmetrize(&x);
    let chol = spd_factor(r).ok_or(Error::NotPositiveDefinite { step: 0 })?;
    let gain = chol.solve(&(b.transpose() * &x));
    let closed = a - b * &gain;
    let max_real = spectral_abscissa(&closed)?.as_f64();
    if max_real >= -STABILITY_MARGIN {
        return Err(match variant {
            CareVariant::Control => Error::NotStabilizable { iteration: NEWTON_KLEINMAN_MAX_ITER, max_real },
            CareVariant::Filter => Error::NotDetectable { iteration: NEWTON_KLEINMAN_MAX_ITER, max_real },
        });
    }
    Ok(x)
}

/// Frobenius residual of the Riccati map for the given variant.
pub fn care_residual<T: Real>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    c: &DMatrix<T>,
    r_w: &DMatrix<T>,
    x: &DMatrix<T>,
    variant: CareVariant,
) -> T {
    let r_inv = r_w.clone().try_inverse().expect("weight must be invertible");
    let res = match variant {
        CareVariant::Control => {
            a.transpose() * x + x * a - x * b * r_inv * b.transpose() * x + c.transpose() * c
        }
        CareVariant::Filter => {
            a * x + x * a.transpose() - x * c.transpose() * r_inv * c * x + b * b.transpose()
        }
    };
    res.norm()
}
