use nalgebra::{DMatrix, DVector};

use crate::error::{dims, Error, Result};
use crate::ilqr::cost::QuadraticCost;
use crate::linalg::{ensure_len, ensure_square, spd_factor, symmetrize};
use crate::scalar::Real;

/// `(u_0..u_{N−1}, x_0..x_N)`.
pub type ControlsAndTrajectory<T> = (Vec<DVector<T>>, Vec<DVector<T>>);

/// Finite-horizon discrete-time LQR for `x_{k+1} = A x_k + B u_k` under the
/// tracking cost `(x_N − x*)ᵀQ_f(x_N − x*) + Σ (x_kᵀQx_k + u_kᵀRu_k)`.
///
/// Uses the affine value function `xᵀP_k x + 2p_kᵀx`:
///
/// ```text
/// P_N = Q_f,  p_N = −Q_f x*
/// K_k = (R + BᵀP_{k+1}B)⁻¹ BᵀP_{k+1}A,  k_k = (R + BᵀP_{k+1}B)⁻¹ Bᵀp_{k+1}
/// P_k = Q + AᵀP_{k+1}(A − BK_k),         p_k = (A − BK_k)ᵀp_{k+1}
/// u_k = −K_k x_k − k_k
/// ```
///
/// Returns the controls and the resulting trajectory.
pub fn dt_lqr<T: Real>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    cost: &QuadraticCost<T>,
    horizon: usize,
    x0: &DVector<T>,
) -> Result<ControlsAndTrajectory<T>> {
    let n = ensure_square(a, "dt_lqr A")?;
    if b.nrows() != n {
        return Err(dims("dt_lqr B rows", n, b.nrows()));
    }
    if cost.state_dim() != n || cost.control_dim() != b.ncols() {
        return Err(dims(
            "dt_lqr cost",
            format!("n={n}, m={}", b.ncols()),
            format!("n={}, m={}", cost.state_dim(), cost.control_dim()),
        ));
    }
    ensure_len(x0, n, "dt_lqr x0")?;
    if horizon == 0 {
        return Err(Error::InvalidArgument("dt_lqr needs a horizon of at least one step".into()));
    }

    let mut p = cost.q_f.clone();
    let mut p_lin = -(&cost.q_f * &cost.x_star);
    let mut feedback = Vec::with_capacity(horizon);
    for k in (0..horizon).rev() {
        let bt_p = b.transpose() * &p;
        let chol = spd_factor(&(&bt_p * b + &cost.r)).ok_or(Error::NotPositiveDefinite { step: k })?;
        let gain = chol.solve(&(&bt_p * a));
        let offset = chol.solve(&(b.transpose() * &p_lin));
        let closed = a - b * &gain;
        p = symmetrize(&(&cost.q + a.transpose() * &p * &closed));
        p_lin = closed.transpose() * &p_lin;
        feedback.push((gain, offset));
    }
    feedback.reverse();

    let mut trajectory = Vec::with_capacity(horizon + 1);
    let mut controls = Vec::with_capacity(horizon);
    trajectory.push(x0.clone());
    for (gain, offset) in &feedback {
        let x = trajectory.last().unwrap();
        let u = -(gain * x) - offset;
        let next = a * x + b * &u;
        controls.push(u);
        trajectory.push(next);
    }
    Ok((controls, trajectory))
}
