//! Backward (gain) and forward (rollout) passes of one ILQR iteration.

use nalgebra::{DMatrix, DVector};

use crate::dynamics::ControlledSystem;
use crate::error::{dims, Error, Result};
use crate::ilqr::cost::{evaluate_cost, QuadraticCost};
use crate::linalg::{spd_factor, symmetrize};
use crate::scalar::Real;

/// Gains and value-function quantities produced by the backward pass.
///
/// `k`, `k_v`, `k_u` have `N` entries; `s` and `v` have `N+1`, with
/// `s[N] = Q_f` and `v[N] = Q_f (x_N − x*)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BackwardPassGains<T: Real> {
    pub k: Vec<DMatrix<T>>,
    pub k_v: Vec<DMatrix<T>>,
    pub k_u: Vec<DMatrix<T>>,
    pub s: Vec<DMatrix<T>>,
    pub v: Vec<DVector<T>>,
}

impl<T: Real> BackwardPassGains<T> {
    pub fn horizon(&self) -> usize {
        self.k.len()
    }

    /// All-zero gains (forward pass leaves the nominal unchanged).
    pub fn zeros(horizon: usize, n: usize, m: usize) -> Self {
        Self {
            k: vec![DMatrix::zeros(m, n); horizon],
            k_v: vec![DMatrix::zeros(m, n); horizon],
            k_u: vec![DMatrix::zeros(m, m); horizon],
            s: vec![DMatrix::zeros(n, n); horizon + 1],
            v: vec![DVector::zeros(n); horizon + 1],
        }
    }
}

/// Riccati-like sweep from `k = N−1` down to `0`:
///
/// ```text
/// H_k   = B_kᵀ S_{k+1} B_k + R
/// K_k   = H_k⁻¹ B_kᵀ S_{k+1} A_k,   K_k^v = H_k⁻¹ B_kᵀ,   K_k^u = H_k⁻¹ R
/// S_k   = A_kᵀ S_{k+1} (A_k − B_k K_k) + Q
/// v_k   = (A_k − B_k K_k)ᵀ v_{k+1} − K_kᵀ R u_k + Q x_k
/// ```
pub fn backward_pass<T: Real>(
    linearizations: &[(DMatrix<T>, DMatrix<T>)],
    trajectory: &[DVector<T>],
    controls: &[DVector<T>],
    cost: &QuadraticCost<T>,
) -> Result<BackwardPassGains<T>> {
    let horizon = controls.len();
    if linearizations.len() != horizon {
        return Err(dims("backward_pass linearizations", horizon, linearizations.len()));
    }
    if trajectory.len() != horizon + 1 {
        return Err(dims("backward_pass trajectory", horizon + 1, trajectory.len()));
    }
    let (n, m) = (cost.state_dim(), cost.control_dim());

    let mut k_all = Vec::with_capacity(horizon);
    let mut kv_all = Vec::with_capacity(horizon);
    let mut ku_all = Vec::with_capacity(horizon);
    let mut s_all = Vec::with_capacity(horizon + 1);
    let mut v_all = Vec::with_capacity(horizon + 1);

    let mut s = cost.q_f.clone();
    let mut v = &cost.q_f * (&trajectory[horizon] - &cost.x_star);
    s_all.push(s.clone());
    v_all.push(v.clone());

    for k in (0..horizon).rev() {
        let (a, b) = &linearizations[k];
        if a.shape() != (n, n) || b.shape() != (n, m) {
            return Err(dims(
                "backward_pass (A_k, B_k)",
                format!("{n}x{n}, {n}x{m}"),
                format!("{}x{}, {}x{}", a.nrows(), a.ncols(), b.nrows(), b.ncols()),
            ));
        }
        let bt_s = b.transpose() * &s;
        let h = &bt_s * b + &cost.r;
        let chol = spd_factor(&h).ok_or(Error::NotPositiveDefinite { step: k })?;

        let gain = chol.solve(&(&bt_s * a));
        let gain_v = chol.solve(&b.transpose());
        let gain_u = chol.solve(&cost.r);

        let closed = a - b * &gain;
        let s_next = symmetrize(&(a.transpose() * &s * &closed + &cost.q));
        let v_next = closed.transpose() * &v - gain.transpose() * (&cost.r * &controls[k])
            + &cost.q * &trajectory[k];

        k_all.push(gain);
        kv_all.push(gain_v);
        ku_all.push(gain_u);
        s = s_next;
        v = v_next;
        s_all.push(s.clone());
        v_all.push(v.clone());
    }

    k_all.reverse();
    kv_all.reverse();
    ku_all.reverse();
    s_all.reverse();
    v_all.reverse();
    Ok(BackwardPassGains { k: k_all, k_v: kv_all, k_u: ku_all, s: s_all, v: v_all })
}

/// Output of [`forward_pass`].
#[derive(Debug, Clone, PartialEq)]
pub struct Rollout<T: Real> {
    pub controls: Vec<DVector<T>>,
    pub trajectory: Vec<DVector<T>>,
    pub cost: T,
}

/// Applies `δu_k = −K_k δx_k − K_k^v v_{k+1} − K_k^u u_k` along the nominal,
/// updating `u_k ← u_k + δu_k` and re-simulating with `δx_k = x_k^new − x_k`.
pub fn forward_pass<T: Real, S: ControlledSystem<T> + ?Sized>(
    sys: &S,
    gains: &BackwardPassGains<T>,
    trajectory: &[DVector<T>],
    controls: &[DVector<T>],
    cost: &QuadraticCost<T>,
) -> Result<Rollout<T>> {
    let horizon = controls.len();
    if gains.horizon() != horizon || gains.v.len() != horizon + 1 {
        return Err(dims("forward_pass gains", horizon, gains.horizon()));
    }
    if trajectory.len() != horizon + 1 {
        return Err(dims("forward_pass trajectory", horizon + 1, trajectory.len()));
    }

    let mut new_traj = Vec::with_capacity(horizon + 1);
    let mut new_controls = Vec::with_capacity(horizon);
    new_traj.push(trajectory[0].clone());
    let mut dx = DVector::zeros(trajectory[0].len());

    for k in 0..horizon {
        let du = -(&gains.k[k] * &dx) - &gains.k_v[k] * &gains.v[k + 1] - &gains.k_u[k] * &controls[k];
        let u = &controls[k] + du;
        let next = sys
            .step(&new_traj[k], &u)
            .map_err(|e| Error::StepFailed { k, source: Box::new(e) })?;
        dx = &next - &trajectory[k + 1];
        new_traj.push(next);
        new_controls.push(u);
    }
    let j = evaluate_cost(cost, &new_traj, &new_controls)?;
    Ok(Rollout { controls: new_controls, trajectory: new_traj, cost: j })
}
