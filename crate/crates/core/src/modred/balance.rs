use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{deterministic_svd, spectral_abscissa};
use crate::mateq::{psd_factor_clamped, solve_care, solve_lyapunov, CareVariant, LtiSystem, STABILITY_MARGIN};
use crate::modred::{normalize, Method, ReductionBasis};
use crate::scalar::Real;

/// Shift used to move a marginal eigenvalue off the imaginary axis.
pub const DEFAULT_SHIFT: f64 = 1e-6;

/// Relative size of negative Gramian eigenvalues tolerated as roundoff.
pub const GRAMIAN_NEGATIVE_TOL: f64 = 1e-6;

/// Which matrix is decomposed to build the bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SvdMode {
    /// SVD of `L[:,1:r]ᵀ R[:,1:r]`: factor columns are cut to `r` first.
    /// Ill-conditioned when `r` splits a pair of equal Gramian eigenvalues.
    Leading,
    /// SVD of the full `LᵀR`, then the leading `r` singular triplets.
    #[default]
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalanceOptions {
    pub svd_mode: SvdMode,
    /// Relative eigenvalue cutoff for the Gramian factors.
    pub rank_tol: f64,
    pub negative_tol: f64,
    /// Balance `A − μI` instead of `A`.
    pub shift: Option<f64>,
}

impl Default for BalanceOptions {
    fn default() -> Self {
        Self { svd_mode: SvdMode::Full, rank_tol: 1e-12, negative_tol: GRAMIAN_NEGATIVE_TOL, shift: None }
    }
}

impl BalanceOptions {
    pub fn leading() -> Self {
        Self { svd_mode: SvdMode::Leading, ..Self::default() }
    }

    pub fn with_shift(mut self, shift: Option<f64>) -> Self {
        self.shift = shift;
        self
    }
}

/// `Some(DEFAULT_SHIFT)` when `A` is not strictly Hurwitz, `None` otherwise.
pub fn stabilizing_shift<T: Real>(a: &DMatrix<T>) -> Result<Option<f64>> {
    let abscissa = spectral_abscissa(a)?.as_f64();
    Ok((abscissa >= -STABILITY_MARGIN).then_some(DEFAULT_SHIFT))
}

fn shifted<T: Real>(sys: &LtiSystem<T>, shift: Option<f64>) -> DMatrix<T> {
    match shift {
        Some(mu) => {
            let n = sys.state_dim();
            &sys.a - DMatrix::<T>::identity(n, n) * T::lit(mu)
        }
        None => sys.a.clone(),
    }
}

/// Balanced truncation with [`BalanceOptions::default`].
pub fn balanced_truncation<T: Real>(sys: &LtiSystem<T>, r: usize) -> Result<ReductionBasis<T>> {
    balanced_truncation_with(sys, r, &BalanceOptions::default())
}

/// Balances the controllability and observability Gramians
/// `AP + PAᵀ + BBᵀ = 0`, `AᵀQ + QA + CᵀC = 0`.
pub fn balanced_truncation_with<T: Real>(
    sys: &LtiSystem<T>,
    r: usize,
    opts: &BalanceOptions,
) -> Result<ReductionBasis<T>> {
    let a = shifted(sys, opts.shift);
    let p = solve_lyapunov(&a, &(&sys.b * sys.b.transpose()))?;
    let q = solve_lyapunov(&a.transpose(), &(sys.c.transpose() * &sys.c))?;
    balance(&p, &q, r, opts, Method::Bt)
}

/// LQG balanced truncation with [`BalanceOptions::default`].
pub fn lqg_balanced_truncation<T: Real>(
    sys: &LtiSystem<T>,
    r_ctrl: &DMatrix<T>,
    r: usize,
) -> Result<ReductionBasis<T>> {
    lqg_balanced_truncation_with(sys, r_ctrl, r, &BalanceOptions::default())
}

/// Balances the stabilizing solutions of the filter equation
/// `AP + PAᵀ − PCᵀCP + BBᵀ = 0` and the control equation
/// `AᵀQ + QA − QBR⁻¹BᵀQ + CᵀC = 0` with `R = r_ctrl`.
pub fn lqg_balanced_truncation_with<T: Real>(
    sys: &LtiSystem<T>,
    r_ctrl: &DMatrix<T>,
    r: usize,
    opts: &BalanceOptions,
) -> Result<ReductionBasis<T>> {
    let a = shifted(sys, opts.shift);
    let p_out = sys.output_dim();
    let p = solve_care(&a, &sys.b, &sys.c, &DMatrix::identity(p_out, p_out), CareVariant::Filter)?;
    let q = solve_care(&a, &sys.b, &sys.c, r_ctrl, CareVariant::Control)?;
    balance(&p, &q, r, opts, Method::LqgBt)
}

fn balance<T: Real>(
    p: &DMatrix<T>,
    q: &DMatrix<T>,
    r: usize,
    opts: &BalanceOptions,
    method: Method,
) -> Result<ReductionBasis<T>> {
    if r == 0 {
        return Err(Error::InvalidArgument("reduced dimension must be at least 1".into()));
    }
    let rank_tol = T::lit(opts.rank_tol);
    let neg_tol = T::lit(opts.negative_tol);
    let r_fac = psd_factor_clamped(p, rank_tol, neg_tol)?;
    let l_fac = psd_factor_clamped(q, rank_tol, neg_tol)?;

    let (_, ladder, _) = deterministic_svd(&(l_fac.factor.transpose() * &r_fac.factor))?;
    let mut r_eff = r.min(l_fac.rank).min(r_fac.rank);
    if r_eff == 0 {
        return Err(Error::InvalidArgument("Gramian factors have rank zero".into()));
    }

    let (u, s, v, right, left) = match opts.svd_mode {
        SvdMode::Leading => {
            let right = r_fac.leading(r_eff);
            let left = l_fac.leading(r_eff);
            let (u, s, v) = deterministic_svd(&(left.transpose() * &right))?;
            (u, s, v, right, left)
        }
        SvdMode::Full => {
            let (u, s, v) = deterministic_svd(&(l_fac.factor.transpose() * &r_fac.factor))?;
            (u, s, v, r_fac.factor.clone(), l_fac.factor.clone())
        }
    };
    // singular values that would blow up Σ^{-1/2}
    let floor = s[0] * T::eps() * T::lit(s.len().max(1) as f64);
    r_eff = r_eff.min(s.iter().take_while(|&&v| v > floor).count());

    let mut t_r = &right * v.columns(0, r_eff);
    let mut t_l = u.columns(0, r_eff).transpose() * left.transpose();
    for i in 0..r_eff {
        let scale = T::one() / s[i].sqrt();
        t_r.column_mut(i).scale_mut(scale);
        t_l.row_mut(i).scale_mut(scale);
    }

    Ok(ReductionBasis {
        t_r,
        t_l,
        singular_values: ladder.iter().copied().collect(),
        method,
        r: r_eff,
        requested_r: (r_eff < r).then_some(r),
        shift: opts.shift.map(T::lit),
    })
}

/// Normalized singular-value ladders of both balancing methods.
#[derive(Debug, Clone, PartialEq)]
pub struct SvLadders<T: Real> {
    pub bt: Vec<T>,
    pub lqg_bt: Vec<T>,
    pub shift: Option<f64>,
}

/// Gramian eigenvalue cutoff used for the reported ladders; smaller than
/// the basis cutoff so the tail of the ladder is visible.
pub const LADDER_RANK_TOL: f64 = 1e-15;

/// Ladders `σ_i/σ_1` of `LᵀR` for BT and LQG-BT. A marginally stable `A`
/// is shifted by [`DEFAULT_SHIFT`] for both.
pub fn singular_value_report<T: Real>(sys: &LtiSystem<T>, r_ctrl: &DMatrix<T>) -> Result<SvLadders<T>> {
    let opts = BalanceOptions { rank_tol: LADDER_RANK_TOL, ..BalanceOptions::default() }
        .with_shift(stabilizing_shift(&sys.a)?);
    let bt = balanced_truncation_with(sys, 1, &opts)?;
    let lqg = lqg_balanced_truncation_with(sys, r_ctrl, 1, &opts)?;
    Ok(SvLadders {
        bt: normalize(&bt.singular_values),
        lqg_bt: normalize(&lqg.singular_values),
        shift: opts.shift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(a: f64) -> LtiSystem<f64> {
        LtiSystem::new(
            DMatrix::from_element(1, 1, a),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
        )
        .unwrap()
    }

    #[test]
    fn scalar_lqg() {
        let basis = lqg_balanced_truncation(&scalar(-1.0), &DMatrix::identity(1, 1), 1).unwrap();
        let expected = 2f64.sqrt() - 1.0;
        assert!((basis.singular_values[0] - expected).abs() < 1e-12);
        assert!((basis.t_l[(0, 0)] * basis.t_r[(0, 0)] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn balanced_diagonal_system_is_identity() {
        // P = Q = diag(1/2, 1/4) for A = diag(-1,-2), B = Cᵀ = diag(1,1)
        let sys = LtiSystem::new(
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, -2.0])),
            DMatrix::identity(2, 2),
            DMatrix::identity(2, 2),
        )
        .unwrap();
        let basis: ReductionBasis<f64> = balanced_truncation(&sys, 2).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((basis.t_r[(i, j)].abs() - expected).abs() < 1e-12);
            }
        }
        assert!((basis.singular_values[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn unstable_rejected_and_marginal_shifted() {
        assert!(matches!(balanced_truncation(&scalar(0.0), 1), Err(Error::NotStable { .. })));
        assert_eq!(stabilizing_shift(&DMatrix::from_element(1, 1, 0.0)).unwrap(), Some(DEFAULT_SHIFT));
        assert_eq!(stabilizing_shift(&DMatrix::from_element(1, 1, -1.0)).unwrap(), None);
        let ladders = singular_value_report(&scalar(0.0), &DMatrix::identity(1, 1)).unwrap();
        assert_eq!(ladders.bt[0], 1.0);
        assert_eq!(ladders.shift, Some(DEFAULT_SHIFT));
    }

    #[test]
    fn rank_clamp_is_reported() {
        // one uncontrollable mode
        let sys = LtiSystem::new(
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, -2.0])),
            DMatrix::from_row_slice(2, 1, &[1.0, 0.0]),
            DMatrix::from_row_slice(1, 2, &[1.0, 1.0]),
        )
        .unwrap();
        let basis = balanced_truncation(&sys, 2).unwrap();
        assert_eq!(basis.r, 1);
        assert_eq!(basis.requested_r, Some(2));
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(balanced_truncation(&scalar(-1.0), 0).is_err());
    }
}
