//! Dense continuous-time matrix equations: Lyapunov, LQG Riccati, and
//! low-rank factor extraction for Gramian-like solutions.

mod care;
mod factor;
mod lyapunov;

use nalgebra::DMatrix;

use crate::error::{dims, Result};
use crate::scalar::Real;

pub use care::{care_residual, solve_care, CareVariant, NEWTON_KLEINMAN_MAX_ITER, NEWTON_KLEINMAN_TOL};
pub use factor::{psd_factor, psd_factor_clamped, SymPosSemiDefFactor, DEFAULT_RANK_TOL};
pub use lyapunov::{
    solve_lyapunov, solve_lyapunov_kronecker, solve_lyapunov_schur, KRONECKER_MAX_DIM,
    STABILITY_MARGIN,
};

/// Continuous-time LTI triple `ẋ = Ax + Bu, y = Cx`.
#[derive(Debug, Clone, PartialEq)]
pub struct LtiSystem<T: Real> {
    pub a: DMatrix<T>,
    pub b: DMatrix<T>,
    pub c: DMatrix<T>,
}

impl<T: Real> LtiSystem<T> {
    pub fn new(a: DMatrix<T>, b: DMatrix<T>, c: DMatrix<T>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(dims("LtiSystem A", "square", format!("{}x{}", n, a.ncols())));
        }
        if b.nrows() != n {
            return Err(dims("LtiSystem B rows", n, b.nrows()));
        }
        if c.ncols() != n {
            return Err(dims("LtiSystem C cols", n, c.ncols()));
        }
        Ok(Self { a, b, c })
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.c.nrows()
    }
}
