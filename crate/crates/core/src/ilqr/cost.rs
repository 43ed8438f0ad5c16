use nalgebra::{DMatrix, DVector};

use crate::error::{dims, Error, Result};
use crate::linalg::{ensure_len, ensure_square, relative_asymmetry, sorted_symmetric_eigen, spd_factor};
use crate::scalar::Real;

const SYMMETRY_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// `J = (x_N − x*)ᵀ Q_f (x_N − x*) + Σ_{k<N} (x_kᵀ Q x_k + u_kᵀ R u_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticCost<T: Real> {
    pub q: DMatrix<T>,
    pub q_f: DMatrix<T>,
    pub r: DMatrix<T>,
    pub x_star: DVector<T>,
}

impl<T: Real> QuadraticCost<T> {
    /// Validates symmetry of all weights, PSD-ness of `Q` and `Q_f`, and
    /// positive definiteness of `R`.
    pub fn new(q: DMatrix<T>, q_f: DMatrix<T>, r: DMatrix<T>, x_star: DVector<T>) -> Result<Self> {
        let n = ensure_square(&q, "QuadraticCost Q")?;
        if q_f.shape() != (n, n) {
            return Err(dims("QuadraticCost Q_f", format!("{n}x{n}"), format!("{}x{}", q_f.nrows(), q_f.ncols())));
        }
        ensure_square(&r, "QuadraticCost R")?;
        ensure_len(&x_star, n, "QuadraticCost x_star")?;
        for m in [&q, &q_f, &r] {
            let asym = relative_asymmetry(m);
            if asym > T::lit(SYMMETRY_TOL) {
                return Err(Error::NotSymmetric { asymmetry: asym.as_f64() });
            }
        }
        for m in [&q, &q_f] {
            if n == 0 {
                break;
            }
            let (vals, _) = sorted_symmetric_eigen(m);
            let scale = vals[0].abs().max(vals[n - 1].abs());
            let threshold = T::lit(PSD_TOL) * scale;
            if vals[n - 1] < -threshold {
                return Err(Error::NotPsd {
                    min_eigenvalue: vals[n - 1].as_f64(),
                    threshold: threshold.as_f64(),
                });
            }
        }
        if spd_factor(&r).is_none() {
            return Err(Error::NotPositiveDefinite { step: 0 });
        }
        Ok(Self { q, q_f, r, x_star })
    }

    pub fn state_dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn control_dim(&self) -> usize {
        self.r.nrows()
    }

    /// Running term `xᵀ Q x + uᵀ R u`.
    pub fn stage(&self, x: &DVector<T>, u: &DVector<T>) -> T {
        x.dot(&(&self.q * x)) + u.dot(&(&self.r * u))
    }

    /// Terminal term `(x − x*)ᵀ Q_f (x − x*)`.
    pub fn terminal(&self, x: &DVector<T>) -> T {
        let e = x - &self.x_star;
        e.dot(&(&self.q_f * &e))
    }
}

/// Total cost of a trajectory `x_0..x_N` under controls `u_0..u_{N−1}`.
pub fn evaluate_cost<T: Real>(
    cost: &QuadraticCost<T>,
    trajectory: &[DVector<T>],
    controls: &[DVector<T>],
) -> Result<T> {
    if trajectory.len() != controls.len() + 1 {
        return Err(dims("evaluate_cost trajectory length", controls.len() + 1, trajectory.len()));
    }
    let (n, m) = (cost.state_dim(), cost.control_dim());
    let mut total = T::zero();
    for (x, u) in trajectory.iter().zip(controls) {
        ensure_len(x, n, "evaluate_cost state")?;
        ensure_len(u, m, "evaluate_cost control")?;
        total += cost.stage(x, u);
    }
    let last = trajectory.last().expect("non-empty");
    ensure_len(last, n, "evaluate_cost state")?;
    Ok(total + cost.terminal(last))
}
