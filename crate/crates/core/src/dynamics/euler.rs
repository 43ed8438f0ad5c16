//! Implicit backward-Euler stepping of quadratic systems.

use nalgebra::{DMatrix, DVector};

use crate::dynamics::{ControlledSystem, QuadraticSystem};
use crate::error::{Error, Result};
use crate::linalg::{ensure_len, norm_one, spd_factor};
use crate::scalar::Real;

/// Implicit-step Jacobians with a 1-norm condition estimate above this are
/// treated as singular.
pub const JACOBIAN_CONDITION_LIMIT: f64 = 1e12;

/// Levenberg-Marquardt schedule for the implicit step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmSettings {
    pub initial_damping: f64,
    pub increase: f64,
    pub decrease: f64,
}

impl Default for LmSettings {
    fn default() -> Self {
        Self { initial_damping: 1e-3, increase: 10.0, decrease: 10.0 }
    }
}

/// One backward-Euler step `x⁺ = x + dt·(A x⁺ + G(x⁺⊗x⁺) + B u)`.
///
/// The residual is driven below `tol · (1 + ‖x‖)` by Levenberg-Marquardt
/// started from `x⁺ = x`, using the analytic residual Jacobian
/// `I − dt·(A + G(x⁺⊗I + I⊗x⁺))`.
pub fn backward_euler_step<T: Real>(
    sys: &QuadraticSystem<T>,
    dt: T,
    x: &DVector<T>,
    u: &DVector<T>,
    tol: T,
    max_iter: usize,
) -> Result<DVector<T>> {
    lm_step(sys, dt, x, u, tol, max_iter, LmSettings::default())
}

fn residual<T: Real>(
    sys: &QuadraticSystem<T>,
    dt: T,
    x: &DVector<T>,
    forcing: &DVector<T>,
    y: &DVector<T>,
) -> Result<DVector<T>> {
    Ok(y - x - (&sys.a * y + sys.g.apply(y)? + forcing) * dt)
}

fn residual_jacobian<T: Real>(sys: &QuadraticSystem<T>, dt: T, y: &DVector<T>) -> DMatrix<T> {
    let n = sys.state_dim();
    let mut j = DMatrix::identity(n, n) - &sys.a * dt;
    sys.g.add_jacobian_to(y, -dt, &mut j);
    j
}

fn lm_step<T: Real>(
    sys: &QuadraticSystem<T>,
    dt: T,
    x: &DVector<T>,
    u: &DVector<T>,
    tol: T,
    max_iter: usize,
    lm: LmSettings,
) -> Result<DVector<T>> {
    if !(dt > T::zero()) {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    let n = sys.state_dim();
    ensure_len(x, n, "backward_euler_step x")?;
    ensure_len(u, sys.input_dim(), "backward_euler_step u")?;

    let forcing = &sys.b * u;
    let threshold = tol * (T::one() + x.norm());
    let mut y = x.clone();
    let mut f = residual(sys, dt, x, &forcing, &y)?;
    let mut f_norm = f.norm();
    let mut damping = T::lit(lm.initial_damping);
    let (up, down) = (T::lit(lm.increase), T::lit(lm.decrease));

    let mut iter = 0;
    while f_norm > threshold {
        if iter == max_iter {
            return Err(Error::NoConvergence {
                solver: "backward Euler (Levenberg-Marquardt)",
                iterations: iter,
                residual: f_norm.as_f64(),
            });
        }
        iter += 1;

        let j = residual_jacobian(sys, dt, &y);
        let jt = j.transpose();
        let mut normal = &jt * &j;
        for i in 0..n {
            normal[(i, i)] += damping;
        }
        let grad = &jt * &f;
        let delta = match spd_factor(&normal) {
            Some(c) => -c.solve(&grad),
            None => {
                damping *= up;
                continue;
            }
        };
        let trial = &y + &delta;
        let f_trial = residual(sys, dt, x, &forcing, &trial)?;
        let trial_norm = f_trial.norm();
        if trial_norm < f_norm {
            y = trial;
            f = f_trial;
            f_norm = trial_norm;
            damping /= down;
        } else {
            damping *= up;
        }
    }
    Ok(y)
}

/// `(A_k, B_k)` of the backward-Euler map at `(x, u)` by the implicit
/// function theorem: with `J = I − dt·(A + G(x⁺⊗I + I⊗x⁺))`,
/// `A_k = J⁻¹` and `B_k = J⁻¹·dt·B`.
pub fn discretized_jacobians<T: Real>(
    sys: &DiscretizedSystem<T>,
    x: &DVector<T>,
    u: &DVector<T>,
) -> Result<(DMatrix<T>, DMatrix<T>)> {
    let next = sys.step(x, u)?;
    sys.jacobians_at_next(&next)
}

/// A [`QuadraticSystem`] advanced by fixed-step backward Euler.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedSystem<T: Real> {
    pub base: QuadraticSystem<T>,
    pub dt: T,
    /// Relative residual tolerance; the step stops at `newton_tol · (1 + ‖x‖)`.
    pub newton_tol: T,
    pub newton_max_iter: usize,
}

impl<T: Real> DiscretizedSystem<T> {
    pub fn new(base: QuadraticSystem<T>, dt: T) -> Result<Self> {
        if !(dt > T::zero()) {
            return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
        }
        Ok(Self { base, dt, newton_tol: T::lit(1e-10), newton_max_iter: 50 })
    }

    pub fn with_tolerance(mut self, tol: T, max_iter: usize) -> Self {
        self.newton_tol = tol;
        self.newton_max_iter = max_iter;
        self
    }

    /// Jacobians of the step whose end state is `next`.
    pub fn jacobians_at_next(&self, next: &DVector<T>) -> Result<(DMatrix<T>, DMatrix<T>)> {
        let j = residual_jacobian(&self.base, self.dt, next);
        let j_norm = norm_one(&j);
        let inv = j
            .clone()
            .lu()
            .try_inverse()
            .ok_or(Error::SingularJacobian { condition: f64::INFINITY })?;
        let condition = j_norm * norm_one(&inv);
        if !(condition.as_f64() <= JACOBIAN_CONDITION_LIMIT) {
            return Err(Error::SingularJacobian { condition: condition.as_f64() });
        }
        let b = &inv * &self.base.b * self.dt;
        Ok((inv, b))
    }
}

impl<T: Real> ControlledSystem<T> for DiscretizedSystem<T> {
    fn state_dim(&self) -> usize {
        self.base.state_dim()
    }

    fn control_dim(&self) -> usize {
        self.base.input_dim()
    }

    fn step(&self, x: &DVector<T>, u: &DVector<T>) -> Result<DVector<T>> {
        backward_euler_step(&self.base, self.dt, x, u, self.newton_tol, self.newton_max_iter)
    }

    fn linearize(&self, x: &DVector<T>, u: &DVector<T>) -> Result<(DMatrix<T>, DMatrix<T>)> {
        discretized_jacobians(self, x, u)
    }

    fn linearize_at(
        &self,
        _x: &DVector<T>,
        _u: &DVector<T>,
        next: &DVector<T>,
    ) -> Result<(DMatrix<T>, DMatrix<T>)> {
        self.jacobians_at_next(next)
    }
}
