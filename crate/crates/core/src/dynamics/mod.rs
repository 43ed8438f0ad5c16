//! Controlled dynamical systems: the discrete-time interface consumed by the
//! optimizer, quadratic-in-state continuous-time models, and the implicit
//! integrator connecting the two.

mod euler;
mod quad;
mod quadratic;

use nalgebra::{DMatrix, DVector};

use crate::error::{dims, Error, Result};
use crate::linalg::{ensure_len, ensure_square};
use crate::scalar::Real;

pub use euler::{
    backward_euler_step, discretized_jacobians, DiscretizedSystem, LmSettings,
    JACOBIAN_CONDITION_LIMIT,
};
pub use quad::{quad_apply, quad_jacobian, QuadEntry, QuadTensor};
pub use quadratic::{QuadraticSystem, QuadraticSystemDoc};

/// Discrete-time dynamics `x_{k+1} = f(x_k, u_k)` with Jacobian access.
pub trait ControlledSystem<T: Real> {
    fn state_dim(&self) -> usize;
    fn control_dim(&self) -> usize;

    fn step(&self, x: &DVector<T>, u: &DVector<T>) -> Result<DVector<T>>;

    /// `(D_x f, D_u f)` at `(x, u)`.
    fn linearize(&self, x: &DVector<T>, u: &DVector<T>) -> Result<(DMatrix<T>, DMatrix<T>)>;

    /// Same as [`linearize`](Self::linearize) when `next = f(x, u)` is
    /// already known; implicit integrators use it to skip a solve.
    fn linearize_at(
        &self,
        x: &DVector<T>,
        u: &DVector<T>,
        _next: &DVector<T>,
    ) -> Result<(DMatrix<T>, DMatrix<T>)> {
        self.linearize(x, u)
    }

    fn jacobian_x(&self, x: &DVector<T>, u: &DVector<T>) -> Result<DMatrix<T>> {
        Ok(self.linearize(x, u)?.0)
    }

    fn jacobian_u(&self, x: &DVector<T>, u: &DVector<T>) -> Result<DMatrix<T>> {
        Ok(self.linearize(x, u)?.1)
    }
}

impl<T: Real, S: ControlledSystem<T> + ?Sized> ControlledSystem<T> for &S {
    fn state_dim(&self) -> usize {
        (**self).state_dim()
    }
    fn control_dim(&self) -> usize {
        (**self).control_dim()
    }
    fn step(&self, x: &DVector<T>, u: &DVector<T>) -> Result<DVector<T>> {
        (**self).step(x, u)
    }
    fn linearize(&self, x: &DVector<T>, u: &DVector<T>) -> Result<(DMatrix<T>, DMatrix<T>)> {
        (**self).linearize(x, u)
    }
    fn linearize_at(
        &self,
        x: &DVector<T>,
        u: &DVector<T>,
        next: &DVector<T>,
    ) -> Result<(DMatrix<T>, DMatrix<T>)> {
        (**self).linearize_at(x, u, next)
    }
}

/// Rolls `sys` forward from `x0` under `controls`, returning `N+1` states.
pub fn simulate<T: Real, S: ControlledSystem<T> + ?Sized>(
    sys: &S,
    x0: &DVector<T>,
    controls: &[DVector<T>],
) -> Result<Vec<DVector<T>>> {
    if controls.is_empty() {
        return Err(Error::InvalidArgument("simulate needs at least one control".into()));
    }
    ensure_len(x0, sys.state_dim(), "simulate x0")?;
    let mut traj = Vec::with_capacity(controls.len() + 1);
    traj.push(x0.clone());
    for (k, u) in controls.iter().enumerate() {
        let next = sys
            .step(&traj[k], u)
            .map_err(|e| Error::StepFailed { k, source: Box::new(e) })?;
        traj.push(next);
    }
    Ok(traj)
}

/// Discrete LTI map `x⁺ = A x + B u`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap<T: Real> {
    pub a: DMatrix<T>,
    pub b: DMatrix<T>,
}

impl<T: Real> LinearMap<T> {
    pub fn new(a: DMatrix<T>, b: DMatrix<T>) -> Result<Self> {
        let n = ensure_square(&a, "LinearMap A")?;
        if b.nrows() != n {
            return Err(dims("LinearMap B rows", n, b.nrows()));
        }
        Ok(Self { a, b })
    }
}

impl<T: Real> ControlledSystem<T> for LinearMap<T> {
    fn state_dim(&self) -> usize {
        self.a.nrows()
    }
    fn control_dim(&self) -> usize {
        self.b.ncols()
    }
    fn step(&self, x: &DVector<T>, u: &DVector<T>) -> Result<DVector<T>> {
        ensure_len(x, self.state_dim(), "LinearMap x")?;
        ensure_len(u, self.control_dim(), "LinearMap u")?;
        Ok(&self.a * x + &self.b * u)
    }
    fn linearize(&self, _x: &DVector<T>, _u: &DVector<T>) -> Result<(DMatrix<T>, DMatrix<T>)> {
        Ok((self.a.clone(), self.b.clone()))
    }
}

/// Discrete quadratic map `x⁺ = A x + G(x ⊗ x) + B u`; with `A = 0` this
/// is the purely quadratic form studied for the iteration lower bound.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticMap<T: Real> {
    pub a: DMatrix<T>,
    pub g: QuadTensor<T>,
    pub b: DMatrix<T>,
}

impl<T: Real> QuadraticMap<T> {
    pub fn new(a: DMatrix<T>, g: QuadTensor<T>, b: DMatrix<T>) -> Result<Self> {
        let n = ensure_square(&a, "QuadraticMap A")?;
        if g.rows() != n || g.state_dim() != n {
            return Err(dims("QuadraticMap G", format!("{n}x{}", n * n), format!("{}x{}", g.rows(), g.state_dim().pow(2))));
        }
        if b.nrows() != n {
            return Err(dims("QuadraticMap B rows", n, b.nrows()));
        }
        Ok(Self { a, g, b })
    }

    pub fn pure(g: QuadTensor<T>, b: DMatrix<T>) -> Result<Self> {
        let n = g.state_dim();
        Self::new(DMatrix::zeros(n, n), g, b)
    }
}

impl<T: Real> ControlledSystem<T> for QuadraticMap<T> {
    fn state_dim(&self) -> usize {
        self.a.nrows()
    }
    fn control_dim(&self) -> usize {
        self.b.ncols()
    }
    fn step(&self, x: &DVector<T>, u: &DVector<T>) -> Result<DVector<T>> {
        ensure_len(u, self.control_dim(), "QuadraticMap u")?;
        Ok(&self.a * x + self.g.apply(x)? + &self.b * u)
    }
    fn linearize(&self, x: &DVector<T>, _u: &DVector<T>) -> Result<(DMatrix<T>, DMatrix<T>)> {
        Ok((&self.a + self.g.jacobian(x)?, self.b.clone()))
    }
}

/// Replaces the Jacobians of `inner` with central finite differences of its
/// `step`, perturbation `rel_step · (1 + ‖x‖)`.
#[derive(Debug, Clone)]
pub struct FiniteDifference<S> {
    pub inner: S,
    pub rel_step: f64,
}

impl<S> FiniteDifference<S> {
    pub fn new(inner: S) -> Self {
        Self { inner, rel_step: 1e-6 }
    }
}

impl<T: Real, S: ControlledSystem<T>> ControlledSystem<T> for FiniteDifference<S> {
    fn state_dim(&self) -> usize {
        self.inner.state_dim()
    }
    fn control_dim(&self) -> usize {
        self.inner.control_dim()
    }
    fn step(&self, x: &DVector<T>, u: &DVector<T>) -> Result<DVector<T>> {
        self.inner.step(x, u)
    }
    fn linearize(&self, x: &DVector<T>, u: &DVector<T>) -> Result<(DMatrix<T>, DMatrix<T>)> {
        let (n, m) = (self.state_dim(), self.control_dim());
        let h = T::lit(self.rel_step) * (T::one() + x.norm());
        let two_h = h + h;
        let mut ax = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            ax.set_column(j, &((self.inner.step(&xp, u)? - self.inner.step(&xm, u)?) / two_h));
        }
        let mut bu = DMatrix::zeros(n, m);
        for j in 0..m {
            let mut up = u.clone();
            let mut um = u.clone();
            up[j] += h;
            um[j] -= h;
            bu.set_column(j, &((self.inner.step(x, &up)? - self.inner.step(x, &um)?) / two_h));
        }
        Ok((ax, bu))
    }
}
