//! Periodic viscous Burgers equation on `[0, 1)` discretized with linear
//! finite elements and `m` piecewise-constant interval controls.
//!
//! Nodes sit at `ξ_i = i/n`, `i = 0..n−1`, with node `n` identified with
//! node `0`. The consistent mass matrix is used throughout.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::{DiscretizedSystem, QuadTensor, QuadraticSystem};
use crate::error::{Error, Result};
use crate::ilqr::QuadraticCost;
use crate::linalg::spd_factor;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BurgersConfig {
    pub n: usize,
    pub m: usize,
    pub epsilon: f64,
    pub t_final: f64,
    #[serde(alias = "N")]
    pub steps: usize,
    #[serde(alias = "R_scale")]
    pub r_scale: f64,
}

impl Default for BurgersConfig {
    fn default() -> Self {
        Self { n: 101, m: 5, epsilon: 5e-3, t_final: 5.0, steps: 500, r_scale: 1e3 }
    }
}

impl BurgersConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::ConfigInvalid(msg));
        if self.n < 3 {
            return bad(format!("n must be at least 3, got {}", self.n));
        }
        if self.m < 1 {
            return bad("m must be at least 1".into());
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return bad(format!("t_final must be positive, got {}", self.t_final));
        }
        if self.steps < 1 {
            return bad("steps must be at least 1".into());
        }
        if !(self.r_scale > 0.0) || !self.r_scale.is_finite() {
            return bad(format!("r_scale must be positive, got {}", self.r_scale));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.steps as f64
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| i as f64 / self.n as f64).collect()
    }
}

/// `z_0(ξ) = 0.5·sin²(2πξ)` on `[0, 0.5]`, zero elsewhere.
pub fn initial_profile(xi: f64) -> f64 {
    if (0.0..=0.5).contains(&xi) {
        0.5 * (2.0 * std::f64::consts::PI * xi).sin().powi(2)
    } else {
        0.0
    }
}

fn circulant<T: Real>(n: usize, diag: f64, off: f64) -> DMatrix<T> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] += T::lit(diag);
        m[(i, (i + 1) % n)] += T::lit(off);
        m[(i, (i + n - 1) % n)] += T::lit(off);
    }
    m
}

/// Periodic consistent mass matrix.
pub fn mass_matrix<T: Real>(n: usize) -> DMatrix<T> {
    let h = 1.0 / n as f64;
    circulant(n, 2.0 * h / 3.0, h / 6.0)
}

/// Periodic stiffness matrix `∫φ_i'φ_j'`.
pub fn stiffness_matrix<T: Real>(n: usize) -> DMatrix<T> {
    let h = 1.0 / n as f64;
    circulant(n, 2.0 / h, -1.0 / h)
}

/// Galerkin tensor of `½(z²)_ξ`:
/// `(1/6)·(z_{i+1}² + z_i z_{i+1} − z_{i−1}² − z_{i−1} z_i)`.
pub fn convection_tensor<T: Real>(n: usize) -> Result<QuadTensor<T>> {
    let sixth = 1.0 / 6.0;
    let mut triplets = Vec::with_capacity(4 * n);
    for i in 0..n {
        let next = (i + 1) % n;
        let prev = (i + n - 1) % n;
        triplets.push((i, next * n + next, T::lit(sixth)));
        triplets.push((i, i * n + next, T::lit(sixth)));
        triplets.push((i, prev * n + prev, T::lit(-sixth)));
        triplets.push((i, prev * n + i, T::lit(-sixth)));
    }
    QuadTensor::from_triplets(n, n, triplets)
}

/// `∫_{-∞}^t` of the unit hat centered at `c` with half-width `h`.
fn hat_primitive(t: f64, c: f64, h: f64) -> f64 {
    let s = ((t - c) / h).clamp(-1.0, 1.0);
    if s < 0.0 {
        h * (1.0 + s).powi(2) / 2.0
    } else {
        h * (1.0 - (1.0 - s).powi(2) / 2.0)
    }
}

/// `B_load(i, k) = ∫ φ_i χ_{[k/m, (k+1)/m]} dξ`, exact for intervals that
/// cut through elements.
pub fn load_matrix<T: Real>(n: usize, m: usize) -> DMatrix<T> {
    let h = 1.0 / n as f64;
    DMatrix::from_fn(n, m, |i, k| {
        let (a, b) = (k as f64 / m as f64, (k + 1) as f64 / m as f64);
        let xi = i as f64 * h;
        // periodic images of the hat that can meet [0, 1]
        let v: f64 = [xi - 1.0, xi, xi + 1.0]
            .iter()
            .map(|&c| hat_primitive(b, c, h) - hat_primitive(a, c, h))
            .sum();
        T::lit(v)
    })
}

/// Nodal samples of the initial profile.
pub fn initial_state<T: Real>(n: usize) -> DVector<T> {
    DVector::from_fn(n, |i, _| T::lit(initial_profile(i as f64 / n as f64)))
}

/// `ẋ = A x + G(x⊗x) + B u`, `y = x` with `A = −εM⁻¹K`,
/// `G = −M⁻¹G_conv`, `B = M⁻¹B_load`.
pub fn assemble_burgers<T: Real>(config: &BurgersConfig) -> Result<QuadraticSystem<T>> {
    config.validate()?;
    let n = config.n;
    let mass = spd_factor(&mass_matrix::<T>(n)).ok_or(Error::Singular { context: "Burgers mass matrix" })?;
    let a = mass.solve(&stiffness_matrix::<T>(n)) * T::lit(-config.epsilon);
    let b = mass.solve(&load_matrix::<T>(n, config.m));

    // M⁻¹ applied to every column of the convection tensor
    let mut columns = std::collections::BTreeMap::<usize, DVector<T>>::new();
    for (row, col, v) in convection_tensor::<T>(n)?.triplets() {
        columns.entry(col).or_insert_with(|| DVector::zeros(n))[row] += v;
    }
    let mut triplets = Vec::new();
    let drop = T::eps() * T::lit(1e-2);
    for (col, dense) in columns {
        let solved = mass.solve(&dense);
        let scale = solved.amax();
        for (row, v) in solved.iter().enumerate() {
            if v.abs() > drop * scale {
                triplets.push((row, col, -*v));
            }
        }
    }
    let g = QuadTensor::from_triplets(n, n, triplets)?;
    QuadraticSystem::new(a, g, b, DMatrix::identity(n, n), initial_state(n))
}

/// Backward-Euler discretization with `dt = t_final / steps`.
pub fn discretize_burgers<T: Real>(config: &BurgersConfig) -> Result<DiscretizedSystem<T>> {
    DiscretizedSystem::new(assemble_burgers(config)?, T::lit(config.dt()))
}

/// `Q = Q_f = I_n`, `R = r_scale·I_m`, `x* = 0`.
pub fn burgers_cost<T: Real>(config: &BurgersConfig) -> Result<QuadraticCost<T>> {
    config.validate()?;
    let (n, m) = (config.n, config.m);
    QuadraticCost::new(
        DMatrix::identity(n, n),
        DMatrix::identity(n, n),
        DMatrix::identity(m, m) * T::lit(config.r_scale),
        DVector::zeros(n),
    )
}

/// `max_k |1ᵀM x_k − 1ᵀM x_0|`.
pub fn mass_conservation_check<T: Real>(trajectory: &[DVector<T>]) -> T {
    let Some(first) = trajectory.first() else {
        return T::zero();
    };
    // 1ᵀM = h·1ᵀ on a uniform periodic grid
    let h = T::one() / T::lit(first.len() as f64);
    let m0 = first.sum() * h;
    trajectory.iter().fold(T::zero(), |acc, x| acc.max((x.sum() * h - m0).abs()))
}
