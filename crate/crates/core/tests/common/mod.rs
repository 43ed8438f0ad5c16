#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use romilqr::linalg::spectral_abscissa;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn normal_vec(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Random Hurwitz matrix with spectral abscissa `-margin`.
pub fn stable(rng: &mut ChaCha8Rng, n: usize, margin: f64) -> DMatrix<f64> {
    let m = normal(rng, n, n) / (n as f64).sqrt();
    let alpha = spectral_abscissa(&m).unwrap();
    m - DMatrix::identity(n, n) * (alpha + margin)
}

/// Random Schur-stable matrix with spectral radius `rho`.
pub fn schur_stable(rng: &mut ChaCha8Rng, n: usize, rho: f64) -> DMatrix<f64> {
    let m = normal(rng, n, n);
    let radius = m.clone().complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
    m * (rho / radius)
}

pub fn spd(rng: &mut ChaCha8Rng, n: usize, shift: f64) -> DMatrix<f64> {
    let m = normal(rng, n, n);
    &m * m.transpose() / n as f64 + DMatrix::identity(n, n) * shift
}

pub fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Dense `n²×n²` Kronecker solve of `A X + X Aᵀ + W = 0`.
pub fn kron_lyapunov(a: &DMatrix<f64>, w: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let op = eye.kronecker(a) + a.kronecker(&eye);
    let rhs = -DVector::from_column_slice(w.as_slice());
    let x = op.lu().solve(&rhs).unwrap();
    DMatrix::from_column_slice(n, n, x.as_slice())
}

/// `C (sI − A)⁻¹ B` at `s = iω`, as real and imaginary parts.
pub fn transfer(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>, omega: f64) -> DMatrix<nalgebra::Complex<f64>> {
    use nalgebra::Complex;
    let n = a.nrows();
    let s = Complex::new(0.0, omega);
    let m = DMatrix::from_fn(n, n, |i, j| {
        let d = if i == j { s } else { Complex::new(0.0, 0.0) };
        d - Complex::new(a[(i, j)], 0.0)
    });
    let bc = b.map(|v| Complex::new(v, 0.0));
    let cc = c.map(|v| Complex::new(v, 0.0));
    let x = m.lu().solve(&bc).unwrap();
    cc * x
}

/// Largest singular value of a complex matrix.
pub fn spectral_norm(m: &DMatrix<nalgebra::Complex<f64>>) -> f64 {
    m.clone().singular_values().max()
}
