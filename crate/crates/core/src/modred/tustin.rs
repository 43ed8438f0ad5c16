use nalgebra::DMatrix;

use crate::error::{dims, Error, Result};
use crate::linalg::ensure_square;
use crate::scalar::Real;

fn check<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>, dt: T) -> Result<usize> {
    let n = ensure_square(a, "Tustin A")?;
    if b.nrows() != n {
        return Err(dims("Tustin B rows", n, b.nrows()));
    }
    if !(dt > T::zero()) {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    Ok(n)
}

/// Inverse bilinear transform:
/// `A_c = (2/dt)(A_d − I)(A_d + I)⁻¹`, `B_c = (2/√dt)(A_d + I)⁻¹ B_d`.
pub fn tustin_d2c<T: Real>(a_d: &DMatrix<T>, b_d: &DMatrix<T>, dt: T) -> Result<(DMatrix<T>, DMatrix<T>)> {
    let n = check(a_d, b_d, dt)?;
    let eye = DMatrix::<T>::identity(n, n);
    let plus = (a_d + &eye).lu();
    let inv = plus
        .try_inverse()
        .ok_or(Error::Singular { context: "Tustin: A_d + I (discrete eigenvalue at -1)" })?;
    let two = T::lit(2.0);
    let a_c = (a_d - &eye) * &inv * (two / dt);
    let b_c = &inv * b_d * (two / dt.sqrt());
    Ok((a_c, b_c))
}

/// Forward bilinear transform:
/// `A_d = (I − dt/2·A_c)⁻¹(I + dt/2·A_c)`, `B_d = √dt·(I − dt/2·A_c)⁻¹ B_c`.
pub fn tustin_c2d<T: Real>(a_c: &DMatrix<T>, b_c: &DMatrix<T>, dt: T) -> Result<(DMatrix<T>, DMatrix<T>)> {
    let n = check(a_c, b_c, dt)?;
    let eye = DMatrix::<T>::identity(n, n);
    let half = dt / T::lit(2.0);
    let minus = (&eye - a_c * half).lu();
    let a_d = minus
        .solve(&(&eye + a_c * half))
        .ok_or(Error::Singular { context: "Tustin: I - dt/2 A_c" })?;
    let b_d = minus
        .solve(b_c)
        .ok_or(Error::Singular { context: "Tustin: I - dt/2 A_c" })?
        * dt.sqrt();
    Ok((a_d, b_d))
}
