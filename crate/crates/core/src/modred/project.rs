use crate::dynamics::QuadraticSystem;
use crate::error::{dims, Result};
use crate::modred::ReductionBasis;
use crate::scalar::Real;

/// Petrov-Galerkin reduction of `sys` onto `basis`. The quadratic term is
/// contracted against `T_r` column by column, never forming `T_r ⊗ T_r`.
pub fn project_quadratic<T: Real>(sys: &QuadraticSystem<T>, basis: &ReductionBasis<T>) -> Result<QuadraticSystem<T>> {
    let n = sys.state_dim();
    if basis.t_r.nrows() != n || basis.t_l.ncols() != n {
        return Err(dims(
            "project_quadratic basis",
            format!("{n}x{0} and {0}x{n}", basis.r),
            format!(
                "{}x{} and {}x{}",
                basis.t_r.nrows(),
                basis.t_r.ncols(),
                basis.t_l.nrows(),
                basis.t_l.ncols()
            ),
        ));
    }
    let t_r = &basis.t_r;
    let t_l = &basis.t_l;
    QuadraticSystem::new(
        t_l * &sys.a * t_r,
        sys.g.project(t_l, t_r)?,
        t_l * &sys.b,
        &sys.c * t_r,
        t_l * &sys.x0,
    )
}
