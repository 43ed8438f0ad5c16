use nalgebra::DVector;

use crate::dynamics::ControlledSystem;
use crate::error::{Error, Result};
use crate::ilqr::cost::QuadraticCost;
use crate::ilqr::solver::{ilqr_solve, IlqrConfig, IlqrError, IlqrResult};
use crate::scalar::Real;

/// Final-grid result of [`coarse_to_fine`] plus the iteration count of every
/// stage, coarsest first.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseToFine<T: Real> {
    pub result: IlqrResult<T>,
    pub stage_iterations: Vec<usize>,
}

/// Zero-order-hold prolongation of `controls` onto a grid `factor` times
/// finer.
pub fn prolong_zoh<T: Real>(controls: &[DVector<T>], factor: usize) -> Vec<DVector<T>> {
    controls
        .iter()
        .flat_map(|u| std::iter::repeat_n(u.clone(), factor))
        .collect()
}

fn check_schedule(schedule: &[usize]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("schedule must not be empty".into()));
    }
    if schedule[0] == 0 {
        return Err(Error::InvalidArgument("horizon lengths must be positive".into()));
    }
    for w in schedule.windows(2) {
        if w[1] <= w[0] || w[1] % w[0] != 0 {
            return Err(Error::InvalidArgument(format!(
                "schedule must be strictly increasing with each entry dividing the next, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

/// Solves on each horizon of `schedule` in turn, starting every stage from
/// the previous stage's controls held piecewise constant. The coarsest stage
/// starts from zero controls.
///
/// `factory(N)` builds the system discretized for horizon `N`. A stage that
/// hits the iteration cap still hands its best iterate to the next stage;
/// only the final stage's outcome decides success.
pub fn coarse_to_fine<T, S, F>(
    mut factory: F,
    cost: &QuadraticCost<T>,
    x0: &DVector<T>,
    schedule: &[usize],
    config: &IlqrConfig,
) -> std::result::Result<CoarseToFine<T>, IlqrError<T>>
where
    T: Real,
    S: ControlledSystem<T>,
    F: FnMut(usize) -> Result<S>,
{
    check_schedule(schedule)?;
    let m = cost.control_dim();
    let mut controls = vec![DVector::zeros(m); schedule[0]];
    let mut stage_iterations = Vec::with_capacity(schedule.len());

    for (i, &horizon) in schedule.iter().enumerate() {
        if i > 0 {
            controls = prolong_zoh(&controls, horizon / schedule[i - 1]);
        }
        let sys = factory(horizon)?;
        let last = i + 1 == schedule.len();
        match ilqr_solve(&sys, cost, x0, controls, config) {
            Ok(res) => {
                stage_iterations.push(res.iterations);
                if last {
                    return Ok(CoarseToFine { result: res, stage_iterations });
                }
                controls = res.controls;
            }
            Err(IlqrError::MaxIterationsReached { partial, diverged }) => {
                stage_iterations.push(partial.iterations);
                if last {
                    return Err(IlqrError::MaxIterationsReached { partial, diverged });
                }
                controls = partial.controls;
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!("schedule is non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::LinearMap;
    use nalgebra::DMatrix;

    #[test]
    fn zero_controls_prolong_to_zero() {
        let out = prolong_zoh(&vec![DVector::<f64>::zeros(2); 3], 4);
        assert_eq!(out.len(), 12);
        assert!(out.iter().all(|u| u.norm() == 0.0));
    }

    #[test]
    fn prolongation_holds_values() {
        let u = vec![DVector::from_element(1, 1.0), DVector::from_element(1, 2.0)];
        let out: Vec<f64> = prolong_zoh(&u, 3).iter().map(|v| v[0]).collect();
        assert_eq!(out, vec![1.0, 1.0, 1.0, 2.0, 2.0, 2.0]);
    }

    #[test]
    fn bad_schedules_rejected() {
        assert!(check_schedule(&[]).is_err());
        assert!(check_schedule(&[0, 4]).is_err());
        assert!(check_schedule(&[4, 4]).is_err());
        assert!(check_schedule(&[4, 6]).is_err());
        assert!(check_schedule(&[2, 10, 500]).is_ok());
    }

    #[test]
    fn single_stage_matches_direct_solve() {
        let sys = LinearMap::new(DMatrix::from_element(1, 1, 0.95), DMatrix::from_element(1, 1, 0.1)).unwrap();
        let cost = QuadraticCost::new(
            DMatrix::identity(1, 1),
            DMatrix::identity(1, 1),
            DMatrix::identity(1, 1),
            DVector::zeros(1),
        )
        .unwrap();
        let x0 = DVector::from_element(1, 1.0);
        let cfg = IlqrConfig::with_tol(1e-10);
        let staged = coarse_to_fine(|_| Ok(sys.clone()), &cost, &x0, &[8], &cfg).unwrap();
        let direct = ilqr_solve(&sys, &cost, &x0, vec![DVector::zeros(1); 8], &cfg).unwrap();
        assert_eq!(staged.result, direct);
        assert_eq!(staged.stage_iterations, vec![direct.iterations]);
    }
}
