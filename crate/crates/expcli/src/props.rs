//! Self-checking batteries for the ILQR convergence properties.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use romilqr::dynamics::{DiscretizedSystem, LinearMap, QuadTensor, QuadraticMap, QuadraticSystem};
use romilqr::ilqr::{dt_lqr, ilqr_solve, Ilqr, IlqrConfig, QuadraticCost};
use romilqr::linalg::spectral_abscissa;
use serde::{Deserialize, Serialize};

use crate::error::CliResult;

pub const PROP2_SYSTEMS: usize = 50;
pub const PROP2_HORIZON: usize = 25;
pub const PROP2_CONTROL_TOL: f64 = 1e-8;
pub const PROP3_STATES: usize = 8;
pub const PROP3_HORIZON: usize = 10;
pub const PROP3_UPDATE_TOL: f64 = 1e-10;
pub const PROP1_HORIZONS: [usize; 2] = [250, 500];
pub const PROP1_RATIO_BAND: (f64, f64) = (1.7, 2.4);

fn normal(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample::<f64, _>(StandardNormal))
}

fn normal_vec(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

fn spd(rng: &mut ChaCha8Rng, n: usize, shift: f64) -> DMatrix<f64> {
    let m = normal(rng, n, n);
    &m * m.transpose() / n as f64 + DMatrix::identity(n, n) * shift
}

/// Random matrix scaled to spectral radius `rho`.
fn schur_stable(rng: &mut ChaCha8Rng, n: usize, rho: f64) -> DMatrix<f64> {
    let m = normal(rng, n, n);
    let radius = m.clone().complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
    m * (rho / radius)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtiBattery {
    pub systems: usize,
    pub horizon: usize,
    pub iterations: Vec<usize>,
    pub max_control_gap: f64,
    pub failures: Vec<String>,
    pub passed: bool,
}

/// Random Schur-stable LTI problems (`n ≤ 10`, `m ≤ 3`): ILQR from zero
/// controls must stop after one improving iteration at the DT-LQR controls.
pub fn lti_battery(seed: u64) -> CliResult<LtiBattery> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = IlqrConfig::with_tol(1e-9);
    let mut iterations = Vec::with_capacity(PROP2_SYSTEMS);
    let mut failures = Vec::new();
    let mut max_gap: f64 = 0.0;
    for i in 0..PROP2_SYSTEMS {
        let (n, m) = (2 + i % 9, 1 + i % 3);
        let sys = LinearMap::new(schur_stable(&mut rng, n, 0.95), normal(&mut rng, n, m))?;
        let cost = QuadraticCost::new(spd(&mut rng, n, 0.1), spd(&mut rng, n, 0.1), spd(&mut rng, m, 0.5), normal_vec(&mut rng, n))?;
        let x0 = normal_vec(&mut rng, n);
        let res = match ilqr_solve(&sys, &cost, &x0, vec![DVector::zeros(m); PROP2_HORIZON], &config) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("system {i}: {e}"));
                iterations.push(0);
                continue;
            }
        };
        let (u_lqr, _) = dt_lqr(&sys.a, &sys.b, &cost, PROP2_HORIZON, &x0)?;
        let gap = res.controls.iter().zip(&u_lqr).map(|(a, b)| (a - b).amax()).fold(0.0, f64::max);
        max_gap = max_gap.max(gap);
        iterations.push(res.iterations);
        if res.iterations != 1 {
            failures.push(format!("system {i}: {} iterations", res.iterations));
        }
        if !(gap <= PROP2_CONTROL_TOL) {
            failures.push(format!("system {i}: control gap {gap:.3e}"));
        }
    }
    Ok(LtiBattery {
        systems: PROP2_SYSTEMS,
        horizon: PROP2_HORIZON,
        iterations,
        max_control_gap: max_gap,
        passed: failures.is_empty(),
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpdateFrontBattery {
    pub states: usize,
    pub horizon: usize,
    /// Index of the first nonzero control after each of the first `N`
    /// iterations (`None` when all are zero).
    pub first_nonzero: Vec<Option<usize>>,
    pub front_moves_one_step_per_iteration: bool,
    pub terminal_update_error: f64,
    pub total_iterations: usize,
    pub passed: bool,
}

/// Random sparse `G` with entries in `[-0.5, 0.5)` at density `0.1`.
pub fn sparse_tensor(rng: &mut ChaCha8Rng, n: usize) -> romilqr::Result<QuadTensor<f64>> {
    let mut triplets = Vec::new();
    for row in 0..n {
        for col in 0..n * n {
            if rng.random::<f64>() < 0.1 {
                triplets.push((row, col, rng.random::<f64>() - 0.5));
            }
        }
    }
    QuadTensor::from_triplets(n, n, triplets)
}

/// Purely quadratic map from rest with `Q = 0`: tracks how far the set of
/// nonzero controls has spread back from `u_{N−1}` after each iteration.
pub fn update_front_battery(seed: u64) -> CliResult<UpdateFrontBattery> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, m, horizon) = (PROP3_STATES, 2, PROP3_HORIZON);
    let sys = QuadraticMap::pure(sparse_tensor(&mut rng, n)?, normal(&mut rng, n, m))?;
    let cost = QuadraticCost::new(DMatrix::zeros(n, n), DMatrix::identity(n, n), DMatrix::identity(m, m), normal_vec(&mut rng, n))?;
    let x0 = DVector::zeros(n);

    let mut solver = Ilqr::new(&sys, &cost, &x0, vec![DVector::zeros(m); horizon])?;
    let mut first_nonzero = Vec::with_capacity(horizon);
    let mut terminal_update_error = f64::INFINITY;
    for j in 0..horizon {
        solver.iterate()?;
        let controls = solver.controls();
        if j == 0 {
            let b = &sys.b;
            let h = b.transpose() * &cost.q_f * b + &cost.r;
            let expected = h.lu().solve(&(b.transpose() * &cost.q_f * &cost.x_star)).expect("H is positive definite");
            terminal_update_error = (&controls[horizon - 1] - expected).amax();
        }
        first_nonzero.push(controls.iter().position(|u| u.amax() != 0.0));
    }
    let front_ok = first_nonzero.iter().enumerate().all(|(j, f)| *f == Some(horizon - 1 - j));

    let config = IlqrConfig { tol: 1e-12, max_iter: 10 * horizon, record_history: false };
    let total = match ilqr_solve(&sys, &cost, &x0, vec![DVector::zeros(m); horizon], &config) {
        Ok(r) => r.iterations,
        Err(e) => e.partial().map(|p| p.iterations).unwrap_or(0),
    };
    let passed = front_ok && terminal_update_error <= PROP3_UPDATE_TOL && total >= horizon;
    Ok(UpdateFrontBattery {
        states: n,
        horizon,
        first_nonzero,
        front_moves_one_step_per_iteration: front_ok,
        terminal_update_error,
        total_iterations: total,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingCheck {
    pub states: usize,
    pub controls: usize,
    pub horizons: [usize; 2],
    /// Fastest observed wall time of one iteration at each horizon.
    pub per_iteration_s: [f64; 2],
    pub ratio: f64,
    pub band: (f64, f64),
    pub passed: bool,
}

/// Random stable quadratic ODE under backward Euler, `n = 20`, `m = 3`.
pub fn timing_problem(seed: u64) -> CliResult<(DiscretizedSystem<f64>, QuadraticCost<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 20;
    let m = 3;
    let raw = normal(&mut rng, n, n) / (n as f64).sqrt();
    let a = &raw - DMatrix::identity(n, n) * (spectral_abscissa(&raw)? + 0.5);
    let g = sparse_tensor(&mut rng, n)?.scaled(0.2);
    let x0 = normal_vec(&mut rng, n) * 0.2;
    let sys = QuadraticSystem::new(a, g, normal(&mut rng, n, m), DMatrix::identity(n, n), x0)?;
    let cost = QuadraticCost::new(DMatrix::identity(n, n), DMatrix::identity(n, n), DMatrix::identity(m, m) * 0.1, DVector::zeros(n))?;
    Ok((DiscretizedSystem::new(sys, 0.01)?, cost))
}

/// Per-iteration wall time at `N = 250` and `N = 500`, measured in
/// interleaved rounds and reduced by the minimum to suppress noise.
pub fn scaling_check(seed: u64, rounds: usize) -> CliResult<ScalingCheck> {
    let (sys, cost) = timing_problem(seed)?;
    let x0 = sys.base.x0.clone();
    let m = sys.base.input_dim();
    let mut best = [f64::INFINITY; 2];
    for _ in 0..rounds.max(1) {
        for (slot, &horizon) in PROP1_HORIZONS.iter().enumerate() {
            let mut solver = Ilqr::new(&sys, &cost, &x0, vec![DVector::zeros(m); horizon])?;
            for _ in 0..2 {
                let start = Instant::now();
                solver.iterate()?;
                best[slot] = best[slot].min(start.elapsed().as_secs_f64());
            }
        }
    }
    let ratio = best[1] / best[0];
    Ok(ScalingCheck {
        states: sys.base.state_dim(),
        controls: m,
        horizons: PROP1_HORIZONS,
        per_iteration_s: best,
        ratio,
        band: PROP1_RATIO_BAND,
        passed: ratio >= PROP1_RATIO_BAND.0 && ratio <= PROP1_RATIO_BAND.1,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropsReport {
    pub seed: u64,
    pub lti: LtiBattery,
    pub update_front: UpdateFrontBattery,
    pub scaling: ScalingCheck,
    pub all_passed: bool,
}

impl PropsReport {
    pub fn failures(&self) -> usize {
        [self.lti.passed, self.update_front.passed, self.scaling.passed].iter().filter(|p| !**p).count()
    }
}

pub fn validate_props(seed: u64) -> CliResult<PropsReport> {
    let lti = lti_battery(seed)?;
    let update_front = update_front_battery(seed.wrapping_add(1))?;
    let scaling = scaling_check(seed.wrapping_add(2), 5)?;
    let all_passed = lti.passed && update_front.passed && scaling.passed;
    Ok(PropsReport { seed, lti, update_front, scaling, all_passed })
}
