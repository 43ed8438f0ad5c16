use std::fmt::Write as _;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{simulate, ControlledSystem};
use crate::error::{dims, Error, Result};
use crate::ilqr::cost::{evaluate_cost, QuadraticCost};
use crate::ilqr::passes::{backward_pass, forward_pass, BackwardPassGains};
use crate::scalar::Real;

/// Consecutive cost increases tolerated before the run is abandoned.
pub const DIVERGENCE_STREAK: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IlqrConfig {
    /// Stop once `|J_old − J| / J_old ≤ tol`.
    pub tol: f64,
    pub max_iter: usize,
    /// Keep every iterate's cost (otherwise only the first and last).
    pub record_history: bool,
}

impl Default for IlqrConfig {
    fn default() -> Self {
        Self { tol: 3e-5, max_iter: 20_000, record_history: true }
    }
}

impl IlqrConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of an ILQR run.
#[derive(Debug, Clone, PartialEq)]
pub struct IlqrResult<T: Real> {
    pub controls: Vec<DVector<T>>,
    pub trajectory: Vec<DVector<T>>,
    /// `cost_history[0]` is the cost of the initial guess, then one entry
    /// per iteration.
    pub cost_history: Vec<T>,
    /// Iterations that changed the cost by more than `tol` (the pass that
    /// detects convergence is not counted).
    pub iterations: usize,
    pub converged: bool,
}

impl<T: Real> IlqrResult<T> {
    pub fn cost(&self) -> T {
        *self.cost_history.last().expect("history is never empty")
    }

    pub fn horizon(&self) -> usize {
        self.controls.len()
    }

    pub fn to_document(&self) -> IlqrResultDoc {
        let vecs = |v: &[DVector<T>]| -> Vec<Vec<f64>> {
            v.iter().map(|x| x.iter().map(|e| e.as_f64()).collect()).collect()
        };
        IlqrResultDoc {
            controls: vecs(&self.controls),
            trajectory: vecs(&self.trajectory),
            cost_history: self.cost_history.iter().map(|c| c.as_f64()).collect(),
            iterations: self.iterations,
            converged: self.converged,
        }
    }

    pub fn from_document(doc: &IlqrResultDoc) -> Result<Self> {
        if doc.trajectory.len() != doc.controls.len() + 1 {
            return Err(dims("IlqrResult trajectory", doc.controls.len() + 1, doc.trajectory.len()));
        }
        if doc.cost_history.is_empty() {
            return Err(Error::Serialization("empty cost history".into()));
        }
        let vecs = |v: &[Vec<f64>]| -> Vec<DVector<T>> {
            v.iter().map(|x| DVector::from_iterator(x.len(), x.iter().map(|&e| T::lit(e)))).collect()
        };
        Ok(Self {
            controls: vecs(&doc.controls),
            trajectory: vecs(&doc.trajectory),
            cost_history: doc.cost_history.iter().map(|&c| T::lit(c)).collect(),
            iterations: doc.iterations,
            converged: doc.converged,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.to_document()).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: IlqrResultDoc = serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))?;
        Self::from_document(&doc)
    }

    /// One row per time step: `k, x_0..x_{n−1}, u_0..u_{m−1}`; the control
    /// columns of the final row (`k = N`) are empty.
    pub fn to_csv(&self) -> String {
        let n = self.trajectory.first().map_or(0, |x| x.len());
        let m = self.controls.first().map_or(0, |u| u.len());
        let mut out = String::from("k");
        for i in 0..n {
            let _ = write!(out, ",x{i}");
        }
        for i in 0..m {
            let _ = write!(out, ",u{i}");
        }
        out.push('\n');
        for (k, x) in self.trajectory.iter().enumerate() {
            let _ = write!(out, "{k}");
            for v in x.iter() {
                let _ = write!(out, ",{:.16e}", v.as_f64());
            }
            match self.controls.get(k) {
                Some(u) => {
                    for v in u.iter() {
                        let _ = write!(out, ",{:.16e}", v.as_f64());
                    }
                }
                None => out.push_str(&",".repeat(m)),
            }
            out.push('\n');
        }
        out
    }
}

/// Serialized [`IlqrResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IlqrResultDoc {
    pub controls: Vec<Vec<f64>>,
    pub trajectory: Vec<Vec<f64>>,
    pub cost_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Error)]
pub enum IlqrError<T: Real> {
    /// The iteration cap was hit, or the cost grew for
    /// [`DIVERGENCE_STREAK`] consecutive iterations (`diverged`). Carries
    /// the best iterate seen.
    #[error("ILQR stopped after {} iterations without converging (diverged: {diverged})", partial.iterations)]
    MaxIterationsReached { partial: Box<IlqrResult<T>>, diverged: bool },

    #[error(transparent)]
    Numerical(#[from] Error),
}

impl<T: Real> IlqrError<T> {
    pub fn partial(&self) -> Option<&IlqrResult<T>> {
        match self {
            IlqrError::MaxIterationsReached { partial, .. } => Some(partial),
            IlqrError::Numerical(_) => None,
        }
    }
}

/// Stateful ILQR iteration: holds the current nominal and advances it one
/// backward/forward pass at a time.
pub struct Ilqr<'a, T: Real, S: ControlledSystem<T> + ?Sized> {
    sys: &'a S,
    cost: &'a QuadraticCost<T>,
    controls: Vec<DVector<T>>,
    trajectory: Vec<DVector<T>>,
    current: T,
}

impl<'a, T: Real, S: ControlledSystem<T> + ?Sized> Ilqr<'a, T, S> {
    pub fn new(
        sys: &'a S,
        cost: &'a QuadraticCost<T>,
        x0: &DVector<T>,
        u_init: Vec<DVector<T>>,
    ) -> Result<Self> {
        if u_init.is_empty() {
            return Err(Error::InvalidArgument("ILQR needs a horizon of at least one step".into()));
        }
        if cost.state_dim() != sys.state_dim() || cost.control_dim() != sys.control_dim() {
            return Err(dims(
                "ILQR cost vs system",
                format!("n={}, m={}", sys.state_dim(), sys.control_dim()),
                format!("n={}, m={}", cost.state_dim(), cost.control_dim()),
            ));
        }
        for u in &u_init {
            if u.len() != sys.control_dim() {
                return Err(dims("ILQR initial control", sys.control_dim(), u.len()));
            }
            if u.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument("initial controls must be finite".into()));
            }
        }
        let trajectory = simulate(sys, x0, &u_init)?;
        let current = evaluate_cost(cost, &trajectory, &u_init)?;
        Ok(Self { sys, cost, controls: u_init, trajectory, current })
    }

    pub fn controls(&self) -> &[DVector<T>] {
        &self.controls
    }

    pub fn trajectory(&self) -> &[DVector<T>] {
        &self.trajectory
    }

    pub fn cost(&self) -> T {
        self.current
    }

    /// Linearizes along the nominal and runs the backward pass.
    pub fn gains(&self) -> Result<BackwardPassGains<T>> {
        let mut lin = Vec::with_capacity(self.controls.len());
        for k in 0..self.controls.len() {
            lin.push(self.sys.linearize_at(&self.trajectory[k], &self.controls[k], &self.trajectory[k + 1])?);
        }
        backward_pass(&lin, &self.trajectory, &self.controls, self.cost)
    }

    /// One full iteration; the new nominal replaces the old one
    /// unconditionally. Returns the new cost.
    pub fn iterate(&mut self) -> Result<T> {
        let gains = self.gains()?;
        let out = forward_pass(self.sys, &gains, &self.trajectory, &self.controls, self.cost)?;
        self.controls = out.controls;
        self.trajectory = out.trajectory;
        self.current = out.cost;
        Ok(self.current)
    }
}

fn relative_change<T: Real>(old: T, new: T) -> T {
    let diff = (old - new).abs();
    if old == T::zero() {
        return diff;
    }
    diff / old.abs()
}

/// Runs ILQR from `u_init` until the relative cost change drops to
/// `config.tol` or `config.max_iter` iterations have run.
pub fn ilqr_solve<T: Real, S: ControlledSystem<T> + ?Sized>(
    sys: &S,
    cost: &QuadraticCost<T>,
    x0: &DVector<T>,
    u_init: Vec<DVector<T>>,
    config: &IlqrConfig,
) -> std::result::Result<IlqrResult<T>, IlqrError<T>> {
    config.validate()?;
    let tol = T::lit(config.tol);
    let mut solver = Ilqr::new(sys, cost, x0, u_init)?;

    let mut history = vec![solver.cost()];
    let mut best = (solver.cost(), solver.controls().to_vec(), solver.trajectory().to_vec());
    let mut rising = 0;

    let record = |history: &mut Vec<T>, value: T| {
        if config.record_history || history.len() < 2 {
            history.push(value);
        } else {
            *history.last_mut().unwrap() = value;
        }
    };

    for pass in 1..=config.max_iter {
        let old = solver.cost();
        let new = solver.iterate()?;
        record(&mut history, new);

        if new <= best.0 {
            best = (new, solver.controls().to_vec(), solver.trajectory().to_vec());
        }
        if relative_change(old, new) <= tol {
            return Ok(finish(best, history, pass - 1, true));
        }
        rising = if new > old { rising + 1 } else { 0 };
        if rising >= DIVERGENCE_STREAK {
            let partial = finish(best, history, pass, false);
            return Err(IlqrError::MaxIterationsReached { partial: Box::new(partial), diverged: true });
        }
        if !new.is_finite() {
            return Err(IlqrError::Numerical(Error::InvalidArgument(format!(
                "cost became non-finite at iteration {pass}"
            ))));
        }
    }
    let partial = finish(best, history, config.max_iter, false);
    Err(IlqrError::MaxIterationsReached { partial: Box::new(partial), diverged: false })
}

fn finish<T: Real>(
    best: (T, Vec<DVector<T>>, Vec<DVector<T>>),
    mut history: Vec<T>,
    iterations: usize,
    converged: bool,
) -> IlqrResult<T> {
    let (best_cost, controls, trajectory) = best;
    // report the returned iterate's cost last
    if *history.last().unwrap() != best_cost {
        history.push(best_cost);
    }
    IlqrResult { controls, trajectory, cost_history: history, iterations, converged }
}
