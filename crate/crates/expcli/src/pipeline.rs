//! Full-order model setup, per-cell reduction and control, and the sweep.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use romilqr::burgers::{assemble_burgers, burgers_cost};
use romilqr::dynamics::{simulate, DiscretizedSystem, QuadraticSystem};
use romilqr::ilqr::{evaluate_cost, ilqr_solve, IlqrError, IlqrResult, QuadraticCost};
use romilqr::mateq::LtiSystem;
use romilqr::modred::{
    balanced_truncation_with, lqg_balanced_truncation_with, project_quadratic, stabilizing_shift, BalanceOptions,
    Method, ReductionBasis,
};
use serde::{Deserialize, Serialize};

use crate::config::{method_tag, ExperimentConfig};
use crate::error::CliResult;
use crate::output::{csv, num};

pub const SWEEP_HEADER: &str = "method,r,J_rom,J_fom,iters,wall_s";

/// The Burgers full-order model and everything derived from the config
/// that every cell shares.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub system: QuadraticSystem<f64>,
    pub fom: DiscretizedSystem<f64>,
    pub cost: QuadraticCost<f64>,
    pub linear: LtiSystem<f64>,
    pub shift: Option<f64>,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> CliResult<Self> {
        config.validate()?;
        let system = assemble_burgers::<f64>(&config.burgers)?;
        let fom = DiscretizedSystem::new(system.clone(), config.burgers.dt())?;
        let cost = burgers_cost::<f64>(&config.burgers)?;
        let linear = system.linearization();
        let shift = stabilizing_shift(&linear.a)?;
        Ok(Self { config, system, fom, cost, linear, shift })
    }

    pub fn dt(&self) -> f64 {
        self.config.burgers.dt()
    }

    pub fn horizon(&self) -> usize {
        self.config.burgers.steps
    }

    pub fn zero_controls(&self) -> Vec<DVector<f64>> {
        vec![DVector::zeros(self.config.burgers.m); self.horizon()]
    }

    pub fn balance_options(&self) -> BalanceOptions {
        BalanceOptions { svd_mode: self.config.svd_mode, ..BalanceOptions::default() }.with_shift(self.shift)
    }

    pub fn basis(&self, method: Method, r: usize) -> romilqr::Result<ReductionBasis<f64>> {
        let opts = self.balance_options();
        match method {
            Method::Bt => balanced_truncation_with(&self.linear, r, &opts),
            Method::LqgBt => lqg_balanced_truncation_with(&self.linear, &self.cost.r, r, &opts),
        }
    }

    /// FOM trajectory under `controls`.
    pub fn simulate_fom(&self, controls: &[DVector<f64>]) -> romilqr::Result<Vec<DVector<f64>>> {
        simulate(&self.fom, &self.system.x0, controls)
    }

    pub fn fom_cost(&self, trajectory: &[DVector<f64>], controls: &[DVector<f64>]) -> romilqr::Result<f64> {
        evaluate_cost(&self.cost, trajectory, controls)
    }

    /// Reduced model and its cost `Q_r = Q_{f,r} = C_rᵀ C_r`, same `R`,
    /// target zero.
    pub fn reduced_problem(
        &self,
        basis: &ReductionBasis<f64>,
    ) -> romilqr::Result<(DiscretizedSystem<f64>, QuadraticCost<f64>)> {
        let rom = project_quadratic(&self.system, basis)?;
        let q_r: DMatrix<f64> = rom.c.transpose() * &rom.c;
        let cost = QuadraticCost::new(q_r.clone(), q_r, self.cost.r.clone(), DVector::zeros(basis.r))?;
        Ok((DiscretizedSystem::new(rom, self.dt())?, cost))
    }

    /// Reduce, solve on the ROM from zero controls, replay on the FOM.
    pub fn run_cell(&self, method: Method, r: usize) -> CellRun {
        let mut record = RunRecord::new(method, r);
        let basis = match self.basis(method, r) {
            Ok(b) => b,
            Err(e) => return CellRun::failed(record.with_error(e)),
        };
        record.effective_r = Some(basis.r);
        let (rom, rom_cost) = match self.reduced_problem(&basis) {
            Ok(p) => p,
            Err(e) => return CellRun::failed(record.with_error(e)),
        };

        let start = Instant::now();
        let outcome = ilqr_solve(&rom, &rom_cost, &rom.base.x0, self.zero_controls(), &self.config.ilqr.to_config());
        record.wall_s = start.elapsed().as_secs_f64();
        let rom_result = match outcome {
            Ok(res) => res,
            Err(IlqrError::MaxIterationsReached { partial, diverged }) => {
                record.error = Some(if diverged {
                    "ILQR diverged; best iterate kept".to_string()
                } else {
                    format!("ILQR hit the cap of {} iterations", self.config.ilqr.max_iter)
                });
                *partial
            }
            Err(IlqrError::Numerical(e)) => return CellRun::failed(record.with_error(e)),
        };
        record.rom_cost = Some(rom_result.cost());
        record.iterations = Some(rom_result.iterations);
        record.converged = rom_result.converged;

        let fom_trajectory = match self.simulate_fom(&rom_result.controls) {
            Ok(t) => t,
            Err(e) => return CellRun::failed(record.with_error(e)),
        };
        match self.fom_cost(&fom_trajectory, &rom_result.controls) {
            Ok(j) => record.fom_cost = Some(j),
            Err(e) => return CellRun::failed(record.with_error(e)),
        }
        CellRun { record, solution: Some(CellSolution { basis, rom: rom_result, fom_trajectory }) }
    }

    /// Every `(method, r)` cell in config order, methods outermost.
    pub fn run_sweep(&self) -> Vec<CellRun> {
        let mut runs = Vec::new();
        for method in self.config.methods.methods() {
            for &r in &self.config.r_list {
                runs.push(self.run_cell(method, r));
            }
        }
        runs
    }
}

/// One row of the sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: String,
    pub r: usize,
    /// Basis dimension actually used (smaller than `r` when clamped).
    pub effective_r: Option<usize>,
    pub rom_cost: Option<f64>,
    pub fom_cost: Option<f64>,
    pub iterations: Option<usize>,
    pub converged: bool,
    pub wall_s: f64,
    pub error: Option<String>,
}

impl RunRecord {
    fn new(method: Method, r: usize) -> Self {
        Self {
            method: method.label().to_string(),
            r,
            effective_r: None,
            rom_cost: None,
            fom_cost: None,
            iterations: None,
            converged: false,
            wall_s: 0.0,
            error: None,
        }
    }

    fn with_error(mut self, e: impl std::fmt::Display) -> Self {
        self.error = Some(e.to_string());
        self
    }

    pub fn failed(&self) -> bool {
        self.error.is_some()
    }

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        format!(
            "{},{},{},{},{},{}",
            self.method,
            self.r,
            opt(self.rom_cost),
            opt(self.fom_cost),
            self.iterations.map(|i| i.to_string()).unwrap_or_default(),
            num(self.wall_s)
        )
    }
}

#[derive(Debug, Clone)]
pub struct CellSolution {
    pub basis: ReductionBasis<f64>,
    pub rom: IlqrResult<f64>,
    pub fom_trajectory: Vec<DVector<f64>>,
}

impl CellSolution {
    /// The ROM controls replayed on the FOM, in the ILQR result layout.
    pub fn fom_replay(&self, fom_cost: f64) -> IlqrResult<f64> {
        IlqrResult {
            controls: self.rom.controls.clone(),
            trajectory: self.fom_trajectory.clone(),
            cost_history: vec![fom_cost],
            iterations: 0,
            converged: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CellRun {
    pub record: RunRecord,
    pub solution: Option<CellSolution>,
}

impl CellRun {
    fn failed(record: RunRecord) -> Self {
        Self { record, solution: None }
    }

    /// File-name stem, e.g. `bt_r5`.
    pub fn stem(&self) -> String {
        let method = if self.record.method == Method::Bt.label() { Method::Bt } else { Method::LqgBt };
        format!("{}_r{}", method_tag(method), self.record.r)
    }
}

pub fn sweep_csv(records: &[RunRecord]) -> String {
    csv(SWEEP_HEADER, records.iter().map(RunRecord::csv_row))
}
