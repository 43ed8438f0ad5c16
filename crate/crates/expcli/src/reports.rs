//! Singular-value ladders and per-run time traces.

use nalgebra::DVector;
use romilqr::modred::{ladder_csv, singular_value_report, SvLadders};

use crate::error::CliResult;
use crate::output::{csv, num};
use crate::pipeline::{CellSolution, Experiment};

pub fn ladders(exp: &Experiment) -> CliResult<SvLadders<f64>> {
    Ok(singular_value_report(&exp.linear, &exp.cost.r)?)
}

/// `(bt.csv, lqgbt.csv)` contents with header `index,value`.
pub fn ladder_files(l: &SvLadders<f64>) -> (String, String) {
    (ladder_csv(&l.bt), ladder_csv(&l.lqg_bt))
}

pub fn cost_history_csv(history: &[f64]) -> String {
    csv("iteration,J_rom", history.iter().enumerate().map(|(i, j)| format!("{i},{}", num(*j))))
}

/// `‖u_k‖₂` at `t_k = k·dt`, `k = 0..N−1`.
pub fn control_norm_csv(dt: f64, controls: &[DVector<f64>]) -> String {
    csv("t,u_norm", controls.iter().enumerate().map(|(k, u)| format!("{},{}", num(k as f64 * dt), num(u.norm()))))
}

/// `‖y_k‖₂ = ‖C x_k‖₂` for the controlled and uncontrolled FOM runs.
pub fn output_norm_csv(
    exp: &Experiment,
    controlled: &[DVector<f64>],
    uncontrolled: &[DVector<f64>],
) -> String {
    let c = &exp.system.c;
    let dt = exp.dt();
    csv(
        "t,y_norm_controlled,y_norm_uncontrolled",
        controlled.iter().zip(uncontrolled).enumerate().map(|(k, (xc, xu))| {
            format!("{},{},{}", num(k as f64 * dt), num((c * xc).norm()), num((c * xu).norm()))
        }),
    )
}

/// Long-format space-time field `t,xi,z`, one row per node per step.
pub fn field_csv(exp: &Experiment, trajectory: &[DVector<f64>]) -> String {
    let nodes = exp.config.burgers.nodes();
    let dt = exp.dt();
    let mut rows = Vec::with_capacity(trajectory.len() * nodes.len());
    for (k, x) in trajectory.iter().enumerate() {
        let t = num(k as f64 * dt);
        for (xi, z) in nodes.iter().zip(x.iter()) {
            rows.push(format!("{t},{},{}", num(*xi), num(*z)));
        }
    }
    csv("t,xi,z", rows)
}

/// The four trace files of one cell, keyed by file-name suffix.
pub fn cell_traces(
    exp: &Experiment,
    solution: &CellSolution,
    uncontrolled: &[DVector<f64>],
) -> Vec<(&'static str, String)> {
    vec![
        ("cost_history.csv", cost_history_csv(&solution.rom.cost_history)),
        ("control_norm.csv", control_norm_csv(exp.dt(), &solution.rom.controls)),
        ("output_norm.csv", output_norm_csv(exp, &solution.fom_trajectory, uncontrolled)),
        ("field.csv", field_csv(exp, &solution.fom_trajectory)),
    ]
}
