//! Command-line interface and subcommand drivers.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use romilqr::ilqr::IlqrResult;
use serde::Serialize;

use crate::config::{parse_r_list, ExperimentConfig, MethodSelection};
use crate::error::{CliError, CliResult};
use crate::output::{csv, num, OutputDir};
use crate::pipeline::{sweep_csv, Experiment, RunRecord};
use crate::props::validate_props;
use crate::reports::{cell_traces, field_csv, ladder_files, ladders};

#[derive(Debug, Parser)]
#[command(name = "romilqr", version, about = "ILQR control of the periodic Burgers equation through balanced-truncation ROMs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cost table over methods and ROM dimensions.
    Sweep(CommonArgs),
    /// Normalized singular-value ladders of both balancing methods.
    Svreport(CommonArgs),
    /// Cost history, control and output norms, and space-time fields.
    Trace(CommonArgs),
    /// ILQR property batteries as a JSON report.
    Props(CommonArgs),
    /// Full-order simulation under zero or supplied controls.
    FomSim {
        #[command(flatten)]
        common: CommonArgs,
        /// ILQR result JSON whose controls drive the simulation.
        #[arg(long)]
        controls: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML or JSON experiment file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub method: Option<MethodSelection>,
    /// ROM dimensions, e.g. `2,3,5` or `2-11`.
    #[arg(long)]
    pub r: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// ILQR relative cost-change tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

impl CommonArgs {
    /// File, then `ROMILQR_*` environment, then flags.
    pub fn resolve<I>(&self, env: I) -> CliResult<ExperimentConfig>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut config = ExperimentConfig::load(self.config.as_deref(), env)?;
        if let Some(m) = self.method {
            config.methods = m;
        }
        if let Some(r) = &self.r {
            config.r_list = parse_r_list(r)?;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(tol) = self.tol {
            config.ilqr.tol = tol;
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Serialize)]
struct Manifest<'a, E: Serialize> {
    command: &'static str,
    seed: u64,
    config: &'a ExperimentConfig,
    #[serde(flatten)]
    extra: E,
}

#[derive(Serialize)]
struct Records<'a> {
    records: &'a [RunRecord],
}

pub fn run(cli: Cli) -> CliResult<()> {
    run_with_env(cli, std::env::vars())
}

pub fn run_with_env<I>(cli: Cli, env: I) -> CliResult<()>
where
    I: IntoIterator<Item = (String, String)>,
{
    match cli.command {
        Command::Sweep(args) => sweep(&args.resolve(env)?, &args.out),
        Command::Svreport(args) => svreport(&args.resolve(env)?, &args.out),
        Command::Trace(args) => trace(&args.resolve(env)?, &args.out),
        Command::Props(args) => props(&args.resolve(env)?, &args.out),
        Command::FomSim { common, controls } => fom_sim(&common.resolve(env)?, &common.out, controls.as_deref()),
    }
}

fn check_cells(records: &[RunRecord]) -> CliResult<()> {
    let failed = records.iter().filter(|r| r.failed()).count();
    if failed > 0 {
        return Err(CliError::FailedCells { failed, total: records.len() });
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

pub fn sweep(config: &ExperimentConfig, out: &std::path::Path) -> CliResult<()> {
    let exp = Experiment::new(config.clone())?;
    let mut dir = OutputDir::create(out)?;
    let mut records = Vec::new();
    for method in config.methods.methods() {
        for &r in &config.r_list {
            let run = exp.run_cell(method, r);
            eprintln!("{}", summary(&run.record));
            if let Some(sol) = &run.solution {
                let stem = run.stem();
                dir.write(&format!("cells/{stem}_rom.json"), &sol.rom.to_json()?)?;
                let replay = sol.fom_replay(run.record.fom_cost.unwrap_or(f64::NAN));
                dir.write(&format!("cells/{stem}_fom.json"), &replay.to_json()?)?;
                dir.write(&format!("cells/{stem}_basis.json"), &sol.basis.to_json()?)?;
            }
            records.push(run.record);
        }
    }
    dir.write("sweep.csv", &sweep_csv(&records))?;
    dir.write_manifest(&Manifest { command: "sweep", seed: config.seed, config, extra: Records { records: &records } })?;
    check_cells(&records)
}

fn summary(r: &RunRecord) -> String {
    let f = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
    let mut line = format!(
        "{} r={}: J_rom={} J_fom={} iters={} ({:.2}s)",
        r.method,
        r.r,
        f(r.rom_cost),
        f(r.fom_cost),
        r.iterations.map(|i| i.to_string()).unwrap_or_else(|| "-".into()),
        r.wall_s
    );
    if let Some(e) = &r.error {
        line.push_str(&format!(" FAILED: {e}"));
    }
    line
}

pub fn svreport(config: &ExperimentConfig, out: &std::path::Path) -> CliResult<()> {
    let exp = Experiment::new(config.clone())?;
    let l = ladders(&exp)?;
    let (bt, lqg) = ladder_files(&l);
    let mut dir = OutputDir::create(out)?;
    dir.write("sv_bt.csv", &bt)?;
    dir.write("sv_lqgbt.csv", &lqg)?;
    #[derive(Serialize)]
    struct Extra {
        shift: Option<f64>,
        bt_len: usize,
        lqgbt_len: usize,
    }
    let extra = Extra { shift: l.shift, bt_len: l.bt.len(), lqgbt_len: l.lqg_bt.len() };
    dir.write_manifest(&Manifest { command: "svreport", seed: config.seed, config, extra })?;
    Ok(())
}

pub fn trace(config: &ExperimentConfig, out: &std::path::Path) -> CliResult<()> {
    let exp = Experiment::new(config.clone())?;
    let mut dir = OutputDir::create(out)?;
    let uncontrolled = exp.simulate_fom(&exp.zero_controls())?;
    dir.write("field_uncontrolled.csv", &field_csv(&exp, &uncontrolled))?;
    let mut records = Vec::new();
    for method in config.methods.methods() {
        for &r in &config.r_list {
            let run = exp.run_cell(method, r);
            eprintln!("{}", summary(&run.record));
            if let Some(sol) = &run.solution {
                let stem = run.stem();
                for (suffix, contents) in cell_traces(&exp, sol, &uncontrolled) {
                    dir.write(&format!("{stem}_{suffix}"), &contents)?;
                }
                dir.write(&format!("{stem}_rom.json"), &sol.rom.to_json()?)?;
            }
            records.push(run.record);
        }
    }
    dir.write_manifest(&Manifest { command: "trace", seed: config.seed, config, extra: Records { records: &records } })?;
    check_cells(&records)
}

pub fn props(config: &ExperimentConfig, out: &std::path::Path) -> CliResult<()> {
    let report = validate_props(config.seed)?;
    let mut dir = OutputDir::create(out)?;
    dir.write("props.json", &json(&report))?;
    #[derive(Serialize)]
    struct Extra {
        all_passed: bool,
    }
    dir.write_manifest(&Manifest {
        command: "props",
        seed: config.seed,
        config,
        extra: Extra { all_passed: report.all_passed },
    })?;
    for (name, passed) in [
        ("lti", report.lti.passed),
        ("update_front", report.update_front.passed),
        ("scaling", report.scaling.passed),
    ] {
        eprintln!("{name}: {}", if passed { "pass" } else { "FAIL" });
    }
    match report.failures() {
        0 => Ok(()),
        n => Err(CliError::FailedBatteries(n)),
    }
}

pub fn fom_sim(config: &ExperimentConfig, out: &std::path::Path, controls: Option<&std::path::Path>) -> CliResult<()> {
    let exp = Experiment::new(config.clone())?;
    let u: Vec<DVector<f64>> = match controls {
        None => exp.zero_controls(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            let res = IlqrResult::<f64>::from_json(&text).map_err(|e| CliError::Config(e.to_string()))?;
            if res.controls.len() != exp.horizon() || res.controls.iter().any(|c| c.len() != config.burgers.m) {
                return Err(CliError::Config(format!(
                    "controls must be {} vectors of length {}",
                    exp.horizon(),
                    config.burgers.m
                )));
            }
            res.controls
        }
    };
    let trajectory = exp.simulate_fom(&u)?;
    let cost = exp.fom_cost(&trajectory, &u)?;
    let replay = IlqrResult { controls: u, trajectory, cost_history: vec![cost], iterations: 0, converged: true };

    let mut dir = OutputDir::create(out)?;
    dir.write("system.json", &exp.system.to_json()?)?;
    dir.write("fom_trajectory.csv", &replay.to_csv())?;
    dir.write("fom_result.json", &replay.to_json()?)?;
    let c = &exp.system.c;
    let dt = exp.dt();
    dir.write(
        "output_norm.csv",
        &csv("t,y_norm", replay.trajectory.iter().enumerate().map(|(k, x)| format!("{},{}", num(k as f64 * dt), num((c * x).norm())))),
    )?;
    dir.write("field.csv", &field_csv(&exp, &replay.trajectory))?;
    #[derive(Serialize)]
    struct Extra {
        fom_cost: f64,
    }
    dir.write_manifest(&Manifest { command: "fom-sim", seed: config.seed, config, extra: Extra { fom_cost: cost } })?;
    eprintln!("J_fom = {cost:.6}");
    Ok(())
}
