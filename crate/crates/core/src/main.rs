use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dmrs::bench::{self, ExperimentConfig, OutputFormat, ScenarioSpec, SchedulerKind, SimMode};
use dmrs::dmrs::plan_dmrs;
use dmrs::model::{derive_stats, validate_workload, RawWorkload, Workload};
use dmrs::simulator::{self, PerturbationModel};

#[derive(Parser)]
#[command(name = "dmrs", version, about = "Schedule MapReduce jobs on heterogeneous machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a workload from a scenario description.
    Generate {
        #[arg(long)]
        spec: PathBuf,
        /// Overrides the scenario's own seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve the LP relaxation of a workload.
    SolveLp {
        workload: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build a schedule.
    Schedule {
        workload: PathBuf,
        #[arg(long, default_value = "dmrs")]
        scheduler: SchedulerKind,
        /// Let FIFO reduce tasks take a machine before their map phase ends.
        #[arg(long)]
        fifo_early_reduce: bool,
        /// Seed for the map-only policy's random reduce placement.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build a schedule and execute it.
    Simulate {
        workload: PathBuf,
        #[arg(long, default_value = "dmrs")]
        scheduler: SchedulerKind,
        #[arg(long, value_enum, default_value = "static")]
        mode: Mode,
        /// Multiply each task's duration by a uniform draw from `lo,hi`.
        #[arg(long, value_parser = parse_range)]
        perturb: Option<(f64, f64)>,
        #[arg(long)]
        fifo_early_reduce: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare all schedulers on a scenario over a range of seeds.
    Experiment {
        #[arg(long)]
        spec: PathBuf,
        /// `a..b` (half-open), `a..=b`, or a single seed.
        #[arg(long, value_parser = parse_seeds)]
        seeds: Seeds,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long, value_enum, default_value = "static")]
        mode: Mode,
        #[arg(long, value_parser = parse_range)]
        perturb: Option<(f64, f64)>,
        /// Run FIFO without early reduce.
        #[arg(long)]
        fifo_no_early_reduce: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Static,
    Dynamic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    PerturbationModel::multiplicative(lo, hi, 0).map_err(|e| e.to_string())?;
    Ok((lo, hi))
}

#[derive(Clone)]
struct Seeds(Vec<u64>);

fn parse_seeds(s: &str) -> Result<Seeds, String> {
    let num = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("{t:?}: {e}"));
    let seeds: Vec<u64> = if let Some((a, b)) = s.split_once("..=") {
        (num(a)?..=num(b)?).collect()
    } else if let Some((a, b)) = s.split_once("..") {
        (num(a)?..num(b)?).collect()
    } else {
        vec![num(s)?]
    };
    if seeds.is_empty() {
        return Err(format!("seed range {s:?} is empty"));
    }
    Ok(Seeds(seeds))
}

/// Input problems exit with 1, broken internal guarantees with 2.
enum Failure {
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

fn internal(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Internal(e.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read_workload(path: &Path) -> anyhow::Result<Workload> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let raw: RawWorkload = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    validate_workload(raw).with_context(|| format!("validating {}", path.display()))
}

fn read_spec(path: &Path) -> anyhow::Result<ScenarioSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_output(output: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
    match output {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => Ok(io::stdout().write_all(bytes)?),
    }
}

fn write_json(output: Option<&Path>, value: &impl Serialize) -> anyhow::Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_output(output, &bytes)
}

#[derive(Serialize)]
struct LpDoc {
    objective: f64,
    #[serde(rename = "C")]
    completion: Vec<f64>,
    #[serde(rename = "C_M")]
    map_completion: Vec<f64>,
    cuts: Vec<Vec<usize>>,
    iterations: usize,
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Generate { spec, seed, output } => {
            let spec = read_spec(&spec)?;
            let w = bench::generate_scenario(&spec, seed.unwrap_or(spec.seed))?;
            write_json(output.as_deref(), &w.to_raw())?;
        }
        Command::SolveLp { workload, output } => {
            let w = read_workload(&workload)?;
            let lp = dmrs::lp_relax::solve_lp(&w, &derive_stats(&w)).map_err(internal)?;
            let doc = LpDoc {
                objective: lp.objective,
                completion: lp.completion,
                map_completion: lp.map_completion,
                cuts: lp.generated_sets,
                iterations: lp.iterations,
            };
            write_json(output.as_deref(), &doc)?;
        }
        Command::Schedule { workload, scheduler, fifo_early_reduce, seed, output } => {
            let w = read_workload(&workload)?;
            let sch = bench::build_schedule(&w, scheduler, fifo_early_reduce, seed).map_err(internal)?;
            check(simulator::validate_schedule(&w, &sch))?;
            write_json(output.as_deref(), &sch.to_doc(&w))?;
        }
        Command::Simulate { workload, scheduler, mode, perturb, fifo_early_reduce, seed, output } => {
            let w = read_workload(&workload)?;
            let model = match perturb {
                Some((lo, hi)) => PerturbationModel::multiplicative(lo, hi, seed)?,
                None => PerturbationModel::None,
            };
            let trace = match mode {
                Mode::Static => {
                    let sch = bench::build_schedule(&w, scheduler, fifo_early_reduce, seed).map_err(internal)?;
                    check(simulator::validate_schedule(&w, &sch))?;
                    simulator::execute_static(&w, &sch, &model)
                }
                Mode::Dynamic if scheduler == SchedulerKind::Dmrs => {
                    let plan = plan_dmrs(&w).map_err(internal)?;
                    simulator::execute_dynamic(&w, &plan.order, &model)
                }
                Mode::Dynamic => {
                    return Err(Failure::Input(anyhow::anyhow!("dynamic mode is only defined for dmrs")));
                }
            };
            check(simulator::validate_trace(&w, &trace, &model.draws(&w)))?;
            write_json(output.as_deref(), &trace.to_doc())?;
            eprintln!("TWCT: {} s ({} h), {} replans", trace.twct, trace.twct / 3600.0, trace.replan_count);
        }
        Command::Experiment { spec, seeds, format, mode, perturb, fifo_no_early_reduce, output } => {
            let spec = read_spec(&spec)?;
            let cfg = ExperimentConfig {
                perturbation: perturb,
                mode: match mode {
                    Mode::Static => SimMode::Static,
                    Mode::Dynamic => SimMode::Dynamic,
                },
                fifo_early_reduce: !fifo_no_early_reduce,
            };
            let res = bench::run_experiment(&spec, &seeds.0, &cfg).map_err(|e| {
                if e.is_internal() {
                    internal(e)
                } else {
                    Failure::Input(e.into())
                }
            })?;
            let format = match format {
                Format::Csv => OutputFormat::Csv,
                Format::Json => OutputFormat::Json,
            };
            write_output(output.as_deref(), &bench::emit_results(&res, format))?;
        }
    }
    Ok(())
}

fn check(violations: Vec<simulator::Violation>) -> Result<(), Failure> {
    match violations.first() {
        None => Ok(()),
        Some(v) => Err(internal(anyhow::anyhow!("{} violations, first: {v}", violations.len()))),
    }
}
