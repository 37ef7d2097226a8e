//! Scenario generation, the four-scheduler experiment runner, and result
//! output.
//!
//! Sizes are in data units (1 unit = 1 MB) and the slow machines process one
//! unit per second unless a scenario says otherwise.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{schedule_fifo, schedule_identical, schedule_maponly, seeded_rng};
use crate::dmrs::{plan_dmrs, workload_ratio, ScheduleError};
use crate::model::{validate_workload, ModelError, RawJob, RawWorkload, Workload};
use crate::schedule::Schedule;
use crate::simulator::{execute_dynamic, execute_static, validate_schedule, validate_trace, PerturbationModel};

/// Slack allowed when checking the LP bound and the ratio on result rows.
pub const LP_BOUND_TOL: f64 = 1e-6;
pub const RATIO_TOL: f64 = 1e-9;

pub const CSV_HEADER: &str = "seed,scheduler,twct_seconds,twct_hours,lp_bound,emp_ratio,theo_ratio,D,improvement_vs_dmrs";

/// A group of identical jobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobMix {
    pub count: usize,
    /// Data processed by the map phase of each job.
    pub map_total: f64,
    /// Size of one map task; the last one is smaller when it does not divide
    /// `map_total`.
    pub task_size: f64,
    pub reduce_tasks: usize,
    /// Reduce-phase data as a multiple of `map_total`, split evenly over the
    /// reduce tasks.
    pub reduce_ratio: f64,
}

/// Inclusive integer range the job weights are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightRange {
    pub lo: u32,
    pub hi: u32,
}

impl Default for WeightRange {
    fn default() -> Self {
        WeightRange { lo: 1, hi: 5 }
    }
}

/// Jobs are shuffled and split into `count` contiguous groups; group `k`
/// (0-based) is released at `k * gap`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReleaseGroups {
    pub count: usize,
    pub gap: f64,
}

impl Default for ReleaseGroups {
    fn default() -> Self {
        ReleaseGroups { count: 2, gap: 60.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub machines: usize,
    /// Number of fast machines; half the cluster (rounded down) when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fast_machines: Option<usize>,
    /// Fast machine speed over slow machine speed.
    pub speed_ratio: f64,
    #[serde(default = "unit_speed")]
    pub slow_speed: f64,
    pub jobs: Vec<JobMix>,
    #[serde(default)]
    pub weights: WeightRange,
    #[serde(default)]
    pub release_groups: ReleaseGroups,
    #[serde(default)]
    pub seed: u64,
}

fn unit_speed() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("a scenario needs at least one machine")]
    NoMachines,
    #[error("{fast} fast machines requested on a cluster of {machines}")]
    TooManyFastMachines { fast: usize, machines: usize },
    #[error("speed ratio {0} must be positive and finite")]
    BadSpeedRatio(f64),
    #[error("slow machine speed {0} must be positive and finite")]
    BadSlowSpeed(f64),
    #[error("job mix {0}: sizes must be finite, totals non-negative and task size positive")]
    BadJobMix(usize),
    #[error("job mix {0} produces jobs without any task")]
    EmptyJobs(usize),
    #[error("the scenario has no jobs")]
    NoJobs,
    #[error("weight range {lo}..={hi} is empty")]
    BadWeights { lo: u32, hi: u32 },
    #[error("release groups need count >= 1 and a finite gap >= 0")]
    BadReleaseGroups,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// The three benchmark programs of the evaluation, as reduce-phase shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Benchmark {
    /// One reduce task with a light load.
    WordCount,
    /// Four reduce tasks with as much data as the map phase.
    Sort,
    /// Four reduce tasks with more data than the map phase.
    TeraSort,
}

impl Benchmark {
    pub fn reduce_tasks(self) -> usize {
        match self {
            Benchmark::WordCount => 1,
            Benchmark::Sort | Benchmark::TeraSort => 4,
        }
    }

    pub fn reduce_ratio(self) -> f64 {
        match self {
            Benchmark::WordCount => 0.1,
            Benchmark::Sort => 1.0,
            Benchmark::TeraSort => 1.5,
        }
    }

    fn mix(self, count: usize, map_total: f64, task_size: f64) -> JobMix {
        JobMix { count, map_total, task_size, reduce_tasks: self.reduce_tasks(), reduce_ratio: self.reduce_ratio() }
    }
}

impl ScenarioSpec {
    fn cluster(jobs: Vec<JobMix>) -> Self {
        ScenarioSpec {
            machines: 12,
            fast_machines: None,
            speed_ratio: 8.0,
            slow_speed: 1.0,
            jobs,
            weights: WeightRange::default(),
            release_groups: ReleaseGroups::default(),
            seed: 0,
        }
    }

    /// 20 jobs of 1024 units each in tasks of 64.
    pub fn uniform(benchmark: Benchmark) -> Self {
        Self::cluster(vec![benchmark.mix(20, 1024.0, 64.0)])
    }

    /// 12 jobs of 1024 (tasks of 64), 4 of 512 (tasks of 32) and 4 of 2048
    /// (tasks of 128).
    pub fn mixed(benchmark: Benchmark) -> Self {
        Self::cluster(vec![
            benchmark.mix(12, 1024.0, 64.0),
            benchmark.mix(4, 512.0, 32.0),
            benchmark.mix(4, 2048.0, 128.0),
        ])
    }

    /// 18 TeraSort jobs in tasks of 64: `elephants` of 2048 units, the rest of
    /// 512.
    pub fn elephants(elephants: usize) -> Self {
        let elephants = elephants.min(18);
        Self::cluster(vec![
            Benchmark::TeraSort.mix(elephants, 2048.0, 64.0),
            Benchmark::TeraSort.mix(18 - elephants, 512.0, 64.0),
        ])
    }

    pub fn fast_count(&self) -> usize {
        self.fast_machines.unwrap_or(self.machines / 2)
    }

    fn check(&self) -> Result<(), SpecError> {
        if self.machines == 0 {
            return Err(SpecError::NoMachines);
        }
        if self.fast_count() > self.machines {
            return Err(SpecError::TooManyFastMachines { fast: self.fast_count(), machines: self.machines });
        }
        if !(self.speed_ratio.is_finite() && self.speed_ratio > 0.0) {
            return Err(SpecError::BadSpeedRatio(self.speed_ratio));
        }
        if !(self.slow_speed.is_finite() && self.slow_speed > 0.0) {
            return Err(SpecError::BadSlowSpeed(self.slow_speed));
        }
        for (i, mix) in self.jobs.iter().enumerate() {
            let finite = mix.map_total.is_finite() && mix.task_size.is_finite() && mix.reduce_ratio.is_finite();
            if !finite || mix.map_total < 0.0 || mix.reduce_ratio < 0.0 || (mix.map_total > 0.0 && mix.task_size <= 0.0) {
                return Err(SpecError::BadJobMix(i));
            }
            if mix.count > 0 && mix.map_total == 0.0 {
                return Err(SpecError::EmptyJobs(i));
            }
        }
        if self.jobs.iter().all(|m| m.count == 0) {
            return Err(SpecError::NoJobs);
        }
        if self.weights.lo > self.weights.hi {
            return Err(SpecError::BadWeights { lo: self.weights.lo, hi: self.weights.hi });
        }
        let g = self.release_groups;
        if g.count == 0 || !(g.gap.is_finite() && g.gap >= 0.0) {
            return Err(SpecError::BadReleaseGroups);
        }
        Ok(())
    }
}

fn map_tasks(total: f64, size: f64) -> Vec<f64> {
    let full = (total / size).floor() as usize;
    let mut tasks = vec![size; full];
    let rest = total - size * full as f64;
    if rest > 0.0 {
        tasks.push(rest);
    }
    tasks
}

/// Builds the workload described by `spec`, drawing weights and release
/// groups from `seed`.
pub fn generate_scenario(spec: &ScenarioSpec, seed: u64) -> Result<Workload, SpecError> {
    spec.check()?;
    let fast = spec.fast_count();
    let mut machines = vec![spec.slow_speed * spec.speed_ratio; fast];
    machines.resize(spec.machines, spec.slow_speed);

    let mut jobs = Vec::new();
    for mix in &spec.jobs {
        for _ in 0..mix.count {
            let reduce_total = mix.reduce_ratio * mix.map_total;
            let reduce = if mix.reduce_tasks == 0 || reduce_total == 0.0 {
                Vec::new()
            } else {
                vec![reduce_total / mix.reduce_tasks as f64; mix.reduce_tasks]
            };
            jobs.push(RawJob {
                id: jobs.len() + 1,
                weight: 0.0,
                release: 0.0,
                map: map_tasks(mix.map_total, mix.task_size),
                reduce,
            });
        }
    }

    let mut rng = seeded_rng(seed);
    for job in &mut jobs {
        job.weight = f64::from(rng.gen_range(spec.weights.lo..=spec.weights.hi));
    }
    let mut shuffled: Vec<usize> = (0..jobs.len()).collect();
    shuffled.shuffle(&mut rng);
    let groups = spec.release_groups.count.min(jobs.len());
    let (base, extra) = (jobs.len() / groups, jobs.len() % groups);
    let mut rest = &shuffled[..];
    for k in 0..groups {
        let (group, tail) = rest.split_at(base + usize::from(k < extra));
        for &i in group {
            jobs[i].release = k as f64 * spec.release_groups.gap;
        }
        rest = tail;
    }

    Ok(validate_workload(RawWorkload { machines, jobs })?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchedulerKind {
    Dmrs,
    Fifo,
    Identical,
    Maponly,
}

impl SchedulerKind {
    pub const ALL: [SchedulerKind; 4] =
        [SchedulerKind::Dmrs, SchedulerKind::Fifo, SchedulerKind::Identical, SchedulerKind::Maponly];

    pub fn name(self) -> &'static str {
        match self {
            SchedulerKind::Dmrs => "dmrs",
            SchedulerKind::Fifo => "fifo",
            SchedulerKind::Identical => "identical",
            SchedulerKind::Maponly => "maponly",
        }
    }
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchedulerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SchedulerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown scheduler {s:?}; expected dmrs, fifo, identical or maponly"))
    }
}

/// Builds a schedule with the named policy. FIFO uses early reduce when
/// `fifo_early_reduce` is set; map-only draws reduce machines from `seed`.
pub fn build_schedule(
    w: &Workload,
    kind: SchedulerKind,
    fifo_early_reduce: bool,
    seed: u64,
) -> Result<Schedule, ScheduleError> {
    match kind {
        SchedulerKind::Dmrs => Ok(plan_dmrs(w)?.schedule),
        SchedulerKind::Fifo => Ok(schedule_fifo(w, fifo_early_reduce)),
        SchedulerKind::Identical => schedule_identical(w),
        SchedulerKind::Maponly => schedule_maponly(w, seed),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimMode {
    #[default]
    Static,
    /// DMRS re-chooses machines at launch; the baselines still replay.
    Dynamic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    /// Multiplicative duration range; `None` runs at nominal speed.
    pub perturbation: Option<(f64, f64)>,
    pub mode: SimMode,
    pub fifo_early_reduce: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig { perturbation: None, mode: SimMode::Static, fifo_early_reduce: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub seed: u64,
    pub scheduler: SchedulerKind,
    pub twct_seconds: f64,
    pub twct_hours: f64,
    pub lp_bound: f64,
    pub emp_ratio: f64,
    pub theo_ratio: f64,
    #[serde(rename = "D")]
    pub skewness: f64,
    /// `1 - twct(dmrs) / twct(this scheduler)`.
    pub improvement_vs_dmrs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub scheduler: SchedulerKind,
    pub mean_twct_seconds: f64,
    pub mean_twct_hours: f64,
    pub mean_emp_ratio: f64,
    pub mean_improvement_vs_dmrs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("seed {seed}: {source}")]
    Schedule { seed: u64, source: ScheduleError },
    #[error("seed {seed}, {scheduler}: {message}")]
    Invariant { seed: u64, scheduler: SchedulerKind, message: String },
}

impl ExperimentError {
    /// True for failures of the code rather than of the input.
    pub fn is_internal(&self) -> bool {
        !matches!(self, ExperimentError::Spec(_))
    }
}

/// Plans, validates and simulates all four schedulers on one workload.
///
/// `seed` drives the map-only reduce placement and the duration draws. On
/// unperturbed runs every row is checked against the LP bound and the DMRS row
/// against the approximation ratio.
pub fn run_workload(w: &Workload, seed: u64, cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, ExperimentError> {
    let plan = plan_dmrs(w).map_err(|source| ExperimentError::Schedule { seed, source })?;
    let perturb = match cfg.perturbation {
        Some((lo, hi)) => PerturbationModel::Multiplicative { lo, hi, seed },
        None => PerturbationModel::None,
    };
    let draws = perturb.draws(w);
    let lp = plan.lp.objective;
    let theo = workload_ratio(w, &plan.stats);
    let invariant = |scheduler, message: String| ExperimentError::Invariant { seed, scheduler, message };

    let mut twcts = Vec::with_capacity(4);
    for kind in SchedulerKind::ALL {
        let sch = match kind {
            SchedulerKind::Dmrs => plan.schedule.clone(),
            _ => build_schedule(w, kind, cfg.fifo_early_reduce, seed)
                .map_err(|source| ExperimentError::Schedule { seed, source })?,
        };
        if let Some(v) = validate_schedule(w, &sch).first() {
            return Err(invariant(kind, format!("invalid schedule: {v}")));
        }
        let trace = match (kind, cfg.mode) {
            (SchedulerKind::Dmrs, SimMode::Dynamic) => execute_dynamic(w, &plan.order, &perturb),
            _ => execute_static(w, &sch, &perturb),
        };
        if let Some(v) = validate_trace(w, &trace, &draws).first() {
            return Err(invariant(kind, format!("invalid execution: {v}")));
        }
        twcts.push(trace.twct);
    }

    let dmrs = twcts[0];
    let rows: Vec<ResultRow> = SchedulerKind::ALL
        .into_iter()
        .zip(&twcts)
        .map(|(scheduler, &twct)| ResultRow {
            seed,
            scheduler,
            twct_seconds: twct,
            twct_hours: twct / 3600.0,
            lp_bound: lp,
            emp_ratio: twct / lp,
            theo_ratio: theo,
            skewness: plan.stats.skewness,
            improvement_vs_dmrs: 1.0 - dmrs / twct,
        })
        .collect();

    if cfg.perturbation.is_none() {
        for row in &rows {
            if row.lp_bound > row.twct_seconds + LP_BOUND_TOL {
                return Err(invariant(row.scheduler, format!("LP bound {} exceeds TWCT {}", row.lp_bound, row.twct_seconds)));
            }
        }
        if rows[0].emp_ratio > theo + RATIO_TOL {
            return Err(invariant(SchedulerKind::Dmrs, format!("ratio {} exceeds guarantee {theo}", rows[0].emp_ratio)));
        }
    }
    Ok(rows)
}

/// Runs the scenario once per seed (in parallel) and summarizes.
pub fn run_experiment(spec: &ScenarioSpec, seeds: &[u64], cfg: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    spec.check()?;
    let per_seed: Vec<Vec<ResultRow>> = seeds
        .par_iter()
        .map(|&seed| run_workload(&generate_scenario(spec, seed)?, seed, cfg))
        .collect::<Result<_, _>>()?;
    let mut rows: Vec<ResultRow> = per_seed.into_iter().flatten().collect();
    rows.sort_by(|a, b| a.seed.cmp(&b.seed).then(a.scheduler.cmp(&b.scheduler)));
    Ok(ExperimentResult { summary: summarize(&rows), rows })
}

pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    SchedulerKind::ALL
        .into_iter()
        .filter_map(|scheduler| {
            let mine: Vec<&ResultRow> = rows.iter().filter(|r| r.scheduler == scheduler).collect();
            if mine.is_empty() {
                return None;
            }
            let mean = |f: fn(&ResultRow) -> f64| mine.iter().map(|r| f(r)).sum::<f64>() / mine.len() as f64;
            Some(SummaryRow {
                scheduler,
                mean_twct_seconds: mean(|r| r.twct_seconds),
                mean_twct_hours: mean(|r| r.twct_hours),
                mean_emp_ratio: mean(|r| r.emp_ratio),
                mean_improvement_vs_dmrs: mean(|r| r.improvement_vs_dmrs),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// CSV rows (one per seed and scheduler) or the full result as JSON.
pub fn emit_results(res: &ExperimentResult, format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Json => {
            let mut out = serde_json::to_vec_pretty(res).expect("results serialize");
            out.push(b'\n');
            out
        }
        OutputFormat::Csv => {
            let mut out = format!("{CSV_HEADER}\n");
            for r in &res.rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    r.seed,
                    r.scheduler,
                    r.twct_seconds,
                    r.twct_hours,
                    r.lp_bound,
                    r.emp_ratio,
                    r.theo_ratio,
                    r.skewness,
                    r.improvement_vs_dmrs
                ));
            }
            out.into_bytes()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Workload {
        validate_workload(RawWorkload {
            machines: vec![1.0],
            jobs: vec![RawJob { id: 1, weight: 2.0, release: 0.0, map: vec![2.0], reduce: vec![3.0] }],
        })
        .unwrap()
    }

    #[test]
    fn scenario_one_shape() {
        let w = generate_scenario(&ScenarioSpec::uniform(Benchmark::WordCount), 1).unwrap();
        assert_eq!(w.speeds().iter().filter(|&&v| v == 8.0).count(), 6);
        assert_eq!(w.speeds().iter().filter(|&&v| v == 1.0).count(), 6);
        assert_eq!(w.job_count(), 20);
        for j in w.jobs() {
            assert_eq!(j.map_sizes, vec![64.0; 16]);
            assert_eq!(j.reduce_sizes.len(), 1);
            assert!((1.0..=5.0).contains(&j.weight) && j.weight.fract() == 0.0);
        }
        let late = w.jobs().iter().filter(|j| j.release == 60.0).count();
        assert_eq!(late, 10);
        assert_eq!(w.jobs().iter().filter(|j| j.release == 0.0).count(), 10);
        let sort = generate_scenario(&ScenarioSpec::uniform(Benchmark::Sort), 1).unwrap();
        assert!(sort.jobs().iter().all(|j| j.reduce_sizes == vec![256.0; 4]));
    }

    #[test]
    fn scenario_two_and_four_mixes() {
        let w = generate_scenario(&ScenarioSpec::mixed(Benchmark::TeraSort), 3).unwrap();
        let counts: Vec<usize> = w.jobs().iter().map(|j| j.map_sizes.len()).collect();
        assert_eq!(counts, [vec![16; 12], vec![16; 4], vec![16; 4]].concat());
        assert_eq!(w.job(13).map_sizes[0], 32.0);
        assert_eq!(w.job(17).map_total(), 2048.0);

        let w = generate_scenario(&ScenarioSpec::elephants(6), 3).unwrap();
        assert_eq!(w.job_count(), 18);
        assert_eq!(w.jobs().iter().filter(|j| j.map_total() == 2048.0).count(), 6);
        assert!(w.jobs().iter().all(|j| j.map_sizes.iter().all(|&s| s == 64.0)));
    }

    #[test]
    fn uneven_split_keeps_total() {
        assert_eq!(map_tasks(100.0, 64.0), vec![64.0, 36.0]);
        assert_eq!(map_tasks(128.0, 64.0), vec![64.0, 64.0]);
        assert_eq!(map_tasks(10.0, 64.0), vec![10.0]);
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = ScenarioSpec::mixed(Benchmark::Sort);
        let a = serde_json::to_string(&generate_scenario(&spec, 5).unwrap().to_raw()).unwrap();
        let b = serde_json::to_string(&generate_scenario(&spec, 5).unwrap().to_raw()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bad_specs() {
        let mut s = ScenarioSpec::uniform(Benchmark::Sort);
        s.speed_ratio = 0.0;
        assert_eq!(generate_scenario(&s, 0).unwrap_err(), SpecError::BadSpeedRatio(0.0));
        let mut s = ScenarioSpec::uniform(Benchmark::Sort);
        s.fast_machines = Some(13);
        assert!(matches!(generate_scenario(&s, 0), Err(SpecError::TooManyFastMachines { .. })));
        let mut s = ScenarioSpec::uniform(Benchmark::Sort);
        s.release_groups.gap = -1.0;
        assert_eq!(generate_scenario(&s, 0).unwrap_err(), SpecError::BadReleaseGroups);
        let mut s = ScenarioSpec::uniform(Benchmark::Sort);
        s.jobs[0].count = 0;
        assert_eq!(generate_scenario(&s, 0).unwrap_err(), SpecError::NoJobs);
    }

    #[test]
    fn single_job_rows_coincide() {
        let rows = run_workload(&tiny(), 4, &ExperimentConfig::default()).unwrap();
        assert_eq!(rows.len(), 4);
        for (r, kind) in rows.iter().zip(SchedulerKind::ALL) {
            assert_eq!(r.scheduler, kind);
            assert_eq!(r.twct_seconds, 10.0);
            assert!((r.lp_bound - 10.0).abs() < 1e-9);
            assert!((r.emp_ratio - 1.0).abs() < 1e-9);
            assert_eq!(r.improvement_vs_dmrs, 0.0);
            assert_eq!(r.twct_hours, 10.0 / 3600.0);
        }
    }

    #[test]
    fn csv_header_and_json_roundtrip() {
        let mut spec = ScenarioSpec::uniform(Benchmark::WordCount);
        spec.jobs[0].count = 3;
        spec.machines = 4;
        let res = run_experiment(&spec, &[2, 1], &ExperimentConfig::default()).unwrap();
        assert_eq!(res.rows.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![1, 1, 1, 1, 2, 2, 2, 2]);

        let csv = String::from_utf8(emit_results(&res, OutputFormat::Csv)).unwrap();
        assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(csv.lines().count(), 9);
        assert!(csv.lines().nth(1).unwrap().starts_with("1,dmrs,"));

        let json = emit_results(&res, OutputFormat::Json);
        assert_eq!(serde_json::from_slice::<ExperimentResult>(&json).unwrap(), res);
    }

    #[test]
    fn scheduler_names() {
        for k in SchedulerKind::ALL {
            assert_eq!(k.name().parse::<SchedulerKind>().unwrap(), k);
        }
        assert!("lpt".parse::<SchedulerKind>().is_err());
    }
}
