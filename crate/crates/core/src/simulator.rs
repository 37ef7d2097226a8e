//! Schedule validation, execution under perturbed task durations, and an
//! exhaustive optimum for tiny instances.
//!
//! Static execution replays a schedule's per-machine task order with realized
//! durations `size/speed * draw`. Dynamic execution runs the DMRS plan as
//! per-machine queues and, right before a task launches, re-runs the
//! earliest-completion choice against the machines' estimated availability; a
//! task whose best machine has changed is moved there.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::seeded_rng;
use crate::dmrs::schedule_dmrs;
use crate::model::{JobId, Phase, TaskRef, Workload};
use crate::schedule::{Placement, PlacementDoc, Schedule};
use crate::timeline::{self, TimelineStart};

/// Allowed gap between a placement's length and its expected duration.
pub const DURATION_TOL: f64 = 1e-9;

/// Largest instance [`brute_force_optimal`] accepts.
pub const BRUTE_FORCE_MAX_TASKS: usize = 6;
pub const BRUTE_FORCE_MAX_MACHINES: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    MissingTask(TaskRef),
    DuplicateTask(TaskRef),
    UnknownTask(TaskRef),
    UnknownMachine { task: TaskRef, machine: usize },
    Overlap { machine: usize, first: TaskRef, second: TaskRef },
    BeforeRelease { task: TaskRef, start: f64, release: f64 },
    Precedence { reduce: TaskRef, start: f64, map_end: f64 },
    Duration { task: TaskRef, expected: f64, actual: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingTask(t) => write!(f, "{t:?} is not placed"),
            Violation::DuplicateTask(t) => write!(f, "{t:?} is placed more than once"),
            Violation::UnknownTask(t) => write!(f, "{t:?} does not exist"),
            Violation::UnknownMachine { task, machine } => write!(f, "{task:?} is on unknown machine {machine}"),
            Violation::Overlap { machine, first, second } => {
                write!(f, "{first:?} and {second:?} overlap on machine {machine}")
            }
            Violation::BeforeRelease { task, start, release } => {
                write!(f, "{task:?} starts at {start} before release {release}")
            }
            Violation::Precedence { reduce, start, map_end } => {
                write!(f, "{reduce:?} starts at {start} before its map phase ends at {map_end}")
            }
            Violation::Duration { task, expected, actual } => {
                write!(f, "{task:?} runs for {actual}, expected {expected}")
            }
        }
    }
}

/// Per-task duration multipliers.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskDraws {
    map: Vec<Vec<f64>>,
    reduce: Vec<Vec<f64>>,
}

impl TaskDraws {
    pub fn constant(w: &Workload, value: f64) -> Self {
        TaskDraws {
            map: w.jobs().iter().map(|j| vec![value; j.map_sizes.len()]).collect(),
            reduce: w.jobs().iter().map(|j| vec![value; j.reduce_sizes.len()]).collect(),
        }
    }

    pub fn get(&self, task: TaskRef) -> f64 {
        self.slot(task).map_or(1.0, |v| *v)
    }

    pub fn set(&mut self, task: TaskRef, value: f64) {
        let table = match task.phase {
            Phase::Map => &mut self.map,
            Phase::Reduce => &mut self.reduce,
        };
        table[task.job - 1][task.index] = value;
    }

    fn slot(&self, task: TaskRef) -> Option<&f64> {
        let table = match task.phase {
            Phase::Map => &self.map,
            Phase::Reduce => &self.reduce,
        };
        table.get(task.job.wrapping_sub(1))?.get(task.index)
    }
}

/// How realized durations deviate from `size/speed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum PerturbationModel {
    None,
    /// Each task's duration is multiplied by an independent uniform draw from
    /// `[lo, hi]`.
    Multiplicative { lo: f64, hi: f64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("perturbation range [{lo}, {hi}] must satisfy 0 < lo <= hi")]
pub struct PerturbationError {
    pub lo: f64,
    pub hi: f64,
}

impl PerturbationModel {
    pub fn multiplicative(lo: f64, hi: f64, seed: u64) -> Result<Self, PerturbationError> {
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(PerturbationError { lo, hi });
        }
        Ok(PerturbationModel::Multiplicative { lo, hi, seed })
    }

    /// Draws for every task, jobs by id, maps before reduces, each in index
    /// order.
    pub fn draws(&self, w: &Workload) -> TaskDraws {
        let mut draws = TaskDraws::constant(w, 1.0);
        if let PerturbationModel::Multiplicative { lo, hi, seed } = *self {
            let mut rng = seeded_rng(seed);
            for task in w.tasks() {
                draws.set(task, rng.gen_range(lo..=hi));
            }
        }
        draws
    }
}

/// Realized execution of a workload.
#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionTrace {
    pub schedule: Schedule,
    pub twct: f64,
    /// Tasks moved off their planned machine at launch time.
    pub replan_count: usize,
}

impl ExecutionTrace {
    fn new(w: &Workload, schedule: Schedule, replan_count: usize) -> Self {
        ExecutionTrace { twct: schedule.twct(w), schedule, replan_count }
    }

    pub fn to_doc(&self) -> TraceDoc {
        TraceDoc {
            order: self.schedule.order.clone(),
            placements: self.schedule.placements.iter().map(PlacementDoc::from).collect(),
            job_completion: self.schedule.job_completion.clone(),
            map_completion: self.schedule.map_completion.clone(),
            twct: self.twct,
            replan_count: self.replan_count,
        }
    }
}

/// JSON shape of an [`ExecutionTrace`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDoc {
    pub order: Vec<JobId>,
    pub placements: Vec<PlacementDoc>,
    pub job_completion: Vec<f64>,
    pub map_completion: Vec<f64>,
    pub twct: f64,
    pub replan_count: usize,
}

/// All violations of `sch` against nominal durations.
pub fn validate_schedule(w: &Workload, sch: &Schedule) -> Vec<Violation> {
    validate_placements(w, &sch.placements, None)
}

/// All violations of an execution trace against its draws.
pub fn validate_trace(w: &Workload, trace: &ExecutionTrace, draws: &TaskDraws) -> Vec<Violation> {
    validate_placements(w, &trace.schedule.placements, Some(draws))
}

/// Checks completeness, machine overlap, release, precedence and durations.
/// Durations are `size/speed`, times the draw when `draws` is given.
pub fn validate_placements(w: &Workload, placements: &[Placement], draws: Option<&TaskDraws>) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut valid = Vec::with_capacity(placements.len());
    for p in placements {
        let t = p.task;
        let exists = (1..=w.job_count()).contains(&t.job) && t.index < w.job(t.job).sizes(t.phase).len();
        if !exists {
            out.push(Violation::UnknownTask(t));
            continue;
        }
        if !seen.insert(t) {
            out.push(Violation::DuplicateTask(t));
            continue;
        }
        if p.machine >= w.machine_count() {
            out.push(Violation::UnknownMachine { task: t, machine: p.machine });
            continue;
        }
        valid.push(p);
    }
    for t in w.tasks() {
        if !seen.contains(&t) {
            out.push(Violation::MissingTask(t));
        }
    }

    let mut map_end: Vec<f64> = w.jobs().iter().map(|j| j.release).collect();
    for p in valid.iter().filter(|p| p.task.phase == Phase::Map) {
        let e = &mut map_end[p.task.job - 1];
        *e = e.max(p.end);
    }
    for p in &valid {
        let t = p.task;
        let release = w.job(t.job).release;
        if p.start < release {
            out.push(Violation::BeforeRelease { task: t, start: p.start, release });
        }
        if t.phase == Phase::Reduce && p.start < map_end[t.job - 1] {
            out.push(Violation::Precedence { reduce: t, start: p.start, map_end: map_end[t.job - 1] });
        }
        let draw = draws.map_or(1.0, |d| d.get(t));
        let expected = w.task_size(t) / w.speeds()[p.machine] * draw;
        let actual = p.end - p.start;
        if (actual - expected).abs() > DURATION_TOL {
            out.push(Violation::Duration { task: t, expected, actual });
        }
    }

    let mut by_machine = vec![Vec::new(); w.machine_count()];
    for p in &valid {
        by_machine[p.machine].push(*p);
    }
    for (machine, list) in by_machine.iter_mut().enumerate() {
        list.sort_by(|a, b| a.start.total_cmp(&b.start).then(a.end.total_cmp(&b.end)));
        for pair in list.windows(2) {
            if pair[1].start < pair[0].end {
                out.push(Violation::Overlap { machine, first: pair[0].task, second: pair[1].task });
            }
        }
    }
    out
}

/// Replays `sch`'s assignment and per-machine order with perturbed durations.
pub fn execute_static(w: &Workload, sch: &Schedule, perturb: &PerturbationModel) -> ExecutionTrace {
    execute_static_with(w, sch, &perturb.draws(w))
}

pub fn execute_static_with(w: &Workload, sch: &Schedule, draws: &TaskDraws) -> ExecutionTrace {
    let placements = timeline::realize(w, &sch.machine_sequences(), |t, l| w.task_size(t) / w.speeds()[l] * draws.get(t))
        .expect("schedule order must not deadlock");
    ExecutionTrace::new(w, Schedule::from_placements(w, placements, sch.order.clone()), 0)
}

/// Executes the DMRS plan for `order`, re-choosing each task's machine right
/// before it launches.
pub fn execute_dynamic(w: &Workload, order: &[JobId], perturb: &PerturbationModel) -> ExecutionTrace {
    execute_dynamic_with(w, order, &perturb.draws(w))
}

#[derive(Debug, Clone, Copy)]
struct Running {
    task: TaskRef,
    start: f64,
    end: f64,
}

/// Event loop behind [`execute_dynamic`].
///
/// Every machine works through a queue kept in the plan's dispatch order (job
/// order, maps before reduces, largest first). An idle machine launches its
/// head task once the task is ready. Before the launch, the task's completion
/// is estimated on every machine: its own machine could start it now; any
/// other machine first has to finish its running task and the queued tasks
/// that precede this one in dispatch order. Remaining time of a running task
/// is its unprocessed data over the nominal speed. If another machine would
/// finish the task strictly earlier, the task moves into that machine's queue.
/// A task is checked at most once.
pub fn execute_dynamic_with(w: &Workload, order: &[JobId], draws: &TaskDraws) -> ExecutionTrace {
    let plan = schedule_dmrs(w, order);
    let dispatch: HashMap<TaskRef, usize> = plan.placements.iter().enumerate().map(|(i, p)| (p.task, i)).collect();
    let mut queues = plan.machine_sequences();
    let m = w.machine_count();
    let speeds = w.speeds();
    let nominal = |t: TaskRef, l: usize| w.task_size(t) / speeds[l];

    let mut maps_left: Vec<usize> = w.jobs().iter().map(|j| j.map_sizes.len()).collect();
    let mut map_end: Vec<f64> = w.jobs().iter().map(|j| j.release).collect();
    let mut running: Vec<Option<Running>> = vec![None; m];
    let mut checked = HashSet::new();
    let mut placements = Vec::with_capacity(w.task_count());
    let mut replans = 0;
    let mut now = 0.0_f64;

    loop {
        for (l, slot) in running.iter_mut().enumerate() {
            if let Some(r) = slot.take_if(|r| r.end <= now) {
                placements.push(Placement { task: r.task, machine: l, start: r.start, end: r.end });
                if r.task.phase == Phase::Map {
                    let j = r.task.job - 1;
                    maps_left[j] -= 1;
                    map_end[j] = map_end[j].max(r.end);
                }
            }
        }

        let mut changed = true;
        while changed {
            changed = false;
            for l in 0..m {
                if running[l].is_some() {
                    continue;
                }
                let Some(&task) = queues[l].first() else { continue };
                let job = w.job(task.job);
                let ready = match task.phase {
                    Phase::Map => job.release,
                    Phase::Reduce if maps_left[task.job - 1] > 0 => continue,
                    Phase::Reduce => map_end[task.job - 1],
                };
                if ready > now {
                    continue;
                }
                if checked.insert(task) {
                    let target = relaunch_target(w, &queues, &running, &map_end, &dispatch, now, l, task, ready);
                    if target != l {
                        replans += 1;
                        queues[l].remove(0);
                        let pos = queues[target].partition_point(|t| dispatch[t] < dispatch[&task]);
                        queues[target].insert(pos, task);
                        changed = true;
                        continue;
                    }
                }
                queues[l].remove(0);
                running[l] = Some(Running { task, start: now, end: now + nominal(task, l) * draws.get(task) });
                changed = true;
            }
        }

        let next_end = running.iter().flatten().map(|r| r.end).fold(f64::INFINITY, f64::min);
        let next_release = queues
            .iter()
            .flatten()
            .map(|t| w.job(t.job).release)
            .filter(|&r| r > now)
            .fold(f64::INFINITY, f64::min);
        let next = next_end.min(next_release);
        if next.is_infinite() {
            break;
        }
        now = next;
    }
    assert!(queues.iter().all(Vec::is_empty), "dynamic execution stalled");
    ExecutionTrace::new(w, Schedule::from_placements(w, placements, order.to_vec()), replans)
}

/// Machine on which `task`, at the head of idle machine `own`, is estimated to
/// finish first; `own` wins ties.
#[allow(clippy::too_many_arguments)]
fn relaunch_target(
    w: &Workload,
    queues: &[Vec<TaskRef>],
    running: &[Option<Running>],
    map_end: &[f64],
    dispatch: &HashMap<TaskRef, usize>,
    now: f64,
    own: usize,
    task: TaskRef,
    ready: f64,
) -> usize {
    let speeds = w.speeds();
    let estimated_end = |r: &Running, l: usize| {
        // remaining data over nominal speed, written so that a task running at
        // nominal speed is estimated to end exactly when planned
        let nominal = w.task_size(r.task) / speeds[l];
        r.start + nominal + (now - r.start) * (1.0 - nominal / (r.end - r.start))
    };

    let mut initial = TimelineStart {
        machine_free: (0..queues.len()).map(|l| running[l].as_ref().map_or(now, |r| estimated_end(r, l))).collect(),
        known_map_end: map_end.to_vec(),
    };
    for (l, r) in running.iter().enumerate() {
        if let Some(r) = r.filter(|r| r.task.phase == Phase::Map) {
            let e = &mut initial.known_map_end[r.task.job - 1];
            *e = e.max(estimated_end(&r, l));
        }
    }
    let sequences: Vec<Vec<TaskRef>> = queues
        .iter()
        .map(|q| q.iter().copied().filter(|t| dispatch[t] < dispatch[&task]).collect())
        .collect();
    let estimate = timeline::realize_from(w, &sequences, |t, l| w.task_size(t) / speeds[l], Some(&initial))
        .expect("dispatch order never deadlocks");
    let mut free = initial.machine_free.clone();
    for p in &estimate {
        free[p.machine] = free[p.machine].max(p.end);
    }

    let size = w.task_size(task);
    let mut best = (own, now + size / speeds[own]);
    for l in 0..queues.len() {
        if l == own {
            continue;
        }
        let end = free[l].max(ready) + size / speeds[l];
        if end < best.1 {
            best = (l, end);
        }
    }
    best.0
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("instance has {tasks} tasks on {machines} machines; exhaustive search allows at most {max_tasks} tasks on {max_machines} machines", max_tasks = BRUTE_FORCE_MAX_TASKS, max_machines = BRUTE_FORCE_MAX_MACHINES)]
pub struct TooLarge {
    pub tasks: usize,
    pub machines: usize,
}

/// Minimum TWCT over every machine assignment and per-machine order, with the
/// schedule attaining it.
pub fn brute_force_optimal(w: &Workload) -> Result<(f64, Schedule), TooLarge> {
    let (tasks, machines) = (w.task_count(), w.machine_count());
    if tasks > BRUTE_FORCE_MAX_TASKS || machines > BRUTE_FORCE_MAX_MACHINES {
        return Err(TooLarge { tasks, machines });
    }
    let all: Vec<TaskRef> = w.tasks().collect();
    let mut sequences = vec![Vec::new(); machines];
    let mut best: Option<(f64, Vec<Placement>)> = None;
    enumerate(w, &all, &mut sequences, &mut best);
    let (twct, placements) = best.expect("some order is always feasible");

    let sch = Schedule::from_placements(w, placements, Vec::new());
    let mut order: Vec<JobId> = (1..=w.job_count()).collect();
    order.sort_by(|&a, &b| sch.job_completion[a - 1].total_cmp(&sch.job_completion[b - 1]).then(a.cmp(&b)));
    Ok((twct, Schedule { order, ..sch }))
}

fn enumerate(w: &Workload, rest: &[TaskRef], sequences: &mut [Vec<TaskRef>], best: &mut Option<(f64, Vec<Placement>)>) {
    let Some((&task, rest)) = rest.split_first() else {
        if let Ok(placements) = timeline::realize(w, sequences, |t, l| w.task_size(t) / w.speeds()[l]) {
            let sch = Schedule::from_placements(w, placements, Vec::new());
            let twct = sch.twct(w);
            if best.as_ref().is_none_or(|(b, _)| twct < *b) {
                *best = Some((twct, sch.placements));
            }
        }
        return;
    };
    for l in 0..sequences.len() {
        for pos in 0..=sequences[l].len() {
            sequences[l].insert(pos, task);
            enumerate(w, rest, sequences, best);
            sequences[l].remove(pos);
        }
    }
}
