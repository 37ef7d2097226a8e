//! Earliest-start timing for a fixed assignment and per-machine order.
//!
//! Once every task has a machine and a position, start times are forced: a
//! task starts as soon as its machine is free, its job is released and, for a
//! reduce task, every map task of its job has finished. Jobs interleave across
//! machines, so the engine sweeps the machines repeatedly until every queue is
//! drained; a sweep with no progress means the order deadlocks (a reduce
//! queued ahead of one of its own job's maps, directly or through a cycle).

use thiserror::Error;

use crate::model::{Phase, TaskRef, Workload};
use crate::schedule::Placement;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("task order deadlocks with {remaining} tasks unplaced")]
pub struct Deadlock {
    pub remaining: usize,
}

/// Initial machine availability and already-known map completions, for
/// timing the unlaunched remainder of a partially executed plan.
#[derive(Debug, Clone, Default)]
pub(crate) struct TimelineStart {
    pub machine_free: Vec<f64>,
    /// Per job (by `id - 1`): latest end among its maps that are not part of
    /// the sequences because they already run or ran.
    pub known_map_end: Vec<f64>,
}

/// Times `sequences[l]` on machine `l`; `duration(task, l)` gives run times.
pub fn realize(
    w: &Workload,
    sequences: &[Vec<TaskRef>],
    duration: impl Fn(TaskRef, usize) -> f64,
) -> Result<Vec<Placement>, Deadlock> {
    realize_from(w, sequences, duration, None)
}

pub(crate) fn realize_from(
    w: &Workload,
    sequences: &[Vec<TaskRef>],
    duration: impl Fn(TaskRef, usize) -> f64,
    start: Option<&TimelineStart>,
) -> Result<Vec<Placement>, Deadlock> {
    let n = w.job_count();
    let mut maps_left = vec![0usize; n];
    let mut map_end: Vec<f64> = w.jobs().iter().map(|j| j.release).collect();
    for t in sequences.iter().flatten() {
        if t.phase == Phase::Map {
            maps_left[t.job - 1] += 1;
        }
    }
    let mut free = vec![0.0; sequences.len()];
    if let Some(s) = start {
        for (f, &sf) in free.iter_mut().zip(&s.machine_free) {
            *f = sf;
        }
        for (j, &end) in s.known_map_end.iter().enumerate() {
            map_end[j] = map_end[j].max(end);
        }
    }

    let total: usize = sequences.iter().map(Vec::len).sum();
    let mut next = vec![0usize; sequences.len()];
    let mut out = Vec::with_capacity(total);
    loop {
        let mut progressed = false;
        for (l, seq) in sequences.iter().enumerate() {
            while let Some(&task) = seq.get(next[l]) {
                let j = task.job - 1;
                let ready = match task.phase {
                    Phase::Map => w.job(task.job).release,
                    Phase::Reduce if maps_left[j] > 0 => break,
                    Phase::Reduce => map_end[j],
                };
                let begin = free[l].max(ready);
                let end = begin + duration(task, l);
                free[l] = end;
                if task.phase == Phase::Map {
                    maps_left[j] -= 1;
                    map_end[j] = map_end[j].max(end);
                }
                out.push(Placement { task, machine: l, start: begin, end });
                next[l] += 1;
                progressed = true;
            }
        }
        if out.len() == total {
            return Ok(out);
        }
        if !progressed {
            return Err(Deadlock { remaining: total - out.len() });
        }
    }
}
