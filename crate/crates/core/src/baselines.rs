//! Comparison schedulers. All of them return the same [`Schedule`] type as
//! DMRS and produce legal schedules; only quality differs.
//!
//! * FIFO: jobs by release time, each task to the first machine that frees up.
//! * Identical-machine: plans with DMRS as if every machine ran at the mean
//!   speed, then runs that fixed assignment on the real machines.
//! * Map-only: orders jobs and places map tasks with DMRS while ignoring the
//!   reduce phase; reduce tasks go to uniformly random machines.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dmrs::{self, place_maps, ScheduleError, SchedulerState};
use crate::model::{derive_stats, JobId, Phase, TaskRef, Workload};
use crate::schedule::{Placement, Schedule};
use crate::timeline;

/// Random generator used everywhere a seed is accepted: ChaCha8 seeded with
/// `ChaCha8Rng::seed_from_u64`.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Pending {
    eligible: f64,
    seq: usize,
    task: TaskRef,
}

impl Eq for Pending {}

impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        self.eligible.total_cmp(&other.eligible).then(self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// First-come first-served.
///
/// Jobs are taken by `(release, id)`; within a job maps go largest first.
/// Each task takes the machine with the smallest `max(t_l, eligible)` (not the
/// one that would finish it first). With `early_reduce`, a job's reduce tasks
/// are assigned right after its maps and hold their machine idle until the map
/// phase ends. Without it they become eligible only when the map phase ends.
pub fn schedule_fifo(w: &Workload, early_reduce: bool) -> Schedule {
    let mut order: Vec<JobId> = (1..=w.job_count()).collect();
    order.sort_by(|&a, &b| w.job(a).release.total_cmp(&w.job(b).release).then(a.cmp(&b)));

    let mut seq = 0;
    let mut next_seq = || {
        seq += 1;
        seq
    };
    let mut heap = BinaryHeap::new();
    let mut maps_left = vec![0usize; w.job_count()];
    let mut map_end: Vec<f64> = w.jobs().iter().map(|j| j.release).collect();
    for &id in &order {
        let job = w.job(id);
        maps_left[id - 1] = job.map_sizes.len();
        for t in 0..job.map_sizes.len() {
            heap.push(Reverse(Pending { eligible: job.release, seq: next_seq(), task: TaskRef::map(id, t) }));
        }
        if early_reduce || job.map_sizes.is_empty() {
            for t in 0..job.reduce_sizes.len() {
                heap.push(Reverse(Pending { eligible: job.release, seq: next_seq(), task: TaskRef::reduce(id, t) }));
            }
        }
    }

    let speeds = w.speeds();
    let mut frontier = vec![0.0_f64; w.machine_count()];
    let mut placements = Vec::with_capacity(w.task_count());
    while let Some(Reverse(p)) = heap.pop() {
        let j = p.task.job - 1;
        let job = w.job(p.task.job);
        let machine = (0..frontier.len())
            .min_by(|&a, &b| frontier[a].max(p.eligible).total_cmp(&frontier[b].max(p.eligible)).then(a.cmp(&b)))
            .expect("at least one machine");
        let mut start = frontier[machine].max(p.eligible).max(job.release);
        if p.task.phase == Phase::Reduce {
            start = start.max(map_end[j]);
        }
        let end = start + w.task_size(p.task) / speeds[machine];
        frontier[machine] = end;
        placements.push(Placement { task: p.task, machine, start, end });

        if p.task.phase == Phase::Map {
            map_end[j] = map_end[j].max(end);
            maps_left[j] -= 1;
            if maps_left[j] == 0 && !early_reduce {
                for t in 0..job.reduce_sizes.len() {
                    heap.push(Reverse(Pending { eligible: map_end[j], seq: next_seq(), task: TaskRef::reduce(job.id, t) }));
                }
            }
        }
    }
    Schedule::from_placements(w, placements, order)
}

/// DMRS planned on a cluster of `m` machines at speed `mu/m`, replayed on the
/// real speeds with the planned assignment and per-machine order.
pub fn schedule_identical(w: &Workload) -> Result<Schedule, ScheduleError> {
    let m = w.machine_count();
    let mean = w.cluster().total_speed() / m as f64;
    let planning = w.with_speeds(vec![mean; m]);
    let plan = dmrs::plan_dmrs(&planning)?;
    let sequences = plan.schedule.machine_sequences();
    let placements = timeline::realize(w, &sequences, |t, l| w.task_size(t) / w.speeds()[l])
        .expect("a list-scheduled order never deadlocks");
    Ok(Schedule::from_placements(w, placements, plan.order))
}

/// Map-only with reduce machines drawn from [`seeded_rng`]`(seed)`.
pub fn schedule_maponly(w: &Workload, seed: u64) -> Result<Schedule, ScheduleError> {
    let mut rng = seeded_rng(seed);
    let m = w.machine_count();
    schedule_maponly_with(w, || rng.gen_range(0..m))
}

/// Map-only with reduce machines supplied by `pick_machine` (0-based).
pub fn schedule_maponly_with(w: &Workload, mut pick_machine: impl FnMut() -> usize) -> Result<Schedule, ScheduleError> {
    let planning = w.without_reduces();
    let stats = derive_stats(&planning);
    let lp = crate::lp_relax::solve_lp(&planning, &stats)?;
    let order = dmrs::job_order(&lp, &stats);

    let mut state = SchedulerState::new(w.machine_count());
    let mut placements = Vec::with_capacity(w.task_count());
    for &id in &order {
        let map_end = place_maps(w, id, &mut state, &mut placements);
        let job = w.job(id);
        let ready = map_end.max(job.release);
        for (t, &size) in job.reduce_sizes.iter().enumerate() {
            let machine = pick_machine();
            let (start, end) = state.on_machine(w.speeds(), machine, ready, size);
            state.commit(machine, end);
            placements.push(Placement { task: TaskRef::reduce(id, t), machine, start, end });
        }
    }
    Ok(Schedule::from_placements(w, placements, order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_workload, RawJob, RawWorkload};

    fn workload(speeds: Vec<f64>, jobs: Vec<(f64, Vec<f64>, Vec<f64>)>) -> Workload {
        validate_workload(RawWorkload {
            machines: speeds,
            jobs: jobs
                .into_iter()
                .enumerate()
                .map(|(i, (release, map, reduce))| RawJob { id: i + 1, weight: 1.0, release, map, reduce })
                .collect(),
        })
        .unwrap()
    }

    fn span(s: &Schedule, t: TaskRef) -> (usize, f64, f64) {
        let p = s.placement_of(t).unwrap();
        (p.machine, p.start, p.end)
    }

    #[test]
    fn all_policies_agree_on_one_job_one_machine() {
        let w = workload(vec![1.0], vec![(0.0, vec![2.0], vec![3.0])]);
        assert_eq!(schedule_fifo(&w, true).twct(&w), 5.0);
        assert_eq!(schedule_fifo(&w, false).twct(&w), 5.0);
        assert_eq!(schedule_identical(&w).unwrap().twct(&w), 5.0);
        assert_eq!(schedule_maponly(&w, 3).unwrap().twct(&w), 5.0);
    }

    #[test]
    fn fifo_early_reduce_seizes_fast_machine() {
        let w = workload(vec![8.0, 1.0], vec![(0.0, vec![8.0, 8.0], vec![8.0])]);
        let s = schedule_fifo(&w, true);
        assert_eq!(span(&s, TaskRef::map(1, 0)), (0, 0.0, 1.0));
        assert_eq!(span(&s, TaskRef::map(1, 1)), (1, 0.0, 8.0));
        assert_eq!(span(&s, TaskRef::reduce(1, 0)), (0, 8.0, 9.0));
    }

    #[test]
    fn fifo_without_early_reduce_lets_other_jobs_use_the_gap() {
        // job 2 arrives at 0.5; with seizing, m1 is held by job 1's reduce
        let w = workload(vec![8.0, 1.0], vec![(0.0, vec![8.0, 8.0], vec![8.0]), (0.5, vec![8.0], vec![])]);
        let seized = schedule_fifo(&w, true);
        assert_eq!(span(&seized, TaskRef::map(2, 0)), (1, 8.0, 16.0));
        let free = schedule_fifo(&w, false);
        assert_eq!(span(&free, TaskRef::map(2, 0)), (0, 1.0, 2.0));
        assert_eq!(span(&free, TaskRef::reduce(1, 0)), (0, 8.0, 9.0));
    }

    #[test]
    fn fifo_respects_release() {
        let w = workload(vec![1.0, 1.0], vec![(0.0, vec![1.0], vec![1.0]), (60.0, vec![1.0, 1.0], vec![1.0])]);
        let s = schedule_fifo(&w, true);
        assert!(s.placements.iter().filter(|p| p.task.job == 2).all(|p| p.start >= 60.0));
    }

    #[test]
    fn identical_pays_for_slow_machines() {
        let w = workload(vec![8.0, 1.0], vec![(0.0, vec![4.0, 4.0], vec![])]);
        let s = schedule_identical(&w).unwrap();
        assert_eq!(span(&s, TaskRef::map(1, 0)), (0, 0.0, 0.5));
        assert_eq!(span(&s, TaskRef::map(1, 1)), (1, 0.0, 4.0));
        assert_eq!(s.job_completion, vec![4.0]);
        assert_eq!(dmrs::plan_dmrs(&w).unwrap().schedule.job_completion, vec![1.0]);
    }

    #[test]
    fn identical_matches_dmrs_on_uniform_cluster() {
        let w = workload(
            vec![2.0, 2.0, 2.0],
            vec![(0.0, vec![3.0, 1.0, 2.0], vec![2.0]), (1.0, vec![5.0], vec![1.0, 1.0])],
        );
        let identical = schedule_identical(&w).unwrap();
        let planned = dmrs::plan_dmrs(&w).unwrap().schedule;
        for p in &planned.placements {
            assert_eq!(identical.placement_of(p.task), Some(p));
        }
        assert_eq!(identical.job_completion, planned.job_completion);
    }

    #[test]
    fn maponly_random_reduce() {
        let w = workload(vec![8.0, 1.0], vec![(0.0, vec![8.0], vec![8.0])]);
        let s = schedule_maponly_with(&w, || 1).unwrap();
        assert_eq!(span(&s, TaskRef::map(1, 0)), (0, 0.0, 1.0));
        assert_eq!(span(&s, TaskRef::reduce(1, 0)), (1, 1.0, 9.0));
        assert_eq!(dmrs::plan_dmrs(&w).unwrap().schedule.job_completion, vec![2.0]);
    }

    #[test]
    fn maponly_is_deterministic_and_equals_dmrs_without_reduces() {
        let w = workload(vec![3.0, 1.0], vec![(0.0, vec![3.0, 1.0], vec![2.0, 2.0]), (0.0, vec![1.0], vec![4.0])]);
        assert_eq!(schedule_maponly(&w, 42).unwrap(), schedule_maponly(&w, 42).unwrap());

        let maps_only = workload(vec![3.0, 1.0], vec![(0.0, vec![3.0, 1.0], vec![]), (2.0, vec![1.0, 1.0], vec![])]);
        assert_eq!(schedule_maponly(&maps_only, 7).unwrap(), dmrs::plan_dmrs(&maps_only).unwrap().schedule);
    }
}
