//! LP-guided list scheduling of dependent map/reduce tasks.
//!
//! Jobs are ordered by `C_j - p_j/(2mu_j)` from the LP relaxation. Then, job by
//! job, every map task (largest first) goes to the machine where it would
//! finish earliest, and after the job's map phase every reduce task (largest
//! first) does the same, starting no earlier than the map phase's end. Idle
//! gaps for release times and precedence fall out of the frontier update.
//!
//! The module also evaluates the per-job completion bound and the overall
//! approximation ratio that this procedure is proven to satisfy.

use thiserror::Error;

use crate::lp_relax::{self, LpRelaxError, LpSolution};
use crate::model::{derive_stats, ratio, DerivedStats, JobId, TaskRef, Workload};
use crate::schedule::{Placement, Schedule};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error(transparent)]
    Lp(#[from] LpRelaxError),
}

/// Per-machine time at which the machine next becomes free.
#[derive(Debug, Clone, PartialEq)]
pub struct SchedulerState {
    pub frontier: Vec<f64>,
}

impl SchedulerState {
    pub fn new(machines: usize) -> Self {
        SchedulerState { frontier: vec![0.0; machines] }
    }

    pub fn starting_at(frontier: Vec<f64>) -> Self {
        SchedulerState { frontier }
    }

    /// Machine minimizing `max(frontier_l, ready) + size/v_l`; ties go to the
    /// lowest index. Returns `(machine, start, end)`.
    pub fn earliest_completion(&self, speeds: &[f64], ready: f64, size: f64) -> (usize, f64, f64) {
        let mut best = (0, 0.0, f64::INFINITY);
        for (l, (&t, &v)) in self.frontier.iter().zip(speeds).enumerate() {
            let start = t.max(ready);
            let end = start + size / v;
            if end < best.2 {
                best = (l, start, end);
            }
        }
        best
    }

    /// Start and end of a task forced onto `machine`.
    pub fn on_machine(&self, speeds: &[f64], machine: usize, ready: f64, size: f64) -> (f64, f64) {
        let start = self.frontier[machine].max(ready);
        (start, start + size / speeds[machine])
    }

    pub fn commit(&mut self, machine: usize, end: f64) {
        debug_assert!(end >= self.frontier[machine]);
        self.frontier[machine] = end;
    }
}

/// Jobs ascending by `C_j - p_j/(2mu_j)`, ties by id.
pub fn job_order(lp: &LpSolution, s: &DerivedStats) -> Vec<JobId> {
    let key = |j: JobId| lp.completion[j - 1] - ratio(s.job(j).total, 2.0 * s.job(j).max_rate);
    let mut order: Vec<JobId> = (1..=lp.completion.len()).collect();
    order.sort_by(|&a, &b| key(a).total_cmp(&key(b)).then(a.cmp(&b)));
    order
}

/// Places one job's map tasks greedily; returns the map-phase end (the
/// release time when the job has no maps).
pub(crate) fn place_maps(
    w: &Workload,
    job: JobId,
    state: &mut SchedulerState,
    out: &mut Vec<Placement>,
) -> f64 {
    let j = w.job(job);
    let mut map_end = j.release;
    for (t, &size) in j.map_sizes.iter().enumerate() {
        let (machine, start, end) = state.earliest_completion(w.speeds(), j.release, size);
        state.commit(machine, end);
        out.push(Placement { task: TaskRef::map(job, t), machine, start, end });
        map_end = map_end.max(end);
    }
    map_end
}

/// Runs the list-scheduling pass for the given job order.
pub fn schedule_dmrs(w: &Workload, order: &[JobId]) -> Schedule {
    let mut state = SchedulerState::new(w.machine_count());
    let mut placements = Vec::with_capacity(w.task_count());
    for &job in order {
        let map_end = place_maps(w, job, &mut state, &mut placements);
        let j = w.job(job);
        let ready = map_end.max(j.release);
        for (t, &size) in j.reduce_sizes.iter().enumerate() {
            let (machine, start, end) = state.earliest_completion(w.speeds(), ready, size);
            state.commit(machine, end);
            placements.push(Placement { task: TaskRef::reduce(job, t), machine, start, end });
        }
    }
    Schedule::from_placements(w, placements, order.to_vec())
}

/// Everything a DMRS run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct DmrsPlan {
    pub stats: DerivedStats,
    pub lp: LpSolution,
    pub order: Vec<JobId>,
    pub schedule: Schedule,
}

/// Solve the relaxation, order jobs, and schedule.
pub fn plan_dmrs(w: &Workload) -> Result<DmrsPlan, ScheduleError> {
    let stats = derive_stats(w);
    let lp = lp_relax::solve_lp(w, &stats)?;
    let order = job_order(&lp, &stats);
    let schedule = schedule_dmrs(w, &order);
    Ok(DmrsPlan { stats, lp, order, schedule })
}

/// Upper bound on the completion time of the job at 1-based `position` in
/// `order`:
///
/// `max_{k<=j} r_σ(k) + ((m-1)(p^R_{σ(j),1} + Σ_{k<=j} p^M_{σ(k),1}) + Σ_{k<=j} p_σ(k)) / mu`
pub fn completion_bound(w: &Workload, s: &DerivedStats, order: &[JobId], position: usize) -> f64 {
    assert!((1..=order.len()).contains(&position), "position {position} out of 1..={}", order.len());
    let prefix = &order[..position];
    let last = w.job(order[position - 1]);
    let max_release = prefix.iter().map(|&k| w.job(k).release).fold(0.0, f64::max);
    let largest_maps: f64 = prefix.iter().map(|&k| w.job(k).largest_map()).sum();
    let work: f64 = prefix.iter().map(|&k| s.job(k).total).sum();
    let m = w.machine_count() as f64;
    max_release + ((m - 1.0) * (last.largest_reduce() + largest_maps) + work) / s.mu
}

/// Approximation ratio against the optimum: `2(1 + (m-1)/D)` with all releases
/// at zero, `3 + 2(m-1)/D` otherwise.
pub fn theoretical_ratio(machines: usize, skewness: f64, zero_release: bool) -> f64 {
    let spread = (machines as f64 - 1.0) / skewness;
    if zero_release {
        2.0 * (1.0 + spread)
    } else {
        3.0 + 2.0 * spread
    }
}

/// [`theoretical_ratio`] for a workload.
pub fn workload_ratio(w: &Workload, s: &DerivedStats) -> f64 {
    theoretical_ratio(w.machine_count(), s.skewness, w.all_releases_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_workload, RawJob, RawWorkload};

    fn one_job(speeds: Vec<f64>, map: Vec<f64>, reduce: Vec<f64>, release: f64) -> Workload {
        validate_workload(RawWorkload {
            machines: speeds,
            jobs: vec![RawJob { id: 1, weight: 1.0, release, map, reduce }],
        })
        .unwrap()
    }

    fn lp_with(completion: Vec<f64>) -> LpSolution {
        LpSolution {
            map_completion: vec![0.0; completion.len()],
            completion,
            objective: 0.0,
            generated_sets: vec![],
            iterations: 1,
        }
    }

    fn stats(jobs: &[(f64, f64)]) -> DerivedStats {
        DerivedStats {
            mu: 1.0,
            jobs: jobs
                .iter()
                .map(|&(p, rate)| crate::model::JobStats {
                    parallelism: 1,
                    max_rate: rate,
                    map_total: p,
                    reduce_total: 0.0,
                    total: p,
                })
                .collect(),
            skewness: 1.0,
        }
    }

    #[test]
    fn order_examples() {
        assert_eq!(job_order(&lp_with(vec![5.0, 4.0]), &stats(&[(10.0, 2.0), (6.0, 2.0)])), vec![1, 2]);
        assert_eq!(job_order(&lp_with(vec![5.0, 4.0]), &stats(&[(10.0, 2.0), (6.0, 3.0)])), vec![1, 2]);
        assert_eq!(job_order(&lp_with(vec![7.0]), &stats(&[(1.0, 1.0)])), vec![1]);
        assert_eq!(job_order(&lp_with(vec![5.0, 1.0]), &stats(&[(1.0, 1.0), (1.0, 1.0)])), vec![2, 1]);
    }

    #[test]
    fn single_machine_trace() {
        let w = one_job(vec![1.0], vec![2.0], vec![3.0], 0.0);
        let s = schedule_dmrs(&w, &[1]);
        let p = &s.placements;
        assert_eq!((p[0].machine, p[0].start, p[0].end), (0, 0.0, 2.0));
        assert_eq!((p[1].machine, p[1].start, p[1].end), (0, 2.0, 5.0));
        assert_eq!(s.job_completion, vec![5.0]);
        assert_eq!(s.map_completion, vec![2.0]);
    }

    #[test]
    fn ties_go_to_the_fastest_machine() {
        let w = one_job(vec![2.0, 1.0], vec![4.0, 4.0], vec![2.0], 0.0);
        let s = schedule_dmrs(&w, &[1]);
        let p = &s.placements;
        assert_eq!((p[0].machine, p[0].end), (0, 2.0));
        // map #2 ends at 4 on either machine
        assert_eq!((p[1].machine, p[1].end), (0, 4.0));
        assert_eq!((p[2].machine, p[2].start, p[2].end), (0, 4.0, 5.0));
        assert_eq!(s.job_completion, vec![5.0]);

        let st = derive_stats(&w);
        assert_eq!(completion_bound(&w, &st, &[1], 1), 16.0 / 3.0);
    }

    #[test]
    fn release_shifts_start() {
        let w = one_job(vec![1.0], vec![1.0], vec![], 10.0);
        let s = schedule_dmrs(&w, &[1]);
        assert_eq!((s.placements[0].start, s.placements[0].end), (10.0, 11.0));
        assert_eq!(s.job_completion, vec![11.0]);
    }

    #[test]
    fn single_machine_bound_has_no_skew_term() {
        let w = one_job(vec![2.0], vec![4.0, 2.0], vec![6.0], 3.0);
        let st = derive_stats(&w);
        assert_eq!(completion_bound(&w, &st, &[1], 1), 3.0 + 12.0 / 2.0);
    }

    #[test]
    fn ratio_formula() {
        assert!((theoretical_ratio(2, 5.0 / 3.0, true) - 3.2).abs() < 1e-12);
        assert_eq!(theoretical_ratio(1, 7.0, true), 2.0);
        assert_eq!(theoretical_ratio(12, 1.0, false), 25.0);
        assert_eq!(theoretical_ratio(12, 1.0, true), 24.0);
    }

    #[test]
    fn plan_end_to_end() {
        let w = one_job(vec![1.0], vec![2.0], vec![3.0], 0.0);
        let plan = plan_dmrs(&w).unwrap();
        assert_eq!(plan.order, vec![1]);
        assert_eq!(plan.schedule.twct(&w), 5.0);
        assert!((plan.lp.objective - 5.0).abs() < 1e-12);
    }
}
