//! Planned or realized task placements and the per-job quantities read off
//! them.

use serde::{Deserialize, Serialize};

use crate::model::{JobId, Phase, TaskRef, Workload};

/// One task on one machine. `machine` and `task.index` are 0-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    pub task: TaskRef,
    pub machine: usize,
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub placements: Vec<Placement>,
    /// Indices into `placements`, one list per machine, in start order.
    pub per_machine: Vec<Vec<usize>>,
    /// Completion time of each job, indexed by `job - 1`.
    pub job_completion: Vec<f64>,
    /// Map-phase completion of each job (its release when it has no maps).
    pub map_completion: Vec<f64>,
    /// Job order the schedule was built from.
    pub order: Vec<JobId>,
}

impl Schedule {
    pub fn from_placements(w: &Workload, placements: Vec<Placement>, order: Vec<JobId>) -> Schedule {
        let mut per_machine = vec![Vec::new(); w.machine_count()];
        for (i, p) in placements.iter().enumerate() {
            if let Some(list) = per_machine.get_mut(p.machine) {
                list.push(i);
            }
        }
        for list in &mut per_machine {
            list.sort_by(|&a, &b| {
                let (pa, pb) = (&placements[a], &placements[b]);
                pa.start.total_cmp(&pb.start).then(pa.end.total_cmp(&pb.end)).then(a.cmp(&b))
            });
        }

        let mut job_completion: Vec<f64> = w.jobs().iter().map(|j| j.release).collect();
        let mut map_completion = job_completion.clone();
        for p in &placements {
            let Some(c) = job_completion.get_mut(p.task.job.wrapping_sub(1)) else {
                continue;
            };
            *c = c.max(p.end);
            if p.task.phase == Phase::Map {
                let m = &mut map_completion[p.task.job - 1];
                *m = m.max(p.end);
            }
        }

        Schedule { placements, per_machine, job_completion, map_completion, order }
    }

    /// Total weighted completion time.
    pub fn twct(&self, w: &Workload) -> f64 {
        w.jobs().iter().map(|j| j.weight * self.job_completion[j.id - 1]).sum()
    }

    /// Task sequence of every machine.
    pub fn machine_sequences(&self) -> Vec<Vec<TaskRef>> {
        self.per_machine
            .iter()
            .map(|list| list.iter().map(|&i| self.placements[i].task).collect())
            .collect()
    }

    pub fn placement_of(&self, task: TaskRef) -> Option<&Placement> {
        self.placements.iter().find(|p| p.task == task)
    }

    pub fn to_doc(&self, w: &Workload) -> ScheduleDoc {
        ScheduleDoc {
            order: self.order.clone(),
            placements: self.placements.iter().map(PlacementDoc::from).collect(),
            twct: self.twct(w),
        }
    }
}

/// JSON shape of a schedule. Task and machine numbers are 1-based here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleDoc {
    pub order: Vec<JobId>,
    pub placements: Vec<PlacementDoc>,
    pub twct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementDoc {
    pub job: JobId,
    pub phase: Phase,
    pub task: usize,
    pub machine: usize,
    pub start: f64,
    pub end: f64,
}

impl From<&Placement> for PlacementDoc {
    fn from(p: &Placement) -> Self {
        PlacementDoc {
            job: p.task.job,
            phase: p.task.phase,
            task: p.task.index + 1,
            machine: p.machine + 1,
            start: p.start,
            end: p.end,
        }
    }
}
