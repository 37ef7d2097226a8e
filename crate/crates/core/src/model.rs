//! System model: machines with speeds, jobs made of map and reduce tasks, and
//! the per-job quantities derived from them.
//!
//! A task of size `p` running on machine `l` takes `p / v_l` seconds. Machines
//! are kept sorted fastest first and each job's task lists largest first, so
//! index 0 is always "the fastest machine" / "the largest task".

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Job identifier. Valid workloads use ids `1..=N`, and job `id` lives at
/// position `id - 1` of [`Workload::jobs`].
pub type JobId = usize;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("cluster has no machines")]
    NoMachines,
    #[error("workload has no jobs")]
    NoJobs,
    #[error("machine speed {0} is not a positive finite number")]
    NonPositiveSpeed(f64),
    #[error("job {job}: task size {size} is not a positive finite number")]
    NonPositiveTaskSize { job: JobId, size: f64 },
    #[error("job {0} has neither map nor reduce tasks")]
    EmptyJob(JobId),
    #[error("job id {0} appears more than once")]
    DuplicateJobId(JobId),
    #[error("job ids must be exactly 1..={n}, found {id}")]
    JobIdOutOfRange { id: JobId, n: usize },
    #[error("job {job}: release time {release} is negative or not finite")]
    NegativeRelease { job: JobId, release: f64 },
    #[error("job {job}: weight {weight} is negative or not finite")]
    NegativeWeight { job: JobId, weight: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Map,
    Reduce,
}

/// One task of one job. `index` is 0-based into the job's (descending) list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TaskRef {
    pub job: JobId,
    pub phase: Phase,
    pub index: usize,
}

impl TaskRef {
    pub fn map(job: JobId, index: usize) -> Self {
        TaskRef { job, phase: Phase::Map, index }
    }

    pub fn reduce(job: JobId, index: usize) -> Self {
        TaskRef { job, phase: Phase::Reduce, index }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    speeds: Vec<f64>,
}

impl Cluster {
    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }

    pub fn machine_count(&self) -> usize {
        self.speeds.len()
    }

    /// Total processing rate of all machines.
    pub fn total_speed(&self) -> f64 {
        self.speeds.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub id: JobId,
    pub weight: f64,
    pub release: f64,
    pub map_sizes: Vec<f64>,
    pub reduce_sizes: Vec<f64>,
}

impl Job {
    pub fn task_count(&self) -> usize {
        self.map_sizes.len() + self.reduce_sizes.len()
    }

    pub fn map_total(&self) -> f64 {
        self.map_sizes.iter().sum()
    }

    pub fn reduce_total(&self) -> f64 {
        self.reduce_sizes.iter().sum()
    }

    pub fn largest_map(&self) -> f64 {
        self.map_sizes.first().copied().unwrap_or(0.0)
    }

    pub fn largest_reduce(&self) -> f64 {
        self.reduce_sizes.first().copied().unwrap_or(0.0)
    }

    pub fn sizes(&self, phase: Phase) -> &[f64] {
        match phase {
            Phase::Map => &self.map_sizes,
            Phase::Reduce => &self.reduce_sizes,
        }
    }

    /// Map tasks largest first, then reduce tasks largest first.
    pub fn tasks(&self) -> impl Iterator<Item = TaskRef> + '_ {
        let maps = (0..self.map_sizes.len()).map(|t| TaskRef::map(self.id, t));
        let reduces = (0..self.reduce_sizes.len()).map(|t| TaskRef::reduce(self.id, t));
        maps.chain(reduces)
    }
}

/// A validated, canonical workload.
#[derive(Debug, Clone, PartialEq)]
pub struct Workload {
    cluster: Cluster,
    jobs: Vec<Job>,
}

impl Workload {
    pub fn cluster(&self) -> &Cluster {
        &self.cluster
    }

    pub fn speeds(&self) -> &[f64] {
        &self.cluster.speeds
    }

    pub fn machine_count(&self) -> usize {
        self.cluster.machine_count()
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, id: JobId) -> &Job {
        &self.jobs[id - 1]
    }

    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    pub fn task_count(&self) -> usize {
        self.jobs.iter().map(Job::task_count).sum()
    }

    pub fn task_size(&self, task: TaskRef) -> f64 {
        self.job(task.job).sizes(task.phase)[task.index]
    }

    /// Every task in job-id order, maps before reduces.
    pub fn tasks(&self) -> impl Iterator<Item = TaskRef> + '_ {
        self.jobs.iter().flat_map(Job::tasks)
    }

    pub fn all_releases_zero(&self) -> bool {
        self.jobs.iter().all(|j| j.release == 0.0)
    }

    /// Same jobs on a different set of machines. Used by the baselines to build
    /// planning instances.
    pub(crate) fn with_speeds(&self, speeds: Vec<f64>) -> Workload {
        let mut speeds = speeds;
        speeds.sort_by(|a, b| b.total_cmp(a));
        Workload { cluster: Cluster { speeds }, jobs: self.jobs.clone() }
    }

    /// Same cluster and jobs with every reduce list dropped. The result may
    /// contain reduce-only jobs that became empty; only planning code uses it.
    pub(crate) fn without_reduces(&self) -> Workload {
        let jobs = self
            .jobs
            .iter()
            .map(|j| Job { reduce_sizes: Vec::new(), ..j.clone() })
            .collect();
        Workload { cluster: self.cluster.clone(), jobs }
    }

    pub fn to_raw(&self) -> RawWorkload {
        RawWorkload {
            machines: self.cluster.speeds.clone(),
            jobs: self
                .jobs
                .iter()
                .map(|j| RawJob {
                    id: j.id,
                    weight: j.weight,
                    release: j.release,
                    map: j.map_sizes.clone(),
                    reduce: j.reduce_sizes.clone(),
                })
                .collect(),
        }
    }
}

/// Wire shape of a workload file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawWorkload {
    pub machines: Vec<f64>,
    pub jobs: Vec<RawJob>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawJob {
    pub id: JobId,
    pub weight: f64,
    #[serde(default)]
    pub release: f64,
    #[serde(default)]
    pub map: Vec<f64>,
    #[serde(default)]
    pub reduce: Vec<f64>,
}

fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

fn non_negative(x: f64) -> bool {
    x.is_finite() && x >= 0.0
}

fn sort_descending(v: &mut [f64]) {
    v.sort_by(|a, b| b.total_cmp(a));
}

/// Checks a raw record and returns the canonical workload: speeds and task
/// lists sorted descending, jobs ordered by id.
pub fn validate_workload(raw: RawWorkload) -> Result<Workload, ModelError> {
    if raw.machines.is_empty() {
        return Err(ModelError::NoMachines);
    }
    if let Some(&bad) = raw.machines.iter().find(|v| !positive(**v)) {
        return Err(ModelError::NonPositiveSpeed(bad));
    }
    if raw.jobs.is_empty() {
        return Err(ModelError::NoJobs);
    }

    let n = raw.jobs.len();
    let mut slots: Vec<Option<Job>> = vec![None; n];
    for rj in raw.jobs {
        if rj.id == 0 || rj.id > n {
            return Err(ModelError::JobIdOutOfRange { id: rj.id, n });
        }
        if slots[rj.id - 1].is_some() {
            return Err(ModelError::DuplicateJobId(rj.id));
        }
        if !non_negative(rj.weight) {
            return Err(ModelError::NegativeWeight { job: rj.id, weight: rj.weight });
        }
        if !non_negative(rj.release) {
            return Err(ModelError::NegativeRelease { job: rj.id, release: rj.release });
        }
        if rj.map.is_empty() && rj.reduce.is_empty() {
            return Err(ModelError::EmptyJob(rj.id));
        }
        if let Some(&size) = rj.map.iter().chain(&rj.reduce).find(|s| !positive(**s)) {
            return Err(ModelError::NonPositiveTaskSize { job: rj.id, size });
        }
        let mut map_sizes = rj.map;
        let mut reduce_sizes = rj.reduce;
        sort_descending(&mut map_sizes);
        sort_descending(&mut reduce_sizes);
        slots[rj.id - 1] = Some(Job {
            id: rj.id,
            weight: rj.weight,
            release: rj.release,
            map_sizes,
            reduce_sizes,
        });
    }

    let mut speeds = raw.machines;
    sort_descending(&mut speeds);
    // n distinct ids in 1..=n fill every slot
    let jobs = slots.into_iter().map(|j| j.expect("ids form a permutation")).collect();
    Ok(Workload { cluster: Cluster { speeds }, jobs })
}

/// Per-job derived quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct JobStats {
    /// Maximum number of machines the job can use at once.
    pub parallelism: usize,
    /// Sum of the `parallelism` fastest speeds.
    pub max_rate: f64,
    pub map_total: f64,
    pub reduce_total: f64,
    pub total: f64,
}

/// Quantities derived once from a workload and shared by the LP, the
/// scheduler and the bound checks.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedStats {
    /// Total cluster rate.
    pub mu: f64,
    pub jobs: Vec<JobStats>,
    /// Task-skewness product, see [`task_skewness`].
    pub skewness: f64,
}

impl DerivedStats {
    pub fn job(&self, id: JobId) -> &JobStats {
        &self.jobs[id - 1]
    }

    /// `p_j / mu_j`, read as 0 for a job with no work.
    pub fn min_span(&self, id: JobId) -> f64 {
        let s = self.job(id);
        ratio(s.total, s.max_rate)
    }
}

/// `num / den` with `0 / 0 = 0`.
pub(crate) fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn derive_stats(w: &Workload) -> DerivedStats {
    let speeds = w.speeds();
    let mu = w.cluster().total_speed();
    let jobs = w
        .jobs()
        .iter()
        .map(|j| {
            let parallelism = j.task_count().min(speeds.len());
            let map_total = j.map_total();
            let reduce_total = j.reduce_total();
            JobStats {
                parallelism,
                max_rate: speeds[..parallelism].iter().sum(),
                map_total,
                reduce_total,
                total: map_total + reduce_total,
            }
        })
        .collect();
    DerivedStats { mu, jobs, skewness: task_skewness(w) }
}

/// `D = min_j p_j / (largest map of j + largest reduce of j)`.
///
/// Jobs without any work are skipped; an instance with no work at all gets 1.
pub fn task_skewness(w: &Workload) -> f64 {
    w.jobs()
        .iter()
        .filter(|j| j.task_count() > 0)
        .map(|j| (j.map_total() + j.reduce_total()) / (j.largest_map() + j.largest_reduce()))
        .reduce(f64::min)
        .unwrap_or(1.0)
}
