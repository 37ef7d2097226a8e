//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use dmrs::model::{validate_workload, RawJob, RawWorkload, Workload};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in (0, hi].
pub fn size(rng: &mut impl Rng, hi: f64) -> f64 {
    hi * (1.0 - rng.gen::<f64>())
}

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_jobs: usize,
    pub max_machines: usize,
    pub max_maps: usize,
    pub max_reduces: usize,
    /// Releases are all zero when false, and zero with probability 1/2 per
    /// instance otherwise.
    pub releases: bool,
}

/// Random instance: speeds in (0, 4], sizes in (0, 10], weights in (0, 5],
/// releases (when drawn) in [0, 10].
pub fn instance(seed: u64, shape: Shape) -> Workload {
    let mut r = rng(seed);
    let n = r.gen_range(1..=shape.max_jobs);
    let m = r.gen_range(1..=shape.max_machines);
    let machines = (0..m).map(|_| size(&mut r, 4.0)).collect();
    let with_release = shape.releases && r.gen_bool(0.5);
    let jobs = (1..=n)
        .map(|id| {
            let maps = r.gen_range(0..=shape.max_maps);
            let reduces = r.gen_range(usize::from(maps == 0)..=shape.max_reduces.max(usize::from(maps == 0)));
            RawJob {
                id,
                weight: size(&mut r, 5.0),
                release: if with_release { r.gen_range(0.0..=10.0) } else { 0.0 },
                map: (0..maps).map(|_| size(&mut r, 10.0)).collect(),
                reduce: (0..reduces).map(|_| size(&mut r, 10.0)).collect(),
            }
        })
        .collect();
    validate_workload(RawWorkload { machines, jobs }).expect("generated instance is valid")
}

/// Random instance with at most `max_tasks` tasks in total.
pub fn tiny_instance(seed: u64, max_tasks: usize, max_machines: usize) -> Workload {
    let mut r = rng(seed);
    let m = r.gen_range(1..=max_machines);
    let machines = (0..m).map(|_| size(&mut r, 4.0)).collect();
    let total = r.gen_range(1..=max_tasks);
    let with_release = r.gen_bool(0.5);
    let mut jobs: Vec<RawJob> = Vec::new();
    let mut left = total;
    while left > 0 {
        let tasks = r.gen_range(1..=left.min(3));
        left -= tasks;
        let maps = r.gen_range(0..=tasks);
        jobs.push(RawJob {
            id: jobs.len() + 1,
            weight: size(&mut r, 5.0),
            release: if with_release { r.gen_range(0.0..=5.0) } else { 0.0 },
            map: (0..maps).map(|_| size(&mut r, 10.0)).collect(),
            reduce: (0..tasks - maps).map(|_| size(&mut r, 10.0)).collect(),
        });
    }
    validate_workload(RawWorkload { machines, jobs }).expect("generated instance is valid")
}
