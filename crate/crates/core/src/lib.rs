//! Scheduling of MapReduce jobs on machines of different speeds to minimize
//! total weighted completion time.
//!
//! The [`dmrs`] scheduler orders jobs by an LP relaxation ([`lp_relax`]) and
//! list-schedules their map and reduce tasks on the machine that finishes each
//! task first. [`baselines`] holds the comparison policies, [`simulator`]
//! validates and executes schedules, and [`bench`] generates scenarios and
//! runs experiments.

pub mod baselines;
pub mod bench;
pub mod dmrs;
pub mod lp_core;
pub mod lp_relax;
pub mod model;
pub mod schedule;
pub mod simulator;
pub mod timeline;

pub use dmrs::{plan_dmrs, schedule_dmrs, DmrsPlan, ScheduleError};
pub use lp_relax::{solve_lp, LpSolution};
pub use model::{derive_stats, validate_workload, DerivedStats, JobId, Phase, RawWorkload, TaskRef, Workload};
pub use schedule::Schedule;
