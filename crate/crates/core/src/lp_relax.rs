//! The LP relaxation of weighted completion time with map→reduce precedence.
//!
//! Variables per job `j`: its completion time `C_j` and its map-phase
//! completion `C^M_j`. Two constraint families:
//!
//! * per-job phase bounds: `C^M_j >= r_j + max(p^M_j/mu_j, p^M_{j,1}/v_1)` and
//!   `C_j >= C^M_j + max(p^R_j/mu_j, p^R_{j,1}/v_1)`;
//! * one parallel-machine cut per job subset `S`:
//!   `Σ_{j∈S} p_j C_j >= (Σ_{j∈S} p_j)² / 2mu + Σ_{j∈S} p_j² / 2mu_j`.
//!
//! The subset family is exponential, so [`solve_lp`] generates it lazily: the
//! separation oracle finds the most violated subset in `O(N log N)` by scanning
//! prefixes of the jobs sorted by `C_j - p_j/(2mu_j)`.

use thiserror::Error;

use crate::lp_core::{self, Constraint, LpError, LpProblem};
use crate::model::{ratio, DerivedStats, JobId, Workload};

/// A subset cut is added while its violation exceeds this.
pub const VIOLATION_TOL: f64 = 1e-7;
/// Constraint satisfaction tolerance for returned solutions.
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// Largest instance the exhaustive oracle accepts.
pub const BRUTE_FORCE_MAX_JOBS: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpRelaxError {
    #[error("violation of the empty subset is undefined")]
    EmptySubset,
    #[error("exhaustive oracle supports at most {BRUTE_FORCE_MAX_JOBS} jobs, got {0}")]
    TooManyJobs(usize),
    #[error("row generation added {0} cuts without converging")]
    IterationLimitExceeded(usize),
    #[error("relaxation reported infeasible (internal error: large completion times are always feasible)")]
    LpInfeasible,
    #[error(transparent)]
    Solver(#[from] LpError),
}

/// LP column of `C_j`.
pub fn completion_var(job: JobId) -> usize {
    2 * (job - 1)
}

/// LP column of `C^M_j`.
pub fn map_completion_var(job: JobId) -> usize {
    2 * (job - 1) + 1
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    /// `C_j`, indexed by `job - 1`.
    pub completion: Vec<f64>,
    /// `C^M_j`, indexed by `job - 1`.
    pub map_completion: Vec<f64>,
    /// `Σ w_j C_j`, a lower bound on any schedule's weighted completion time.
    pub objective: f64,
    /// Subsets whose cut was added, in generation order (ids ascending).
    pub generated_sets: Vec<Vec<JobId>>,
    /// Number of restricted LPs solved.
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViolationReport {
    /// Job ids, ascending.
    pub subset: Vec<JobId>,
    pub value: f64,
}

/// Earliest possible map-phase end, release included.
pub fn map_phase_lower_bound(w: &Workload, s: &DerivedStats, job: JobId) -> f64 {
    let j = w.job(job);
    let st = s.job(job);
    j.release + ratio(st.map_total, st.max_rate).max(j.largest_map() / w.speeds()[0])
}

/// Shortest possible reduce phase.
pub fn reduce_phase_lower_bound(w: &Workload, s: &DerivedStats, job: JobId) -> f64 {
    let j = w.job(job);
    let st = s.job(job);
    ratio(st.reduce_total, st.max_rate).max(j.largest_reduce() / w.speeds()[0])
}

/// The per-job phase bounds, two rows per job in job order.
pub fn base_constraints(w: &Workload, s: &DerivedStats) -> Vec<Constraint> {
    w.jobs()
        .iter()
        .flat_map(|j| {
            let cm = map_completion_var(j.id);
            let c = completion_var(j.id);
            [
                Constraint::new(vec![(cm, 1.0)], map_phase_lower_bound(w, s, j.id)),
                Constraint::new(vec![(c, 1.0), (cm, -1.0)], reduce_phase_lower_bound(w, s, j.id)),
            ]
        })
        .collect()
}

/// Right-hand side of the subset cut for `subset`.
fn cut_rhs(subset: &[JobId], s: &DerivedStats) -> f64 {
    let total: f64 = subset.iter().map(|&j| s.job(j).total).sum();
    let own: f64 = subset.iter().map(|&j| half_square_over_rate(s, j)).sum();
    total * total / (2.0 * s.mu) + own
}

fn half_square_over_rate(s: &DerivedStats, j: JobId) -> f64 {
    let st = s.job(j);
    ratio(st.total * st.total, 2.0 * st.max_rate)
}

pub fn subset_cut(subset: &[JobId], s: &DerivedStats) -> Constraint {
    let terms = subset.iter().map(|&j| (completion_var(j), s.job(j).total)).collect();
    Constraint::new(terms, cut_rhs(subset, s))
}

/// `V(S) = -Σ p_j C_j + (Σ p_j)²/2mu + Σ p_j²/2mu_j`; positive when the cut
/// for `S` is violated by `completion`.
pub fn violation(subset: &[JobId], completion: &[f64], s: &DerivedStats) -> Result<f64, LpRelaxError> {
    if subset.is_empty() {
        return Err(LpRelaxError::EmptySubset);
    }
    let weighted: f64 = subset.iter().map(|&j| s.job(j).total * completion[j - 1]).sum();
    Ok(cut_rhs(subset, s) - weighted)
}

/// Most violated subset cut, or `None` if no subset violates by more than `tol`.
///
/// Every maximizer of `V` is a prefix of the jobs sorted by
/// `d_j = C_j - p_j/(2mu_j)`: removing a member cannot help, which forces
/// `d_x <= P(S)/mu - p_x/2mu`, and adding an outsider cannot help, which forces
/// `d_x >= P(S)/mu + p_x/2mu`. The first argument needs a non-empty remainder,
/// so a singleton maximizer (only possible when no cut is violated) need not be
/// a prefix; singletons are scanned separately. The result is the exact
/// maximum over all non-empty subsets.
pub fn separation_oracle(completion: &[f64], s: &DerivedStats, tol: f64) -> Option<ViolationReport> {
    let n = completion.len();
    let key = |j: JobId| completion[j - 1] - ratio(s.job(j).total, 2.0 * s.job(j).max_rate);
    let mut order: Vec<JobId> = (1..=n).collect();
    order.sort_by(|&a, &b| key(a).total_cmp(&key(b)).then(a.cmp(&b)));

    let mut total = 0.0;
    let mut weighted = 0.0;
    let mut own = 0.0;
    let mut best: Option<(usize, f64)> = None;
    for (k, &j) in order.iter().enumerate() {
        let p = s.job(j).total;
        total += p;
        weighted += p * completion[j - 1];
        own += half_square_over_rate(s, j);
        let v = total * total / (2.0 * s.mu) + own - weighted;
        if best.is_none_or(|(_, bv)| v > bv) {
            best = Some((k + 1, v));
        }
    }

    let (len, value) = best?;
    let mut single: Option<(JobId, f64)> = None;
    for &j in &order {
        let p = s.job(j).total;
        let v = p * p / (2.0 * s.mu) + half_square_over_rate(s, j) - p * completion[j - 1];
        if single.is_none_or(|(_, bv)| v > bv) {
            single = Some((j, v));
        }
    }
    let (mut subset, value) = match single {
        Some((j, v)) if v > value => (vec![j], v),
        _ => (order[..len].to_vec(), value),
    };
    if value <= tol {
        return None;
    }
    subset.sort_unstable();
    // report the directly evaluated value rather than the running sums
    let value = violation(&subset, completion, s).unwrap_or(value);
    Some(ViolationReport { subset, value })
}

/// Exhaustive counterpart of [`separation_oracle`] over all `2^N - 1`
/// subsets. Ties go to the lexicographically smallest id list.
pub fn brute_force_oracle(
    completion: &[f64],
    s: &DerivedStats,
    tol: f64,
) -> Result<Option<ViolationReport>, LpRelaxError> {
    let n = completion.len();
    if n > BRUTE_FORCE_MAX_JOBS {
        return Err(LpRelaxError::TooManyJobs(n));
    }
    let mut best: Option<ViolationReport> = None;
    for mask in 1u32..(1u32 << n) {
        let subset: Vec<JobId> = (0..n).filter(|b| mask & (1 << b) != 0).map(|b| b + 1).collect();
        let v = violation(&subset, completion, s)?;
        let better = match &best {
            None => true,
            Some(b) => v > b.value || (v == b.value && subset < b.subset),
        };
        if better {
            best = Some(ViolationReport { subset, value: v });
        }
    }
    Ok(best.filter(|b| b.value > tol))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowGeneration {
    pub violation_tol: f64,
    /// Maximum number of cuts; `None` means `50·N`.
    pub max_cuts: Option<usize>,
}

impl Default for RowGeneration {
    fn default() -> Self {
        RowGeneration { violation_tol: VIOLATION_TOL, max_cuts: None }
    }
}

pub fn solve_lp(w: &Workload, s: &DerivedStats) -> Result<LpSolution, LpRelaxError> {
    solve_lp_with(w, s, RowGeneration::default())
}

/// Minimizes `Σ w_j C_j` by alternating restricted solves with oracle cuts.
pub fn solve_lp_with(w: &Workload, s: &DerivedStats, opts: RowGeneration) -> Result<LpSolution, LpRelaxError> {
    let n = w.job_count();
    let max_cuts = opts.max_cuts.unwrap_or(50 * n);

    let mut objective = vec![0.0; 2 * n];
    for j in w.jobs() {
        objective[completion_var(j.id)] = j.weight;
    }
    let mut lp = LpProblem::new(objective);
    base_constraints(w, s).into_iter().for_each(|c| lp.push(c));

    let mut generated_sets: Vec<Vec<JobId>> = Vec::new();
    let mut iterations = 0;
    let x = loop {
        iterations += 1;
        let vertex = lp_core::solve(&lp).map_err(|e| match e {
            LpError::Infeasible => LpRelaxError::LpInfeasible,
            other => LpRelaxError::Solver(other),
        })?;
        let completion: Vec<f64> = (1..=n).map(|j| vertex.x[completion_var(j)]).collect();
        let Some(report) = separation_oracle(&completion, s, opts.violation_tol) else {
            break vertex.x;
        };
        // A repeated subset means the remaining violation is rounding noise of
        // a cut the LP already enforces.
        if generated_sets.contains(&report.subset) {
            break vertex.x;
        }
        if generated_sets.len() >= max_cuts {
            return Err(LpRelaxError::IterationLimitExceeded(generated_sets.len()));
        }
        lp.push(subset_cut(&report.subset, s));
        generated_sets.push(report.subset);
    };

    let completion: Vec<f64> = (1..=n).map(|j| x[completion_var(j)]).collect();
    // C^M only appears in its own two rows; report it at its lower bound.
    let map_completion = (1..=n).map(|j| map_phase_lower_bound(w, s, j)).collect();
    let objective = w.jobs().iter().map(|j| j.weight * completion[j.id - 1]).sum();
    Ok(LpSolution { completion, map_completion, objective, generated_sets, iterations })
}

impl LpSolution {
    /// Largest violation of any base row or generated cut (≤ 0 when satisfied).
    pub fn max_constraint_violation(&self, w: &Workload, s: &DerivedStats) -> f64 {
        let mut x = vec![0.0; 2 * w.job_count()];
        for j in 1..=w.job_count() {
            x[completion_var(j)] = self.completion[j - 1];
            x[map_completion_var(j)] = self.map_completion[j - 1];
        }
        base_constraints(w, s)
            .iter()
            .chain(self.generated_sets.iter().map(|set| subset_cut(set, s)).collect::<Vec<_>>().iter())
            .map(|c| c.violation(&x))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}
