//! Dense simplex for covering LPs:
//!
//! ```text
//! minimize    c·x
//! subject to  a_k·x >= b_k   for every constraint k
//!             x >= 0
//! ```
//!
//! with `c >= 0`. Such problems have few variables and (under row generation)
//! many constraints, so the solver works on the dual
//!
//! ```text
//! maximize    b·y
//! subject to  Aᵀy <= c,  y >= 0
//! ```
//!
//! whose tableau has one row per primal variable. `y = 0` is dual feasible
//! because `c >= 0`, so no phase one is needed. Pivoting follows Bland's
//! least-index rule. The primal vertex is read off the final basis by solving
//! `Bᵀx = c_B` against the original (row-scaled) data rather than taken from
//! the tableau, which keeps the returned point clean after many pivots.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("constraints are infeasible")]
    Infeasible,
    /// `c >= 0` is a precondition; with a negative cost the problem may be
    /// unbounded and the dual start is not feasible.
    #[error("objective coefficient of x{var} is negative ({value}); problem may be unbounded")]
    NegativeCost { var: usize, value: f64 },
    #[error("constraint {constraint} references variable {var}, but there are only {num_vars}")]
    VariableOutOfRange { constraint: usize, var: usize, num_vars: usize },
    #[error("simplex exceeded {0} pivots")]
    PivotLimit(usize),
}

/// `Σ coeff·x[var] >= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(terms: Vec<(usize, f64)>, rhs: f64) -> Self {
        Constraint { terms, rhs }
    }

    pub fn lhs(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, a)| a * x[v]).sum()
    }

    /// `rhs - lhs`; positive means violated.
    pub fn violation(&self, x: &[f64]) -> f64 {
        self.rhs - self.lhs(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LpProblem {
    pub fn new(objective: Vec<f64>) -> Self {
        LpProblem { objective, constraints: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn push(&mut self, c: Constraint) {
        self.constraints.push(c);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

const PIVOT_EPS: f64 = 1e-11;

pub fn solve(problem: &LpProblem) -> Result<Vertex, LpError> {
    let n = problem.num_vars();
    if let Some((var, &value)) = problem.objective.iter().enumerate().find(|(_, c)| c.is_nan() || **c < 0.0) {
        return Err(LpError::NegativeCost { var, value });
    }

    // Dense, row-scaled copy. Scaling a primal row leaves x unchanged.
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(problem.constraints.len());
    let mut rhs: Vec<f64> = Vec::with_capacity(problem.constraints.len());
    for (k, con) in problem.constraints.iter().enumerate() {
        let mut row = vec![0.0; n];
        for &(var, a) in &con.terms {
            if var >= n {
                return Err(LpError::VariableOutOfRange { constraint: k, var, num_vars: n });
            }
            row[var] += a;
        }
        let scale = row.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        if scale == 0.0 {
            if con.rhs > 1e-9 {
                return Err(LpError::Infeasible);
            }
            continue;
        }
        row.iter_mut().for_each(|a| *a /= scale);
        rows.push(row);
        rhs.push(con.rhs / scale);
    }

    let k = rows.len();
    let cols = k + n;
    let bmax = rhs.iter().fold(0.0f64, |m, b| m.max(b.abs()));
    let rc_eps = 1e-11 * (1.0 + bmax);

    // Dual tableau: one row per primal variable.
    let mut tab = vec![vec![0.0; cols]; n];
    for (kk, row) in rows.iter().enumerate() {
        for i in 0..n {
            tab[i][kk] = row[i];
        }
    }
    for (i, t) in tab.iter_mut().enumerate() {
        t[k + i] = 1.0;
    }
    let mut beta: Vec<f64> = problem.objective.clone();
    let mut reduced: Vec<f64> = rhs.iter().copied().chain(std::iter::repeat_n(0.0, n)).collect();
    let mut basis: Vec<usize> = (k..cols).collect();

    let limit = 100 * cols + 1000;
    let mut pivots = 0;
    while let Some(enter) = (0..cols).find(|&j| reduced[j] > rc_eps) {

        let mut leave: Option<(usize, f64)> = None;
        for i in 0..n {
            let a = tab[i][enter];
            if a > PIVOT_EPS {
                let r = beta[i] / a;
                leave = match leave {
                    None => Some((i, r)),
                    Some((li, lr)) => {
                        let tie = (r - lr).abs() <= 1e-12 * (1.0 + lr.abs());
                        if (!tie && r < lr) || (tie && basis[i] < basis[li]) {
                            Some((i, r))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
        }
        // Dual unbounded along `enter`: the primal has no feasible point.
        let Some((row, _)) = leave else {
            return Err(LpError::Infeasible);
        };

        pivot(&mut tab, &mut beta, &mut reduced, row, enter);
        basis[row] = enter;
        pivots += 1;
        if pivots > limit {
            return Err(LpError::PivotLimit(limit));
        }
    }

    let x = primal_from_basis(&rows, &rhs, &basis, n, k).unwrap_or_else(|| {
        // Singular basis system: fall back to the tableau's simplex multipliers.
        (0..n).map(|i| (-reduced[k + i]).max(0.0)).collect()
    });
    let objective = problem.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(Vertex { x, objective, pivots })
}

fn pivot(tab: &mut [Vec<f64>], beta: &mut [f64], reduced: &mut [f64], row: usize, col: usize) {
    let p = tab[row][col];
    tab[row].iter_mut().for_each(|a| *a /= p);
    beta[row] /= p;
    let pivot_row = tab[row].clone();
    let pivot_beta = beta[row];
    for (i, r) in tab.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let f = r[col];
        if f != 0.0 {
            for (a, pa) in r.iter_mut().zip(&pivot_row) {
                *a -= f * pa;
            }
            r[col] = 0.0;
            beta[i] -= f * pivot_beta;
        }
    }
    let f = reduced[col];
    for (a, pa) in reduced.iter_mut().zip(&pivot_row) {
        *a -= f * pa;
    }
    reduced[col] = 0.0;
}

/// Solves `Bᵀx = c_B`: basic dual columns make their primal row tight, basic
/// slacks pin their primal variable to zero.
fn primal_from_basis(rows: &[Vec<f64>], rhs: &[f64], basis: &[usize], n: usize, k: usize) -> Option<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut v: Vec<f64> = Vec::with_capacity(n);
    for &b in basis {
        if b < k {
            m.push(rows[b].clone());
            v.push(rhs[b]);
        } else {
            let mut e = vec![0.0; n];
            e[b - k] = 1.0;
            m.push(e);
            v.push(0.0);
        }
    }
    let mut x = gauss_solve(m, v)?;
    for xi in &mut x {
        if *xi < 0.0 && *xi > -1e-9 {
            *xi = 0.0;
        }
    }
    Some(x)
}

/// Gaussian elimination with partial pivoting.
fn gauss_solve(mut m: Vec<Vec<f64>>, mut v: Vec<f64>) -> Option<Vec<f64>> {
    let n = v.len();
    for c in 0..n {
        let p = (c..n).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))?;
        if m[p][c].abs() < 1e-13 {
            return None;
        }
        m.swap(c, p);
        v.swap(c, p);
        let (top, rest) = m.split_at_mut(c + 1);
        let pivot_row = &top[c];
        for (r, row) in rest.iter_mut().enumerate() {
            let f = row[c] / pivot_row[c];
            if f != 0.0 {
                for (a, pa) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *a -= f * pa;
                }
                v[c + 1 + r] -= f * v[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for c in (0..n).rev() {
        let s: f64 = (c + 1..n).map(|j| m[c][j] * x[j]).sum();
        x[c] = (v[c] - s) / m[c][c];
    }
    Some(x)
}
