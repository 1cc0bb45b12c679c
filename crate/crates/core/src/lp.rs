//! Dense two-phase simplex for the small linear programs used throughout the
//! crate. All variables are nonnegative; the objective is minimized.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const FEAS_EPS: f64 = 1e-9;
/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_LIMIT: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    n_vars: usize,
    objective: Vec<f64>,
    rows: Vec<(Vec<(usize, f64)>, Cmp, f64)>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            objective: vec![0.0; n_vars],
            rows: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn set_objective(&mut self, var: usize, coef: f64) {
        self.objective[var] = coef;
    }

    /// Adds `sum coef * x[var] (cmp) rhs` from sparse terms.
    pub fn add(&mut self, terms: Vec<(usize, f64)>, cmp: Cmp, rhs: f64) {
        debug_assert!(terms.iter().all(|&(v, _)| v < self.n_vars));
        self.rows.push((terms, cmp, rhs));
    }

    pub fn solve(&self) -> Result<LpSolution> {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    /// `m` constraint rows followed by the phase-2 and phase-1 cost rows.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    m: usize,
    n_total: usize,
    n_struct: usize,
    artificial_start: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let n = lp.n_vars;
        let n_slack = lp.rows.iter().filter(|r| r.1 != Cmp::Eq).count();
        let n_art = lp
            .rows
            .iter()
            .filter(|r| {
                let flip = r.2 < 0.0;
                match r.1 {
                    Cmp::Le => flip,
                    Cmp::Ge => !flip,
                    Cmp::Eq => true,
                }
            })
            .count();
        let n_total = n + n_slack + n_art;
        let width = n_total + 1;
        let mut t = vec![vec![0.0; width]; m + 2];
        let mut basis = vec![0; m];
        let mut slack = n;
        let mut art = n + n_slack;
        for (i, (terms, cmp, rhs)) in lp.rows.iter().enumerate() {
            let sign = if *rhs < 0.0 { -1.0 } else { 1.0 };
            for &(v, c) in terms {
                t[i][v] += sign * c;
            }
            t[i][n_total] = sign * rhs;
            let cmp = match (cmp, sign < 0.0) {
                (Cmp::Le, true) => Cmp::Ge,
                (Cmp::Ge, true) => Cmp::Le,
                (c, _) => *c,
            };
            match cmp {
                Cmp::Le => {
                    t[i][slack] = 1.0;
                    basis[i] = slack;
                    slack += 1;
                }
                Cmp::Ge => {
                    t[i][slack] = -1.0;
                    slack += 1;
                    t[i][art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
                Cmp::Eq => {
                    t[i][art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
            }
        }
        for (v, &c) in lp.objective.iter().enumerate() {
            t[m][v] = c;
        }
        let artificial_start = n + n_slack;
        // phase-1 cost: sum of artificials, expressed in nonbasic terms
        for i in 0..m {
            if basis[i] >= artificial_start {
                for k in 0..width {
                    let v = t[i][k];
                    t[m + 1][k] -= v;
                }
            }
        }
        for k in artificial_start..n_total {
            t[m + 1][k] = 0.0;
        }
        Self {
            t,
            basis,
            m,
            n_total,
            n_struct: n,
            artificial_start,
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let width = self.n_total + 1;
        let p = self.t[r][c];
        for k in 0..width {
            self.t[r][k] /= p;
        }
        let pivot_row = self.t[r].clone();
        for i in 0..self.m + 2 {
            if i == r {
                continue;
            }
            let f = self.t[i][c];
            if f.abs() < 1e-300 {
                continue;
            }
            let row = &mut self.t[i];
            for k in 0..width {
                row[k] -= f * pivot_row[k];
            }
            row[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations on cost row `cost`, with columns at or beyond
    /// `col_limit` barred from entering.
    fn optimize(&mut self, cost: usize, col_limit: usize) -> Result<()> {
        let rhs = self.n_total;
        let mut degenerate = 0usize;
        let max_iter = 50_000 + 100 * (self.m + self.n_total);
        for _ in 0..max_iter {
            let bland = degenerate > DEGENERATE_LIMIT;
            let mut enter = None;
            let mut best = -PIVOT_EPS * 10.0;
            for c in 0..col_limit {
                let rc = self.t[cost][c];
                if rc < best {
                    enter = Some(c);
                    if bland {
                        break;
                    }
                    best = rc;
                }
            }
            let Some(c) = enter else {
                return Ok(());
            };
            let mut leave = None;
            let mut ratio = f64::INFINITY;
            for i in 0..self.m {
                let a = self.t[i][c];
                if a > PIVOT_EPS {
                    let r = self.t[i][rhs] / a;
                    let better = r < ratio - 1e-12
                        || (r <= ratio + 1e-12
                            && leave.is_some_and(|l: usize| self.basis[i] < self.basis[l]));
                    if better {
                        ratio = r;
                        leave = Some(i);
                    }
                }
            }
            let Some(r) = leave else {
                return Err(Error::Lp("unbounded objective".into()));
            };
            if ratio.abs() < 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c);
        }
        Err(Error::Lp("iteration limit reached".into()))
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpSolution> {
        let m = self.m;
        let rhs = self.n_total;
        if self.artificial_start < self.n_total {
            self.optimize(m + 1, self.n_total)?;
            if -self.t[m + 1][rhs] > FEAS_EPS * (1.0 + m as f64) {
                return Err(Error::Lp(format!(
                    "infeasible (phase-1 residual {:.3e})",
                    -self.t[m + 1][rhs]
                )));
            }
            for i in 0..m {
                if self.basis[i] >= self.artificial_start {
                    let col = (0..self.artificial_start)
                        .filter(|&c| self.t[i][c].abs() > 1e-9)
                        .max_by(|&a, &b| self.t[i][a].abs().total_cmp(&self.t[i][b].abs()));
                    if let Some(c) = col {
                        self.pivot(i, c);
                    }
                }
            }
        }
        self.optimize(m, self.artificial_start)?;
        let mut x = vec![0.0; self.n_struct];
        for i in 0..m {
            if self.basis[i] < self.n_struct {
                x[self.basis[i]] = self.t[i][rhs].max(0.0);
            }
        }
        let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpSolution { x, value })
    }
}
