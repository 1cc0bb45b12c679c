use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram};
use crate::sym::ChannelGraph;

/// Minimum mutual information coupling of a law with itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingResult {
    /// `min I(U;U')` in bits.
    pub value: f64,
    /// Optimal joint law, `coupling[u][u']`.
    pub coupling: Vec<Vec<f64>>,
    /// Largest marginal violation of the returned coupling.
    pub marginal_error: f64,
}

/// `min I(U;U')` over joint laws with both marginals `q_u` that put mass
/// only on pairs connected in `graph` (self-pairs always allowed).
///
/// Since both marginals are fixed, `I(U;U') = D(P || q_u x q_u)`, and the
/// minimizer is the I-projection of `q_u x q_u` onto the admissible
/// couplings. Cells that no admissible coupling can charge are removed by
/// linear programming first, after which iterative proportional fitting
/// converges geometrically.
pub fn coupling_min_mi(q_u: &[f64], graph: &ChannelGraph) -> Result<CouplingResult> {
    let k = q_u.len();
    if graph.n != k {
        return Err(Error::DimensionMismatch(format!(
            "graph has {} vertices, law has {k} entries",
            graph.n
        )));
    }
    let mut allowed: Vec<(usize, usize)> = (0..k)
        .flat_map(|a| (0..k).map(move |b| (a, b)))
        .filter(|&(a, b)| (a == b || graph.adjacency[a][b]) && q_u[a] > 0.0 && q_u[b] > 0.0)
        .collect();
    let support = q_u.iter().filter(|&&v| v > 0.0).count();
    if allowed.len() == support * support {
        let coupling = (0..k)
            .map(|a| (0..k).map(|b| q_u[a] * q_u[b]).collect())
            .collect();
        return Ok(CouplingResult {
            value: 0.0,
            coupling,
            marginal_error: 0.0,
        });
    }

    // drop cells whose maximal feasible mass is zero
    let marginal_lp = |cells: &[(usize, usize)]| {
        let mut lp = LinearProgram::new(cells.len());
        for u in 0..k {
            if q_u[u] <= 0.0 {
                continue;
            }
            let row: Vec<(usize, f64)> = cells
                .iter()
                .enumerate()
                .filter(|(_, c)| c.0 == u)
                .map(|(v, _)| (v, 1.0))
                .collect();
            lp.add(row, Cmp::Eq, q_u[u]);
            let col: Vec<(usize, f64)> = cells
                .iter()
                .enumerate()
                .filter(|(_, c)| c.1 == u)
                .map(|(v, _)| (v, 1.0))
                .collect();
            lp.add(col, Cmp::Eq, q_u[u]);
        }
        lp
    };
    let mut keep = vec![false; allowed.len()];
    for c in 0..allowed.len() {
        if keep[c] {
            continue;
        }
        let mut lp = marginal_lp(&allowed);
        lp.set_objective(c, -1.0);
        let sol = lp.solve()?;
        for (v, &m) in sol.x.iter().enumerate() {
            if m > 1e-12 {
                keep[v] = true;
            }
        }
    }
    allowed = allowed
        .into_iter()
        .zip(&keep)
        .filter(|(_, &kp)| kp)
        .map(|(c, _)| c)
        .collect();

    let mut p = vec![vec![0.0; k]; k];
    for &(a, b) in &allowed {
        p[a][b] = q_u[a] * q_u[b];
    }
    let mut err = f64::INFINITY;
    for _ in 0..100_000 {
        for a in 0..k {
            let s: f64 = p[a].iter().sum();
            if s > 0.0 {
                p[a].iter_mut().for_each(|v| *v *= q_u[a] / s);
            }
        }
        for b in 0..k {
            let s: f64 = (0..k).map(|a| p[a][b]).sum();
            if s > 0.0 {
                (0..k).for_each(|a| p[a][b] *= q_u[b] / s);
            }
        }
        err = (0..k)
            .map(|a| (p[a].iter().sum::<f64>() - q_u[a]).abs())
            .fold(0.0, f64::max);
        if err < 1e-14 {
            break;
        }
    }
    let mut value = 0.0;
    for a in 0..k {
        for b in 0..k {
            if p[a][b] > 0.0 {
                value += p[a][b] * (p[a][b] / (q_u[a] * q_u[b])).log2();
            }
        }
    }
    Ok(CouplingResult {
        value: value.max(0.0),
        coupling: p,
        marginal_error: err,
    })
}
