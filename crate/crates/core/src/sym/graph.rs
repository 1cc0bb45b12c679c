use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::AVChannel;
use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeResult {
    /// `min_{Q1,Q2} sum_y |sum_j q(y|i1,j)Q1(j) - sum_j q(y|i2,j)Q2(j)|`.
    pub distance: f64,
    pub connected: bool,
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
}

/// Total-variation distance between the convex hulls of the output laws of
/// two inputs.
pub fn edge_test(avc: &AVChannel, i1: usize, i2: usize, tol: f64) -> Result<EdgeResult> {
    for i in [i1, i2] {
        if i >= avc.n_in() {
            return Err(Error::IndexError(format!(
                "input {i} out of range (n_in = {})",
                avc.n_in()
            )));
        }
    }
    let (nj, ny) = (avc.nj(), avc.ny());
    if i1 == i2 {
        let mut q = vec![0.0; nj];
        q[0] = 1.0;
        return Ok(EdgeResult {
            distance: 0.0,
            connected: true,
            q1: q.clone(),
            q2: q,
        });
    }
    // variables: Q1 (nj), Q2 (nj), e (ny)
    let mut lp = LinearProgram::new(2 * nj + ny);
    for y in 0..ny {
        lp.set_objective(2 * nj + y, 1.0);
    }
    lp.add((0..nj).map(|j| (j, 1.0)).collect(), Cmp::Eq, 1.0);
    lp.add((0..nj).map(|j| (nj + j, 1.0)).collect(), Cmp::Eq, 1.0);
    for y in 0..ny {
        let mut diff: Vec<(usize, f64)> = Vec::with_capacity(2 * nj + 1);
        for j in 0..nj {
            diff.push((j, avc.q(i1, j, y)));
            diff.push((nj + j, -avc.q(i2, j, y)));
        }
        let mut plus = diff.clone();
        plus.push((2 * nj + y, 1.0));
        lp.add(plus, Cmp::Ge, 0.0);
        let mut minus: Vec<(usize, f64)> = diff.into_iter().map(|(v, c)| (v, -c)).collect();
        minus.push((2 * nj + y, 1.0));
        lp.add(minus, Cmp::Ge, 0.0);
    }
    let sol = lp.solve()?;
    let q1 = sol.x[..nj].to_vec();
    let q2 = sol.x[nj..2 * nj].to_vec();
    let mut distance = 0.0;
    for y in 0..ny {
        let a: f64 = (0..nj).map(|j| avc.q(i1, j, y) * q1[j]).sum();
        let b: f64 = (0..nj).map(|j| avc.q(i2, j, y) * q2[j]).sum();
        distance += (a - b).abs();
    }
    Ok(EdgeResult {
        distance,
        connected: distance <= tol,
        q1,
        q2,
    })
}

/// Connectivity graph of an AVC's inputs. Every vertex is adjacent to itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelGraph {
    pub n: usize,
    pub dist: Vec<Vec<f64>>,
    pub adjacency: Vec<Vec<bool>>,
    pub tol: f64,
}

impl ChannelGraph {
    /// Graph with the given adjacency and zero/one distances.
    pub fn from_adjacency(adjacency: Vec<Vec<bool>>) -> Self {
        let n = adjacency.len();
        let mut adjacency = adjacency;
        for (i, row) in adjacency.iter_mut().enumerate() {
            row[i] = true;
        }
        let dist = adjacency
            .iter()
            .map(|r| r.iter().map(|&a| if a { 0.0 } else { 2.0 }).collect())
            .collect();
        Self {
            n,
            dist,
            adjacency,
            tol: 0.0,
        }
    }

    pub fn complete(n: usize) -> Self {
        Self::from_adjacency(vec![vec![true; n]; n])
    }

    pub fn edgeless(n: usize) -> Self {
        Self::from_adjacency(vec![vec![false; n]; n])
    }

    pub fn is_complete(&self) -> bool {
        self.adjacency.iter().all(|r| r.iter().all(|&a| a))
    }

    /// Unordered pairs of distinct vertices with no edge.
    pub fn isolated_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if !self.adjacency[a][b] {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Maximal vertex sets of size at least two with no edge between any two
    /// members.
    pub fn isolated_sets(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let p: Vec<usize> = (0..self.n).collect();
        self.bron_kerbosch(Vec::new(), p, Vec::new(), &mut out);
        out.retain(|s| s.len() >= 2);
        out.sort();
        out
    }

    fn bron_kerbosch(
        &self,
        r: Vec<usize>,
        mut p: Vec<usize>,
        mut x: Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if p.is_empty() && x.is_empty() {
            out.push(r);
            return;
        }
        let independent = |a: usize, b: usize| a != b && !self.adjacency[a][b];
        while let Some(v) = p.pop() {
            let mut r2 = r.clone();
            r2.push(v);
            r2.sort_unstable();
            let p2 = p.iter().copied().filter(|&w| independent(v, w)).collect();
            let x2 = x.iter().copied().filter(|&w| independent(v, w)).collect();
            self.bron_kerbosch(r2, p2, x2, out);
            x.push(v);
        }
    }
}

/// All-pairs [`edge_test`]. Undefined inputs carry no mass and are treated as
/// adjacent to every vertex.
pub fn build_graph(avc: &AVChannel, tol: f64) -> Result<ChannelGraph> {
    let n = avc.n_in();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let dists: Vec<f64> = pairs
        .par_iter()
        .map(|&(a, b)| {
            if !avc.is_defined(a) || !avc.is_defined(b) {
                Ok(0.0)
            } else {
                edge_test(avc, a, b, tol).map(|e| e.distance)
            }
        })
        .collect::<Result<_>>()?;
    let mut dist = vec![vec![0.0; n]; n];
    let mut adjacency = vec![vec![true; n]; n];
    for (&(a, b), &d) in pairs.iter().zip(&dists) {
        dist[a][b] = d;
        dist[b][a] = d;
        adjacency[a][b] = d <= tol;
        adjacency[b][a] = d <= tol;
    }
    Ok(ChannelGraph {
        n,
        dist,
        adjacency,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn avc(rows: &[Vec<Vec<f64>>]) -> AVChannel {
        AVChannel::from_nested(rows).unwrap()
    }

    #[test]
    fn disjoint_point_hulls() {
        let a = avc(&[
            vec![vec![1.0, 0.0], vec![1.0, 0.0]],
            vec![vec![0.0, 1.0], vec![0.0, 1.0]],
        ]);
        let e = edge_test(&a, 0, 1, 1e-7).unwrap();
        assert!((e.distance - 2.0).abs() < 1e-9);
        assert!(!e.connected);
    }

    #[test]
    fn identical_hulls() {
        let a = avc(&[
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        ]);
        let e = edge_test(&a, 0, 1, 1e-7).unwrap();
        assert!(e.distance < 1e-12 && e.connected);
        assert!(build_graph(&a, 1e-7).unwrap().is_complete());
    }

    #[test]
    fn binary_example_hulls_are_separated() {
        let a = avc(&[
            vec![vec![1.0, 0.0], vec![0.8, 0.2]],
            vec![vec![0.2, 0.8], vec![0.0, 1.0]],
        ]);
        let e = edge_test(&a, 0, 1, 1e-7).unwrap();
        // closest points (0.8,0.2) and (0.2,0.8)
        assert!((e.distance - 1.2).abs() < 1e-9, "{}", e.distance);
        let mut grid_min = f64::INFINITY;
        for k1 in 0..=200 {
            for k2 in 0..=200 {
                let (a1, a2) = (k1 as f64 / 200.0, k2 as f64 / 200.0);
                let p = 1.0 - 0.2 * (1.0 - a1);
                let q = 0.2 * a2;
                grid_min = grid_min.min(2.0 * (p - q).abs());
            }
        }
        assert!((grid_min - e.distance).abs() < 1e-9);
        let g = build_graph(&a, 1e-7).unwrap();
        assert!(!g.is_complete());
        assert_eq!(g.isolated_pairs(), vec![(0, 1)]);
    }

    #[test]
    fn single_input_is_complete() {
        let a = avc(&[vec![vec![0.5, 0.5]]]);
        let g = build_graph(&a, 1e-7).unwrap();
        assert!(g.is_complete());
        assert!(g.adjacency[0][0]);
    }

    #[test]
    fn index_error() {
        let a = avc(&[vec![vec![0.5, 0.5]]]);
        assert!(matches!(
            edge_test(&a, 0, 3, 1e-7),
            Err(Error::IndexError(_))
        ));
    }

    #[test]
    fn isolated_sets_of_path_graph() {
        // 0-1-2 path: independent sets {0,2}
        let g = ChannelGraph::from_adjacency(vec![
            vec![true, true, false],
            vec![true, true, true],
            vec![false, true, true],
        ]);
        assert_eq!(g.isolated_sets(), vec![vec![0, 2]]);
        assert_eq!(
            ChannelGraph::edgeless(3).isolated_sets(),
            vec![vec![0, 1, 2]]
        );
    }
}
