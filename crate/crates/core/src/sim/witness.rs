//! Exact search for a hidden sequence (jamming, or state and jamming) that
//! makes a set of type-level conditions hold.
//!
//! All conditions depend on the sequences only through their joint type, so
//! a witness is a table of counts: for every cell of positions sharing the
//! same known symbols, how many of them carry each hidden symbol `w`. The
//! conditions used by the decoders split as
//!
//! `value_c = offset_c + sum_g part_c(g) + leaf_c(profiles)`
//!
//! where `g` runs over groups of cells, every `part_c(g) >= 0` depends only
//! on the counts inside group `g`, and `leaf_c >= 0` depends only on small
//! per-group profiles (by default the totals `N_g(w)`). Groups are
//! enumerated independently, reduced to Pareto-minimal options per profile,
//! and then combined under the threshold.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};

/// Positions sharing one tuple of known symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Cell {
    pub group: usize,
    pub key: Vec<usize>,
    pub count: u32,
}

pub(crate) trait Problem {
    /// Size of the hidden alphabet.
    fn n_w(&self) -> usize;
    /// Number of conditions, each required to be `<= eta`.
    fn n_terms(&self) -> usize;
    /// Witness-independent part of every condition.
    fn offset(&self) -> Vec<f64>;
    /// Whether `w` keeps every condition finite on a cell.
    fn admissible(&self, cell: &Cell, w: usize) -> bool;
    /// Adds the group-separable parts of one group's assignment to `out`.
    fn group_terms(&self, cells: &[&Cell], counts: &[Vec<u32>], out: &mut [f64]);
    /// Whether any condition has a part coupling the groups.
    fn has_leaf_terms(&self) -> bool;
    /// Summary of one group's assignment that the coupling parts depend on;
    /// defaults to the hidden-symbol totals `N_g(w)`.
    fn profile(&self, _cells: &[&Cell], counts: &[Vec<u32>]) -> Vec<u32> {
        let mut p = vec![0u32; self.n_w()];
        for c in counts {
            for (a, b) in p.iter_mut().zip(c) {
                *a += b;
            }
        }
        p
    }
    /// Adds the coupling parts, given every group's profile, to `out`.
    fn leaf_terms(&self, groups: &[usize], profiles: &[&[u32]], out: &mut [f64]);
}

/// Counts per cell (in the caller's cell order) over the hidden alphabet.
pub(crate) type Witness = Vec<Vec<u32>>;

const SLACK: f64 = 1e-12;

struct GroupOption {
    profile: Vec<u32>,
    terms: Vec<f64>,
    counts: Vec<Vec<u32>>,
}

struct Budget {
    used: u64,
    limit: u64,
}

impl Budget {
    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::ExplosionGuard {
                required: self.used as f64,
                budget: self.limit as f64,
            });
        }
        Ok(())
    }
}

/// Finds a witness with every condition `<= eta`, or proves none exists.
pub(crate) fn search<P: Problem>(
    problem: &P,
    cells: &[Cell],
    eta: f64,
    budget: u64,
) -> Result<Option<Witness>> {
    let offset = problem.offset();
    let cap: Vec<f64> = offset.iter().map(|o| eta - o + SLACK).collect();
    if cap.iter().any(|&c| c < 0.0) {
        return Ok(None);
    }
    let mut budget = Budget {
        used: 0,
        limit: budget,
    };

    let mut group_ids: Vec<usize> = cells.iter().map(|c| c.group).collect();
    group_ids.sort_unstable();
    group_ids.dedup();
    let mut options: Vec<Vec<GroupOption>> = Vec::with_capacity(group_ids.len());
    for &g in &group_ids {
        let members: Vec<usize> = (0..cells.len()).filter(|&i| cells[i].group == g).collect();
        let opts = enumerate_group(problem, cells, &members, &cap, &mut budget)?;
        if opts.is_empty() {
            return Ok(None);
        }
        options.push(opts);
    }

    let mut order: Vec<usize> = (0..group_ids.len()).collect();
    order.sort_by_key(|&k| options[k].len());
    let mut chosen = vec![0usize; group_ids.len()];
    let mut sums = vec![vec![0.0; problem.n_terms()]; group_ids.len() + 1];
    let found = combine(
        problem,
        &group_ids,
        &options,
        &order,
        0,
        &cap,
        &mut chosen,
        &mut sums,
        &mut budget,
    )?;
    if !found {
        return Ok(None);
    }
    let mut witness = vec![Vec::new(); cells.len()];
    for (k, &g) in group_ids.iter().enumerate() {
        let members = (0..cells.len()).filter(|&i| cells[i].group == g);
        for (i, c) in members.zip(&options[k][chosen[k]].counts) {
            witness[i] = c.clone();
        }
    }
    Ok(Some(witness))
}

#[allow(clippy::too_many_arguments)]
fn combine<P: Problem>(
    problem: &P,
    group_ids: &[usize],
    options: &[Vec<GroupOption>],
    order: &[usize],
    depth: usize,
    cap: &[f64],
    chosen: &mut [usize],
    sums: &mut [Vec<f64>],
    budget: &mut Budget,
) -> Result<bool> {
    if depth == order.len() {
        if !problem.has_leaf_terms() {
            return Ok(true);
        }
        let mut total = sums[depth].clone();
        let profiles: Vec<&[u32]> = (0..group_ids.len())
            .map(|k| options[k][chosen[k]].profile.as_slice())
            .collect();
        problem.leaf_terms(group_ids, &profiles, &mut total);
        return Ok(total.iter().zip(cap).all(|(t, c)| t <= c));
    }
    let k = order[depth];
    for (o, opt) in options[k].iter().enumerate() {
        budget.tick()?;
        let (head, tail) = sums.split_at_mut(depth + 1);
        let next = &mut tail[0];
        let mut ok = true;
        for c in 0..cap.len() {
            next[c] = head[depth][c] + opt.terms[c];
            if next[c] > cap[c] {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        chosen[k] = o;
        if combine(
            problem,
            group_ids,
            options,
            order,
            depth + 1,
            cap,
            chosen,
            sums,
            budget,
        )? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn enumerate_group<P: Problem>(
    problem: &P,
    cells: &[Cell],
    members: &[usize],
    cap: &[f64],
    budget: &mut Budget,
) -> Result<Vec<GroupOption>> {
    let refs: Vec<&Cell> = members.iter().map(|&i| &cells[i]).collect();
    let allowed: Vec<Vec<usize>> = refs
        .iter()
        .map(|c| {
            (0..problem.n_w())
                .filter(|&w| problem.admissible(c, w))
                .collect()
        })
        .collect();
    if allowed.iter().any(|a| a.is_empty()) {
        return Ok(Vec::new());
    }
    let mut by_profile: BTreeMap<Vec<u32>, Vec<GroupOption>> = BTreeMap::new();
    let mut counts: Vec<Vec<u32>> = refs.iter().map(|_| vec![0; problem.n_w()]).collect();
    let keep_profile = problem.has_leaf_terms();
    walk_cells(
        problem,
        &refs,
        &allowed,
        0,
        &mut counts,
        cap,
        keep_profile,
        &mut by_profile,
        budget,
    )?;
    Ok(by_profile.into_values().flatten().collect())
}

#[allow(clippy::too_many_arguments)]
fn walk_cells<P: Problem>(
    problem: &P,
    cells: &[&Cell],
    allowed: &[Vec<usize>],
    idx: usize,
    counts: &mut Vec<Vec<u32>>,
    cap: &[f64],
    keep_profile: bool,
    out: &mut BTreeMap<Vec<u32>, Vec<GroupOption>>,
    budget: &mut Budget,
) -> Result<()> {
    if idx == cells.len() {
        budget.tick()?;
        let mut terms = vec![0.0; cap.len()];
        problem.group_terms(cells, counts, &mut terms);
        if terms.iter().zip(cap).any(|(t, c)| t > c) {
            return Ok(());
        }
        let profile = if keep_profile {
            problem.profile(cells, counts)
        } else {
            Vec::new()
        };
        let key = profile.clone();
        insert_pareto(
            out.entry(key).or_default(),
            GroupOption {
                profile,
                terms,
                counts: counts.clone(),
            },
        );
        return Ok(());
    }
    let total = cells[idx].count;
    let slots = &allowed[idx];
    let mut comp = vec![0u32; slots.len()];
    compositions(total, &mut comp, 0, &mut |comp| {
        for (&w, &v) in slots.iter().zip(comp.iter()) {
            counts[idx][w] = v;
        }
        let r = walk_cells(
            problem,
            cells,
            allowed,
            idx + 1,
            counts,
            cap,
            keep_profile,
            out,
            budget,
        );
        for &w in slots {
            counts[idx][w] = 0;
        }
        r
    })
}

fn compositions(
    left: u32,
    comp: &mut [u32],
    pos: usize,
    f: &mut dyn FnMut(&[u32]) -> Result<()>,
) -> Result<()> {
    if pos + 1 == comp.len() {
        comp[pos] = left;
        let r = f(comp);
        comp[pos] = 0;
        return r;
    }
    for v in (0..=left).rev() {
        comp[pos] = v;
        compositions(left - v, comp, pos + 1, f)?;
    }
    comp[pos] = 0;
    Ok(())
}

fn dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn insert_pareto(set: &mut Vec<GroupOption>, opt: GroupOption) {
    if set.iter().any(|o| dominates(&o.terms, &opt.terms)) {
        return;
    }
    set.retain(|o| !dominates(&opt.terms, &o.terms));
    set.push(opt);
}

/// Groups `(key, group)` rows into cells, preserving first-seen order.
pub(crate) fn cells_from_rows(
    rows: impl Iterator<Item = (usize, Vec<usize>)>,
) -> (Vec<Cell>, Vec<usize>) {
    let mut index: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    let mut cells: Vec<Cell> = Vec::new();
    let mut of_pos = Vec::new();
    for (group, key) in rows {
        let id = *index.entry((group, key.clone())).or_insert_with(|| {
            cells.push(Cell {
                group,
                key,
                count: 0,
            });
            cells.len() - 1
        });
        cells[id].count += 1;
        of_pos.push(id);
    }
    (cells, of_pos)
}

/// Expands a count witness into a per-position hidden sequence.
pub(crate) fn expand(witness: &Witness, of_pos: &[usize]) -> Vec<usize> {
    let mut left = witness.clone();
    of_pos
        .iter()
        .map(|&c| {
            let w = left[c]
                .iter()
                .position(|&v| v > 0)
                .expect("witness covers every cell");
            left[c][w] -= 1;
            w
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    // hidden bit per position, condition: |#ones - target| / n <= eta, split
    // into per-group absolute deviations so the engine has something to prune
    struct Ones {
        target: Vec<u32>,
        n: f64,
    }

    impl Problem for Ones {
        fn n_w(&self) -> usize {
            2
        }
        fn n_terms(&self) -> usize {
            1
        }
        fn offset(&self) -> Vec<f64> {
            vec![0.0]
        }
        fn admissible(&self, cell: &Cell, w: usize) -> bool {
            cell.key[0] == 0 || w == 1
        }
        fn group_terms(&self, cells: &[&Cell], counts: &[Vec<u32>], out: &mut [f64]) {
            let g = cells[0].group;
            let ones: u32 = counts.iter().map(|c| c[1]).sum();
            out[0] += (ones as f64 - self.target[g] as f64).abs() / self.n;
        }
        fn has_leaf_terms(&self) -> bool {
            false
        }
        fn leaf_terms(&self, _: &[usize], _: &[&[u32]], _: &mut [f64]) {}
    }

    #[test]
    fn finds_exact_witness() {
        let (cells, of_pos) = cells_from_rows(
            [
                (0, vec![0]),
                (0, vec![0]),
                (1, vec![1]),
                (1, vec![0]),
                (1, vec![0]),
            ]
            .into_iter(),
        );
        let p = Ones {
            target: vec![1, 2],
            n: 5.0,
        };
        let w = search(&p, &cells, 0.0, 1000).unwrap().unwrap();
        let seq = expand(&w, &of_pos);
        assert_eq!(seq[2], 1);
        assert_eq!(seq[..2].iter().sum::<usize>(), 1);
        assert_eq!(seq[2..].iter().sum::<usize>(), 2);
    }

    #[test]
    fn proves_absence_and_respects_budget() {
        let (cells, _) = cells_from_rows([(0, vec![1]), (0, vec![1])].into_iter());
        let p = Ones {
            target: vec![0],
            n: 2.0,
        };
        assert!(search(&p, &cells, 0.5, 1000).unwrap().is_none());
        let rows = (0..12).map(|i| (0, vec![0, i]));
        let (cells, _) = cells_from_rows(rows);
        let p = Ones {
            target: vec![6],
            n: 12.0,
        };
        assert!(matches!(
            search(&p, &cells, 0.0, 100),
            Err(Error::ExplosionGuard { .. })
        ));
    }
}
