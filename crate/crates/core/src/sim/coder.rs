use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::codebook::Codebook;
use super::psi::{kl_term, Psi, PsiRefs};
use super::witness::{cells_from_rows, expand, search, Cell, Problem};
use super::TypicalityParams;
use crate::bounds::CodingMode;
use crate::channel::{joint_type, Estimator};
use crate::error::{Error, Result};

/// Default node budget of one witness search.
pub const DEFAULT_SEARCH_BUDGET: u64 = 2_000_000;

/// What the encoder knows when it starts a block.
#[derive(Debug, Clone, Copy)]
pub enum EncoderInput<'a> {
    /// Noncausal: the whole state sequence of the block.
    Noncausal { s: &'a [usize] },
    /// Strictly causal, first block: the description index is fixed.
    FirstBlock { l: usize },
    /// Strictly causal, later blocks: previous indices and states.
    NextBlock {
        m_prev: usize,
        l_prev: usize,
        s_prev: &'a [usize],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EncodeOutcome {
    Sent {
        x: Vec<usize>,
        /// The description word (strictly causal) or codeword (noncausal).
        u: Option<Vec<usize>>,
        /// x-word index `m * n_bins + l` (strictly causal) or u-word index.
        word: usize,
        /// Index of the chosen description word in its subcodebook.
        description: Option<usize>,
        /// Bin label sent (strictly causal) or within-bin index (noncausal).
        l: usize,
        /// Defining divergence of the covering test, 0 when none applies.
        divergence: f64,
    },
    /// No codeword passes the covering test.
    CoveringFailure,
    /// Noncausal: the selected codeword failed the pairwise test.
    BadCodewordSelected { word: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DecodeOutcome {
    Decoded {
        /// x-word, description word or u-word index, depending on the call.
        index: usize,
        /// Witness jamming sequence.
        jam: Vec<usize>,
        /// Witness state sequence, where the conditions involve the state.
        state: Option<Vec<usize>>,
        /// All conditions re-checked on the expanded sequences.
        verified: bool,
    },
    Ambiguous {
        survivors: Vec<usize>,
    },
    NoCandidate,
}

/// Encodes message `m` for one block.
pub fn encode<R: Rng + ?Sized>(
    cb: &Codebook,
    m: usize,
    input: EncoderInput<'_>,
    params: &TypicalityParams,
    rng: &mut R,
) -> Result<EncodeOutcome> {
    if m >= cb.messages {
        return Err(Error::IndexError(format!(
            "message {m} outside 0..{}",
            cb.messages
        )));
    }
    match (&cb.refs, input) {
        (PsiRefs::StrictlyCausal { .. }, EncoderInput::FirstBlock { l }) => {
            check_index(l, cb.n_bins, "description index")?;
            let word = m * cb.n_bins + l;
            Ok(EncodeOutcome::Sent {
                x: cb.x_words[word].clone(),
                u: None,
                word,
                description: None,
                l,
                divergence: 0.0,
            })
        }
        (
            PsiRefs::StrictlyCausal { nx, nu, ns, .. },
            EncoderInput::NextBlock {
                m_prev,
                l_prev,
                s_prev,
            },
        ) => {
            check_index(m_prev, cb.messages, "previous message")?;
            check_index(l_prev, cb.n_bins, "previous description index")?;
            check_len(s_prev, cb.n)?;
            let prev = m_prev * cb.n_bins + l_prev;
            let x_prev = &cb.x_words[prev];
            let mut hits = Vec::new();
            for (k, u) in cb.u_words[prev].iter().enumerate() {
                let t = joint_type(&[x_prev, u, s_prev], &[*nx, *nu, *ns])?;
                let d = cb.refs.divergence(&t, Psi::Two)?;
                if d <= params.eta {
                    hits.push((k, d));
                }
            }
            let Some(&(k, d)) = hits.choose(rng) else {
                return Ok(EncodeOutcome::CoveringFailure);
            };
            let l = cb.bins[prev][k];
            let word = m * cb.n_bins + l;
            Ok(EncodeOutcome::Sent {
                x: cb.x_words[word].clone(),
                u: Some(cb.u_words[prev][k].clone()),
                word,
                description: Some(k),
                l,
                divergence: d,
            })
        }
        (
            PsiRefs::Noncausal {
                nu,
                ns,
                nx,
                nj,
                q_x_us,
                ..
            },
            EncoderInput::Noncausal { s },
        ) => {
            check_len(s, cb.n)?;
            let mut hits = Vec::new();
            for i in cb.bin_members(m) {
                let j0 = vec![0; cb.n];
                let t = joint_type(&[&cb.u_words[0][i], s, &j0], &[*nu, *ns, *nj])?;
                let d = cb.refs.divergence(&t, Psi::Two)?;
                if d <= params.delta {
                    hits.push((i, d));
                }
            }
            let Some(&(i, d)) = hits.choose(rng) else {
                return Ok(EncodeOutcome::CoveringFailure);
            };
            if !cb.good_flags[0][i] {
                return Ok(EncodeOutcome::BadCodewordSelected { word: i });
            }
            let u = cb.u_words[0][i].clone();
            let x = u
                .iter()
                .zip(s)
                .map(|(&ui, &si)| {
                    let row = &q_x_us[(ui * ns + si) * nx..(ui * ns + si + 1) * nx];
                    sample(row, rng)
                })
                .collect();
            Ok(EncodeOutcome::Sent {
                x,
                u: Some(u),
                word: i,
                description: None,
                l: cb.message_of(i).1,
                divergence: d,
            })
        }
        _ => Err(Error::Config(
            "encoder input does not match the codebook mode".into(),
        )),
    }
}

pub(crate) fn sample<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> usize {
    let r: f64 = rng.gen();
    let mut acc = 0.0;
    for (k, &v) in p.iter().enumerate() {
        acc += v;
        if r < acc {
            return k;
        }
    }
    p.iter().rposition(|&v| v > 0.0).unwrap_or(0)
}

fn check_index(v: usize, bound: usize, what: &str) -> Result<()> {
    if v >= bound {
        return Err(Error::IndexError(format!("{what} {v} outside 0..{bound}")));
    }
    Ok(())
}

fn check_len(s: &[usize], n: usize) -> Result<()> {
    if s.len() != n {
        return Err(Error::LengthMismatch(format!(
            "sequence of length {} for blocklength {n}",
            s.len()
        )));
    }
    Ok(())
}

/// Symbolwise reconstruction `h(x_i, u_i, y_i)`; `x` may be empty when `h`
/// ignores it.
pub fn estimate_state(u: &[usize], x: &[usize], y: &[usize], h: &Estimator) -> Result<Vec<usize>> {
    if u.len() != y.len() || (!x.is_empty() && x.len() != y.len()) {
        return Err(Error::LengthMismatch(format!(
            "u, x, y have lengths {}, {}, {}",
            u.len(),
            x.len(),
            y.len()
        )));
    }
    Ok((0..y.len())
        .map(|i| h.estimate(x.get(i).copied().unwrap_or(0), u[i], y[i]))
        .collect())
}

// ---------------------------------------------------------------------------
// count-table helpers

/// `sum t log2(t N(c) / (N(c,a) N(c,b))) / n` for a table laid out
/// `[c][a][b]`.
fn cmi(t: &[f64], nc: usize, na: usize, nb: usize, n: f64) -> f64 {
    let mut total = 0.0;
    let mut ca = vec![0.0; na];
    let mut cb = vec![0.0; nb];
    for c in 0..nc {
        let block = &t[c * na * nb..(c + 1) * na * nb];
        ca.iter_mut().for_each(|v| *v = 0.0);
        cb.iter_mut().for_each(|v| *v = 0.0);
        let mut nc_ = 0.0;
        for a in 0..na {
            for b in 0..nb {
                let v = block[a * nb + b];
                ca[a] += v;
                cb[b] += v;
                nc_ += v;
            }
        }
        for a in 0..na {
            for b in 0..nb {
                let v = block[a * nb + b];
                if v > 0.0 {
                    total += v * (v * nc_ / (ca[a] * cb[b])).log2();
                }
            }
        }
    }
    (total / n).max(0.0)
}

/// `sum_{j,y} N(j,y)/n log2((N(j,y)/N(j)) / q(y|j))`, table `[j][y]`.
fn cond_div(t: &[f64], nj: usize, ny: usize, q: impl Fn(usize, usize) -> f64, n: f64) -> f64 {
    let mut d = 0.0;
    for j in 0..nj {
        let row = &t[j * ny..(j + 1) * ny];
        let tot: f64 = row.iter().sum();
        for (y, &v) in row.iter().enumerate() {
            if v > 0.0 {
                d += kl_term(v / tot, q(j, y)) * tot / n;
            }
        }
    }
    d
}

fn counts_of(seq: &[usize], k: usize) -> Vec<f64> {
    let mut c = vec![0.0; k];
    seq.iter().for_each(|&v| c[v] += 1.0);
    c
}

// ---------------------------------------------------------------------------
// noncausal decoding: known (u, y, u'_k), hidden (s, j)

struct NcProblem<'a> {
    refs: &'a PsiRefs,
    n: f64,
    cover: bool,
    comps: usize,
    offset_cover: f64,
}

impl NcProblem<'_> {
    fn dims(&self) -> (usize, usize, usize, usize) {
        match self.refs {
            PsiRefs::Noncausal { nu, ns, nj, ny, .. } => (*nu, *ns, *nj, *ny),
            _ => unreachable!(),
        }
    }
    fn with_state(&self) -> bool {
        self.cover || self.comps > 0
    }
    fn split(&self, w: usize) -> (usize, usize) {
        let nj = self.dims().2;
        (w / nj, w % nj)
    }
}

impl Problem for NcProblem<'_> {
    fn n_w(&self) -> usize {
        let (_, ns, nj, _) = self.dims();
        if self.with_state() {
            ns * nj
        } else {
            nj
        }
    }
    fn n_terms(&self) -> usize {
        1 + self.cover as usize + self.comps
    }
    fn offset(&self) -> Vec<f64> {
        let mut o = vec![0.0; self.n_terms()];
        if self.cover {
            o[1] = self.offset_cover;
        }
        o
    }
    fn admissible(&self, cell: &Cell, w: usize) -> bool {
        let PsiRefs::Noncausal {
            ns,
            nj,
            ny,
            q_us,
            q_y_uj,
            ..
        } = self.refs
        else {
            unreachable!()
        };
        let u = cell.group;
        let (s, j) = self.split(w);
        q_y_uj[(u * nj + j) * ny + cell.key[0]] > 0.0 && (!self.cover || q_us[u * ns + s] > 0.0)
    }
    fn group_terms(&self, cells: &[&Cell], counts: &[Vec<u32>], out: &mut [f64]) {
        let PsiRefs::Noncausal {
            nu,
            ns,
            nj,
            ny,
            q_us,
            q_y_uj,
            ..
        } = self.refs
        else {
            unreachable!()
        };
        let (nu, ns, nj, ny) = (*nu, *ns, *nj, *ny);
        let u = cells[0].group;
        let mut jy = vec![0.0; nj * ny];
        let mut s_tot = vec![0.0; ns];
        let mut comp = vec![0.0; self.comps * nj * ny * ns * nu];
        for (cell, c) in cells.iter().zip(counts) {
            let y = cell.key[0];
            for (w, &v) in c.iter().enumerate() {
                if v == 0 {
                    continue;
                }
                let v = v as f64;
                let (s, j) = self.split(w);
                jy[j * ny + y] += v;
                s_tot[s] += v;
                for k in 0..self.comps {
                    let up = cell.key[1 + k];
                    comp[k * nj * ny * ns * nu + ((j * ny + y) * ns + s) * nu + up] += v;
                }
            }
        }
        out[0] += cond_div(&jy, nj, ny, |j, y| q_y_uj[(u * nj + j) * ny + y], self.n);
        let mut t = 1;
        if self.cover {
            let n_u: f64 = s_tot.iter().sum();
            let q_u: f64 = q_us[u * ns..(u + 1) * ns].iter().sum();
            for s in 0..ns {
                if s_tot[s] > 0.0 {
                    out[1] += kl_term(s_tot[s] / n_u, q_us[u * ns + s] / q_u) * n_u / self.n;
                }
            }
            t = 2;
        }
        let block = nj * ny * ns * nu;
        for k in 0..self.comps {
            out[t + k] += cmi(&comp[k * block..(k + 1) * block], nj, ny * ns, nu, self.n);
        }
    }
    fn has_leaf_terms(&self) -> bool {
        false
    }
    fn leaf_terms(&self, _: &[usize], _: &[&[u32]], _: &mut [f64]) {}
}

// ---------------------------------------------------------------------------
// strictly causal message decoding: known (x, y, x'_k), hidden j

struct ScMessageProblem<'a> {
    refs: &'a PsiRefs,
    n: f64,
    comps: usize,
    offset: f64,
}

impl ScMessageProblem<'_> {
    fn dims(&self) -> (usize, usize, usize) {
        match self.refs {
            PsiRefs::StrictlyCausal { nx, nj, ny, .. } => (*nx, *nj, *ny),
            _ => unreachable!(),
        }
    }
}

impl Problem for ScMessageProblem<'_> {
    fn n_w(&self) -> usize {
        self.dims().1
    }
    fn n_terms(&self) -> usize {
        1 + self.comps
    }
    fn offset(&self) -> Vec<f64> {
        let mut o = vec![0.0; self.n_terms()];
        o[0] = self.offset;
        o
    }
    fn admissible(&self, cell: &Cell, j: usize) -> bool {
        let PsiRefs::StrictlyCausal { nj, ny, w_xj, .. } = self.refs else {
            unreachable!()
        };
        w_xj[(cell.group * nj + j) * ny + cell.key[0]] > 0.0
    }
    fn group_terms(&self, cells: &[&Cell], counts: &[Vec<u32>], out: &mut [f64]) {
        let PsiRefs::StrictlyCausal { w_xj, .. } = self.refs else {
            unreachable!()
        };
        let (nx, nj, ny) = self.dims();
        let x = cells[0].group;
        let mut jy = vec![0.0; nj * ny];
        let mut comp = vec![0.0; self.comps * nj * ny * nx];
        for (cell, c) in cells.iter().zip(counts) {
            let y = cell.key[0];
            for (j, &v) in c.iter().enumerate() {
                if v == 0 {
                    continue;
                }
                jy[j * ny + y] += v as f64;
                for k in 0..self.comps {
                    comp[k * nj * ny * nx + (j * ny + y) * nx + cell.key[1 + k]] += v as f64;
                }
            }
        }
        out[0] += cond_div(&jy, nj, ny, |j, y| w_xj[(x * nj + j) * ny + y], self.n);
        let block = nj * ny * nx;
        for k in 0..self.comps {
            out[1 + k] += cmi(&comp[k * block..(k + 1) * block], nj, ny, nx, self.n);
        }
    }
    fn has_leaf_terms(&self) -> bool {
        true
    }
    fn profile(&self, cells: &[&Cell], counts: &[Vec<u32>]) -> Vec<u32> {
        let (nx, nj, _) = self.dims();
        let mut p = vec![0u32; nj * (1 + self.comps * nx)];
        for (cell, c) in cells.iter().zip(counts) {
            for (j, &v) in c.iter().enumerate() {
                p[j] += v;
                for k in 0..self.comps {
                    p[nj + (k * nj + j) * nx + cell.key[1 + k]] += v;
                }
            }
        }
        p
    }
    fn leaf_terms(&self, groups: &[usize], profiles: &[&[u32]], out: &mut [f64]) {
        let (nx, nj, _) = self.dims();
        // I(X;J), table [x][j]
        let mut xj = vec![0.0; nx * nj];
        for (&x, p) in groups.iter().zip(profiles) {
            for j in 0..nj {
                xj[x * nj + j] += p[j] as f64;
            }
        }
        out[0] += cmi(&xj, 1, nx, nj, self.n);
        // I(X;X'|J), table [j][x][x']
        for k in 0..self.comps {
            let mut t = vec![0.0; nj * nx * nx];
            for (&x, p) in groups.iter().zip(profiles) {
                for j in 0..nj {
                    for xp in 0..nx {
                        t[(j * nx + x) * nx + xp] += p[nj + (k * nj + j) * nx + xp] as f64;
                    }
                }
            }
            out[1 + k] += cmi(&t, nj, nx, nx, self.n);
        }
    }
}

// ---------------------------------------------------------------------------
// strictly causal description decoding: known (x, u, y, u'_k), hidden (s, j)

struct ScDescriptionProblem<'a> {
    refs: &'a PsiRefs,
    n: f64,
    comps: usize,
    offset: f64,
}

impl ScDescriptionProblem<'_> {
    fn dims(&self) -> (usize, usize, usize, usize, usize) {
        match self.refs {
            PsiRefs::StrictlyCausal {
                nx, nu, ns, nj, ny, ..
            } => (*nx, *nu, *ns, *nj, *ny),
            _ => unreachable!(),
        }
    }
}

impl Problem for ScDescriptionProblem<'_> {
    fn n_w(&self) -> usize {
        let (_, _, ns, nj, _) = self.dims();
        ns * nj
    }
    fn n_terms(&self) -> usize {
        2 + self.comps
    }
    fn offset(&self) -> Vec<f64> {
        let mut o = vec![0.0; self.n_terms()];
        o[0] = self.offset;
        o[1] = self.offset;
        o
    }
    fn admissible(&self, cell: &Cell, w: usize) -> bool {
        let PsiRefs::StrictlyCausal {
            q_s,
            q_u_xs,
            q_y_xuj,
            ..
        } = self.refs
        else {
            unreachable!()
        };
        let (_, nu, ns, nj, ny) = self.dims();
        let (x, u) = (cell.group / nu, cell.group % nu);
        let (s, j) = (w / nj, w % nj);
        q_y_xuj[(cell.group * nj + j) * ny + cell.key[0]] > 0.0
            && q_s[s] * q_u_xs[(x * ns + s) * nu + u] > 0.0
    }
    fn group_terms(&self, cells: &[&Cell], counts: &[Vec<u32>], out: &mut [f64]) {
        let PsiRefs::StrictlyCausal {
            q_s,
            q_u_xs,
            q_u_x,
            q_y_xuj,
            ..
        } = self.refs
        else {
            unreachable!()
        };
        let (_, nu, ns, nj, ny) = self.dims();
        let g = cells[0].group;
        let (x, u) = (g / nu, g % nu);
        let mut jy = vec![0.0; nj * ny];
        let mut s_tot = vec![0.0; ns];
        let mut comp = vec![0.0; self.comps * nj * ny * ns * nu];
        for (cell, c) in cells.iter().zip(counts) {
            let y = cell.key[0];
            for (w, &v) in c.iter().enumerate() {
                if v == 0 {
                    continue;
                }
                let v = v as f64;
                let (s, j) = (w / nj, w % nj);
                jy[j * ny + y] += v;
                s_tot[s] += v;
                for k in 0..self.comps {
                    comp[k * nj * ny * ns * nu + ((j * ny + y) * ns + s) * nu + cell.key[1 + k]] +=
                        v;
                }
            }
        }
        out[0] += cond_div(&jy, nj, ny, |j, y| q_y_xuj[(g * nj + j) * ny + y], self.n);
        let n_g: f64 = s_tot.iter().sum();
        for s in 0..ns {
            if s_tot[s] > 0.0 {
                let q = q_s[s] * q_u_xs[(x * ns + s) * nu + u] / q_u_x[x * nu + u];
                out[1] += kl_term(s_tot[s] / n_g, q) * n_g / self.n;
            }
        }
        let block = nj * ny * ns * nu;
        for k in 0..self.comps {
            out[2 + k] += cmi(&comp[k * block..(k + 1) * block], nj, ny * ns, nu, self.n);
        }
    }
    fn has_leaf_terms(&self) -> bool {
        true
    }
    fn leaf_terms(&self, groups: &[usize], profiles: &[&[u32]], out: &mut [f64]) {
        let (nx, nu, ns, nj, _) = self.dims();
        let ng = nx * nu;
        let mut gj = vec![0.0; ng * nj];
        let mut gsj = vec![0.0; ng * ns * nj];
        for (&g, p) in groups.iter().zip(profiles) {
            for s in 0..ns {
                for j in 0..nj {
                    let v = p[s * nj + j] as f64;
                    gj[g * nj + j] += v;
                    gsj[(g * ns + s) * nj + j] += v;
                }
            }
        }
        out[0] += cmi(&gj, 1, ng, nj, self.n);
        out[1] += cmi(&gsj, 1, ng * ns, nj, self.n);
    }
}

// ---------------------------------------------------------------------------
// decoding drivers

/// `D(P || Q)` in bits between an empirical composition and a law.
fn composition_divergence(counts: &[f64], q: &[f64], n: f64) -> f64 {
    counts
        .iter()
        .zip(q)
        .map(|(&c, &qv)| kl_term(c / n, qv))
        .sum::<f64>()
        .max(0.0)
}

enum Kind<'a> {
    Noncausal,
    Message,
    Description { x: &'a [usize] },
}

fn run_search(
    cb: &Codebook,
    kind: &Kind<'_>,
    word: &[usize],
    y: &[usize],
    comps: &[&[usize]],
    full: bool,
    eta: f64,
    budget: u64,
) -> Result<Option<(Vec<usize>, Option<Vec<usize>>)>> {
    let n = cb.n as f64;
    match (kind, &cb.refs) {
        (
            Kind::Noncausal,
            PsiRefs::Noncausal {
                nu, ns, nj, q_us, ..
            },
        ) => {
            let q_u: Vec<f64> = (0..*nu)
                .map(|u| q_us[u * ns..(u + 1) * ns].iter().sum())
                .collect();
            let problem = NcProblem {
                refs: &cb.refs,
                n,
                cover: full,
                comps: comps.len(),
                offset_cover: composition_divergence(&counts_of(word, *nu), &q_u, n),
            };
            let rows = (0..cb.n).map(|i| {
                let mut key = vec![y[i]];
                key.extend(comps.iter().map(|c| c[i]));
                (word[i], key)
            });
            let (cells, of_pos) = cells_from_rows(rows);
            Ok(search(&problem, &cells, eta, budget)?.map(|w| {
                let seq = expand(&w, &of_pos);
                if problem.with_state() {
                    (
                        seq.iter().map(|&v| v % nj).collect(),
                        Some(seq.iter().map(|&v| v / nj).collect()),
                    )
                } else {
                    (seq, None)
                }
            }))
        }
        (Kind::Message, PsiRefs::StrictlyCausal { nx, q_x, .. }) => {
            let problem = ScMessageProblem {
                refs: &cb.refs,
                n,
                comps: comps.len(),
                offset: composition_divergence(&counts_of(word, *nx), q_x, n),
            };
            let rows = (0..cb.n).map(|i| {
                let mut key = vec![y[i]];
                key.extend(comps.iter().map(|c| c[i]));
                (word[i], key)
            });
            let (cells, of_pos) = cells_from_rows(rows);
            Ok(search(&problem, &cells, eta, budget)?.map(|w| (expand(&w, &of_pos), None)))
        }
        (
            Kind::Description { x },
            PsiRefs::StrictlyCausal {
                nx,
                nu,
                nj,
                q_x,
                q_u_x,
                ..
            },
        ) => {
            let mut xu = vec![0.0; nx * nu];
            let mut q = vec![0.0; nx * nu];
            for i in 0..cb.n {
                xu[x[i] * nu + word[i]] += 1.0;
            }
            for a in 0..*nx {
                for u in 0..*nu {
                    q[a * nu + u] = q_x[a] * q_u_x[a * nu + u];
                }
            }
            let problem = ScDescriptionProblem {
                refs: &cb.refs,
                n,
                comps: comps.len(),
                offset: composition_divergence(&xu, &q, n),
            };
            let rows = (0..cb.n).map(|i| {
                let mut key = vec![y[i]];
                key.extend(comps.iter().map(|c| c[i]));
                (x[i] * nu + word[i], key)
            });
            let (cells, of_pos) = cells_from_rows(rows);
            Ok(search(&problem, &cells, eta, budget)?.map(|w| {
                let seq = expand(&w, &of_pos);
                (
                    seq.iter().map(|&v| v % nj).collect(),
                    Some(seq.iter().map(|&v| v / nj).collect()),
                )
            }))
        }
        _ => Err(Error::Config(
            "decoder does not match the codebook mode".into(),
        )),
    }
}

/// Sequence-level re-check of every condition a decoded index must meet.
fn verify(
    cb: &Codebook,
    kind: &Kind<'_>,
    word: &[usize],
    y: &[usize],
    jam: &[usize],
    state: Option<&[usize]>,
    comps: &[&[usize]],
    eta: f64,
) -> Result<bool> {
    let tol = eta + 1e-9;
    let refs = &cb.refs;
    let mi = |seqs: &[&[usize]], sizes: &[usize], a: &[usize], b: &[usize], c: &[usize]| {
        joint_type(seqs, sizes)?
            .to_distribution()
            .mutual_information(a, b, c)
    };
    match (kind, refs) {
        (Kind::Noncausal, PsiRefs::Noncausal { nu, ns, nj, ny, .. }) => {
            let s = state.expect("noncausal witness carries a state");
            let t1 = joint_type(&[word, y, jam], &[*nu, *ny, *nj])?;
            let t2 = joint_type(&[word, s, jam], &[*nu, *ns, *nj])?;
            if refs.divergence(&t1, Psi::One)? > tol || refs.divergence(&t2, Psi::Two)? > tol {
                return Ok(false);
            }
            for c in comps {
                let v = mi(
                    &[y, s, c, word, jam],
                    &[*ny, *ns, *nu, *nu, *nj],
                    &[0, 1],
                    &[2],
                    &[3, 4],
                )?;
                if v > tol {
                    return Ok(false);
                }
            }
        }
        (Kind::Message, PsiRefs::StrictlyCausal { nx, nj, ny, .. }) => {
            let t1 = joint_type(&[word, y, jam], &[*nx, *ny, *nj])?;
            if refs.divergence(&t1, Psi::One)? > tol {
                return Ok(false);
            }
            for c in comps {
                let v = mi(
                    &[word, y, c, jam],
                    &[*nx, *ny, *nx, *nj],
                    &[0, 1],
                    &[2],
                    &[3],
                )?;
                if v > tol {
                    return Ok(false);
                }
            }
        }
        (
            Kind::Description { x },
            PsiRefs::StrictlyCausal {
                nx, nu, ns, nj, ny, ..
            },
        ) => {
            let s = state.expect("description witness carries a state");
            let t3 = joint_type(&[x, word, y, jam], &[*nx, *nu, *ny, *nj])?;
            let t4 = joint_type(&[x, word, s, jam], &[*nx, *nu, *ns, *nj])?;
            if refs.divergence(&t3, Psi::Three)? > tol || refs.divergence(&t4, Psi::Four)? > tol {
                return Ok(false);
            }
            for c in comps {
                let v = mi(
                    &[y, s, c, jam, word, x],
                    &[*ny, *ns, *nu, *nj, *nu, *nx],
                    &[0, 1],
                    &[2],
                    &[3, 4, 5],
                )?;
                if v > tol {
                    return Ok(false);
                }
            }
        }
        _ => unreachable!("run_search rejects mismatched modes"),
    }
    Ok(true)
}

fn decode_among(
    cb: &Codebook,
    kind: Kind<'_>,
    words: &[(usize, &[usize])],
    y: &[usize],
    eta: f64,
    budget: u64,
) -> Result<DecodeOutcome> {
    check_len(y, cb.n)?;
    // identical words share one verdict
    let mut distinct: BTreeMap<&[usize], Vec<usize>> = BTreeMap::new();
    for &(i, w) in words {
        distinct.entry(w).or_default().push(i);
    }
    let mut feasible: Vec<&[usize]> = Vec::new();
    for &w in distinct.keys() {
        if run_search(cb, &kind, w, y, &[], false, eta, budget)?.is_some() {
            feasible.push(w);
        }
    }
    // the noncausal candidate also has to meet the cover condition
    let candidates: Vec<&[usize]> = if matches!(kind, Kind::Noncausal) {
        let mut c = Vec::new();
        for &w in &feasible {
            if run_search(cb, &kind, w, y, &[], true, eta, budget)?.is_some() {
                c.push(w);
            }
        }
        c
    } else {
        feasible.clone()
    };
    let mut survivors = Vec::new();
    for &w in &candidates {
        let comps: Vec<&[usize]> = feasible.iter().copied().filter(|&c| c != w).collect();
        if let Some((jam, state)) = run_search(cb, &kind, w, y, &comps, true, eta, budget)? {
            survivors.push((w, jam, state, comps));
        }
    }
    let indices: Vec<usize> = survivors
        .iter()
        .flat_map(|s| distinct[s.0].iter().copied())
        .collect();
    match indices.len() {
        0 => Ok(DecodeOutcome::NoCandidate),
        1 => {
            let (w, jam, state, comps) = survivors.pop().unwrap();
            let verified = verify(cb, &kind, w, y, &jam, state.as_deref(), &comps, eta)?;
            Ok(DecodeOutcome::Decoded {
                index: indices[0],
                jam,
                state,
                verified,
            })
        }
        _ => Ok(DecodeOutcome::Ambiguous { survivors: indices }),
    }
}

/// Decodes the message word from one block's output: the x-word index
/// `m * n_bins + l` (strictly causal) or the u-word index (noncausal).
pub fn decode_message(cb: &Codebook, y: &[usize], eta: f64, budget: u64) -> Result<DecodeOutcome> {
    match cb.mode {
        CodingMode::StrictlyCausal => {
            let words: Vec<(usize, &[usize])> = cb
                .x_words
                .iter()
                .enumerate()
                .map(|(i, w)| (i, w.as_slice()))
                .collect();
            decode_among(cb, Kind::Message, &words, y, eta, budget)
        }
        CodingMode::Noncausal => {
            let words: Vec<(usize, &[usize])> = cb.u_words[0]
                .iter()
                .enumerate()
                .map(|(i, w)| (i, w.as_slice()))
                .collect();
            decode_among(cb, Kind::Noncausal, &words, y, eta, budget)
        }
    }
}

/// Strictly causal: decodes the description word of a block whose x-word
/// `x_word` is known, searching bin `bin` of its subcodebook.
pub fn decode_description(
    cb: &Codebook,
    x_word: usize,
    bin: usize,
    y: &[usize],
    eta: f64,
    budget: u64,
) -> Result<DecodeOutcome> {
    if cb.mode != CodingMode::StrictlyCausal {
        return Err(Error::Config(
            "description decoding needs a strictly causal codebook".into(),
        ));
    }
    check_index(x_word, cb.x_words.len(), "x-word")?;
    check_index(bin, cb.n_bins, "bin")?;
    let words: Vec<(usize, &[usize])> = cb.u_words[x_word]
        .iter()
        .enumerate()
        .filter(|&(k, _)| cb.bins[x_word][k] == bin)
        .map(|(k, w)| (k, w.as_slice()))
        .collect();
    let x = &cb.x_words[x_word];
    decode_among(cb, Kind::Description { x }, &words, y, eta, budget)
}
