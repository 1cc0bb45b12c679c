//! Information functionals of jammed channels and their jammer gradients.

use serde::{Deserialize, Serialize};

use super::opt::{minimize_convex, simplex_grid, simplex_grid_len};
use crate::channel::{mix_into, AVChannel, JammerLaw, Kernel};
use crate::error::{Error, Result};

/// Conditional mutual information `I(IN; Y | G)` where `G = group(IN)`,
/// for an input law `p` and a flat DMC `w` with `ny` columns.
pub fn grouped_mi(w: &[f64], ny: usize, p: &[f64], group: &[usize], n_groups: usize) -> f64 {
    let q = group_outputs(w, ny, p, group, n_groups);
    let mut acc = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        if pi <= 0.0 {
            continue;
        }
        let qg = &q[group[i] * ny..(group[i] + 1) * ny];
        for y in 0..ny {
            let wy = w[i * ny + y];
            if wy > 0.0 {
                acc += pi * wy * (wy / qg[y]).log2();
            }
        }
    }
    acc.max(0.0)
}

/// Group-conditional output laws `q_g(y)`.
fn group_outputs(w: &[f64], ny: usize, p: &[f64], group: &[usize], n_groups: usize) -> Vec<f64> {
    let mut q = vec![0.0; n_groups * ny];
    let mut mass = vec![0.0; n_groups];
    for (i, &pi) in p.iter().enumerate() {
        if pi <= 0.0 {
            continue;
        }
        mass[group[i]] += pi;
        for y in 0..ny {
            q[group[i] * ny + y] += pi * w[i * ny + y];
        }
    }
    for g in 0..n_groups {
        if mass[g] > 0.0 {
            q[g * ny..(g + 1) * ny]
                .iter_mut()
                .for_each(|v| *v /= mass[g]);
        }
    }
    q
}

/// Value and gradient with respect to each `w(y|i)`: `p(i) log2(w/q_g)`.
pub fn grouped_mi_grad(
    w: &[f64],
    ny: usize,
    p: &[f64],
    group: &[usize],
    n_groups: usize,
) -> (f64, Vec<f64>) {
    let q = group_outputs(w, ny, p, group, n_groups);
    let mut grad = vec![0.0; w.len()];
    let mut acc = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        if pi <= 0.0 {
            continue;
        }
        let qg = &q[group[i] * ny..(group[i] + 1) * ny];
        for y in 0..ny {
            let wy = w[i * ny + y];
            if wy > 0.0 {
                let l = (wy / qg[y]).log2();
                acc += pi * wy * l;
                grad[i * ny + y] = pi * l;
            } else if qg[y] <= 0.0 {
                grad[i * ny + y] = 0.0;
            } else {
                // the one-sided derivative is -inf; a steep finite slope keeps
                // linearization bounds conservative
                grad[i * ny + y] = pi * -1e6;
            }
        }
    }
    (acc.max(0.0), grad)
}

/// Jammer family for the inner minimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JammerFamily {
    /// One law `Q_J` for every input.
    Iid,
    /// A law `Q_{J|in}` per input (row-convex extension).
    PerInput,
}

/// Minimum over a jammer family of a (conditional) mutual information.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JammerMin {
    pub value: f64,
    /// Certified lower bound; `value - lower` is the reported bracket width.
    pub lower: f64,
    pub argmin: JammerLaw,
}

impl JammerMin {
    pub fn bracket(&self) -> f64 {
        self.value - self.lower
    }
}

struct Objective<'a> {
    avc: &'a AVChannel,
    p: &'a [f64],
    group: &'a [usize],
    n_groups: usize,
}

impl Objective<'_> {
    fn channel(&self, params: &[f64], family: JammerFamily) -> Vec<f64> {
        let (n_in, nj, ny) = (self.avc.n_in(), self.avc.nj(), self.avc.ny());
        let mut w = vec![0.0; n_in * ny];
        for i in 0..n_in {
            let weights = match family {
                JammerFamily::Iid => params,
                JammerFamily::PerInput => &params[i * nj..(i + 1) * nj],
            };
            mix_into(self.avc, i, weights, &mut w[i * ny..(i + 1) * ny]);
        }
        w
    }

    fn eval(&self, params: &[f64], family: JammerFamily) -> (f64, Vec<f64>) {
        let (n_in, nj, ny) = (self.avc.n_in(), self.avc.nj(), self.avc.ny());
        let w = self.channel(params, family);
        let (v, gw) = grouped_mi_grad(&w, ny, self.p, self.group, self.n_groups);
        let mut g = vec![0.0; params.len()];
        for i in 0..n_in {
            if self.p[i] <= 0.0 {
                continue;
            }
            for j in 0..nj {
                let row = self.avc.row(i, j);
                let d: f64 = (0..ny).map(|y| gw[i * ny + y] * row[y]).sum();
                match family {
                    JammerFamily::Iid => g[j] += d,
                    JammerFamily::PerInput => g[i * nj + j] = d,
                }
            }
        }
        (v, g)
    }
}

fn check_input(avc: &AVChannel, q_in: &[f64], group: &[usize]) -> Result<()> {
    if q_in.len() != avc.n_in() || group.len() != avc.n_in() {
        return Err(Error::DimensionMismatch(format!(
            "input law has {} entries, AVC has {} inputs",
            q_in.len(),
            avc.n_in()
        )));
    }
    Ok(())
}

/// `min I(IN; Y)` over the jammer family, for input law `q_in`.
pub fn worst_jammer_mi(avc: &AVChannel, q_in: &[f64], family: JammerFamily) -> Result<JammerMin> {
    let group = vec![0; avc.n_in()];
    worst_jammer_grouped(avc, q_in, &group, 1, family)
}

/// `min I(IN; Y | G)` with `G = group(IN)`. For a composite `(x,u)` input
/// grouped by `x` this is `min I(U; Y | X)`.
pub fn worst_jammer_grouped(
    avc: &AVChannel,
    q_in: &[f64],
    group: &[usize],
    n_groups: usize,
    family: JammerFamily,
) -> Result<JammerMin> {
    check_input(avc, q_in, group)?;
    let (n_in, nj) = (avc.n_in(), avc.nj());
    let obj = Objective {
        avc,
        p: q_in,
        group,
        n_groups,
    };
    let tol = 1e-9;

    // i.i.d. family: grid seed, then certified descent
    let mut denom = 32;
    while simplex_grid_len(nj, denom) > 5000.0 && denom > 2 {
        denom /= 2;
    }
    let mut best_seed = vec![1.0 / nj as f64; nj];
    let mut best_val = obj.eval(&best_seed, JammerFamily::Iid).0;
    for s in simplex_grid(nj, denom) {
        let v = obj.eval(&s, JammerFamily::Iid).0;
        if v < best_val {
            best_val = v;
            best_seed = s;
        }
    }
    let f = |x: &[f64]| obj.eval(x, JammerFamily::Iid);
    let iid = minimize_convex(nj, best_seed, &f, 5000, tol);
    if family == JammerFamily::Iid {
        return Ok(JammerMin {
            value: iid.value,
            lower: iid.lower.max(0.0).min(iid.value),
            argmin: JammerLaw::Iid(iid.x),
        });
    }

    // per-input family: start from the best i.i.d. law and from each
    // deterministic kernel that maps all inputs to one symbol pattern
    let fk = |x: &[f64]| obj.eval(x, JammerFamily::PerInput);
    let mut starts: Vec<Vec<f64>> = vec![iid.x.repeat(n_in)];
    if nj.pow(n_in.min(8) as u32) <= 256 && n_in <= 8 {
        let total = nj.pow(n_in as u32);
        let mut best: Option<(f64, Vec<f64>)> = None;
        for code in 0..total {
            let mut k = vec![0.0; n_in * nj];
            let mut c = code;
            for i in 0..n_in {
                k[i * nj + c % nj] = 1.0;
                c /= nj;
            }
            let v = fk(&k).0;
            if best.as_ref().is_none_or(|b| v < b.0) {
                best = Some((v, k));
            }
        }
        starts.push(best.unwrap().1);
    }
    let mut res = None::<super::opt::ConvexMin>;
    for s in starts {
        let r = minimize_convex(nj, s, &fk, 5000, tol);
        res = Some(match res {
            Some(prev) if prev.value <= r.value => super::opt::ConvexMin {
                lower: prev.lower.max(r.lower),
                ..prev
            },
            Some(prev) => super::opt::ConvexMin {
                lower: prev.lower.max(r.lower),
                ..r
            },
            None => r,
        });
    }
    let r = res.unwrap();
    Ok(JammerMin {
        value: r.value,
        lower: r.lower.max(0.0).min(r.value),
        argmin: JammerLaw::PerInput(Kernel::from_flat_unchecked(n_in, nj, r.x)),
    })
}

/// Supergradient of `I(p; W)` in `p`: `D(W_i || q)` per input.
pub fn input_divergences(w: &[f64], ny: usize, p: &[f64]) -> Vec<f64> {
    let q = group_outputs(w, ny, p, &vec![0; p.len()], 1);
    (0..p.len())
        .map(|i| {
            (0..ny)
                .map(|y| {
                    let wy = w[i * ny + y];
                    if wy > 0.0 {
                        wy * (wy / q[y]).log2()
                    } else {
                        0.0
                    }
                })
                .sum()
        })
        .collect()
}

/// The DMC obtained from `avc` under a jammer law, flat `n_in x ny`.
pub fn jammed(avc: &AVChannel, law: &JammerLaw) -> Vec<f64> {
    let (n_in, nj, ny) = (avc.n_in(), avc.nj(), avc.ny());
    let mut w = vec![0.0; n_in * ny];
    for i in 0..n_in {
        let weights: &[f64] = match law {
            JammerLaw::Iid(q) => q,
            JammerLaw::PerInput(k) => &k.as_flat()[i * nj..(i + 1) * nj],
        };
        mix_into(avc, i, weights, &mut w[i * ny..(i + 1) * ny]);
    }
    w
}
