use serde::{Deserialize, Serialize};

use crate::channel::{average_out_state, induce_u_channel, AuxLaw, JointType, StateChannel};
use crate::error::{Error, Result};

/// Which typicality set of the decoder or encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Psi {
    One,
    Two,
    Three,
    Four,
}

/// Reference laws the typicality sets are measured against.
///
/// Variable order of the joint types, strictly causal mode:
/// `One (x, y, j)`, `Two (x, u, s)`, `Three (x, u, y, j)`,
/// `Four (x, u, s, j)`. Noncausal mode: `One (u, y, j)`, `Two (u, s, j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PsiRefs {
    StrictlyCausal {
        nx: usize,
        ns: usize,
        nu: usize,
        nj: usize,
        ny: usize,
        q_x: Vec<f64>,
        q_s: Vec<f64>,
        /// `Q(u|x,s)`, flat `[x][s][u]`.
        q_u_xs: Vec<f64>,
        /// `Q(u|x)`, flat `[x][u]`.
        q_u_x: Vec<f64>,
        /// State-averaged `W(y|x,j)`, flat `[x][j][y]`.
        w_xj: Vec<f64>,
        /// Induced `Q(y|x,u,j)`, flat `[x][u][j][y]`; zero rows where
        /// `Q(x,u) = 0`.
        q_y_xuj: Vec<f64>,
    },
    Noncausal {
        ns: usize,
        nu: usize,
        nx: usize,
        nj: usize,
        ny: usize,
        /// `Q(u,s)`, flat `[u][s]`.
        q_us: Vec<f64>,
        /// Induced `Q(y|u,j)`, flat `[u][j][y]`.
        q_y_uj: Vec<f64>,
        /// `Q(x|u,s)`, flat `[u][s][x]`.
        q_x_us: Vec<f64>,
    },
}

impl PsiRefs {
    pub fn new(ch: &StateChannel, aux: &AuxLaw) -> Result<Self> {
        let ind = induce_u_channel(ch, aux)?;
        let (nx, ns, nj, ny, nu) = (ch.nx(), ch.ns(), ch.nj(), ch.ny(), aux.nu());
        let q_y: Vec<f64> = (0..ind.avc.n_in())
            .flat_map(|i| (0..nj).map(move |j| (i, j)))
            .flat_map(|(i, j)| ind.avc.row(i, j).to_vec())
            .collect();
        match aux {
            AuxLaw::StrictlyCausal { q_x, q_u_xs } => {
                let mut q_u_x = vec![0.0; nx * nu];
                for x in 0..nx {
                    for s in 0..ns {
                        for u in 0..nu {
                            q_u_x[x * nu + u] += ch.q_s()[s] * q_u_xs.get(x * ns + s, u);
                        }
                    }
                }
                let avg = average_out_state(ch);
                let w_xj = (0..nx)
                    .flat_map(|x| (0..nj).map(move |j| (x, j)))
                    .flat_map(|(x, j)| avg.row(x, j).to_vec())
                    .collect();
                Ok(PsiRefs::StrictlyCausal {
                    nx,
                    ns,
                    nu,
                    nj,
                    ny,
                    q_x: q_x.clone(),
                    q_s: ch.q_s().to_vec(),
                    q_u_xs: q_u_xs.as_flat().to_vec(),
                    q_u_x,
                    w_xj,
                    q_y_xuj: q_y,
                })
            }
            AuxLaw::Noncausal { q_u_s, q_x_us } => {
                let q_us = (0..nu)
                    .flat_map(|u| (0..ns).map(move |s| (u, s)))
                    .map(|(u, s)| ch.q_s()[s] * q_u_s.get(s, u))
                    .collect();
                Ok(PsiRefs::Noncausal {
                    ns,
                    nu,
                    nx,
                    nj,
                    ny,
                    q_us,
                    q_y_uj: q_y,
                    q_x_us: q_x_us.as_flat().to_vec(),
                })
            }
        }
    }

    pub fn is_noncausal(&self) -> bool {
        matches!(self, PsiRefs::Noncausal { .. })
    }

    /// Alphabet sizes of the joint type `which` is evaluated on.
    pub fn sizes(&self, which: Psi) -> Result<Vec<usize>> {
        match (self, which) {
            (PsiRefs::StrictlyCausal { nx, ny, nj, .. }, Psi::One) => Ok(vec![*nx, *ny, *nj]),
            (PsiRefs::StrictlyCausal { nx, nu, ns, .. }, Psi::Two) => Ok(vec![*nx, *nu, *ns]),
            (PsiRefs::StrictlyCausal { nx, nu, ny, nj, .. }, Psi::Three) => {
                Ok(vec![*nx, *nu, *ny, *nj])
            }
            (PsiRefs::StrictlyCausal { nx, nu, ns, nj, .. }, Psi::Four) => {
                Ok(vec![*nx, *nu, *ns, *nj])
            }
            (PsiRefs::Noncausal { nu, ny, nj, .. }, Psi::One) => Ok(vec![*nu, *ny, *nj]),
            (PsiRefs::Noncausal { nu, ns, nj, .. }, Psi::Two) => Ok(vec![*nu, *ns, *nj]),
            (PsiRefs::Noncausal { .. }, w) => Err(Error::Config(format!(
                "noncausal decoding has no typicality set {w:?}"
            ))),
        }
    }

    /// The divergence in bits that defines membership in `which`.
    pub fn divergence(&self, t: &JointType, which: Psi) -> Result<f64> {
        let sizes = self.sizes(which)?;
        if t.arity() != sizes.len() {
            return Err(Error::ArityMismatch {
                expected: sizes.len(),
                got: t.arity(),
            });
        }
        if t.sizes() != sizes.as_slice() {
            return Err(Error::DimensionMismatch(format!(
                "type sizes {:?}, expected {sizes:?}",
                t.sizes()
            )));
        }
        let n = t.n() as f64;
        if n == 0.0 {
            return Ok(0.0);
        }
        let c = t.counts();
        let last = *sizes.last().unwrap();
        // marginal of the last variable (j) where the reference uses it
        let p_j = |j: usize| -> f64 {
            c.iter()
                .enumerate()
                .filter(|(i, _)| i % last == j)
                .map(|(_, &v)| v as f64)
                .sum::<f64>()
                / n
        };
        let mut d = 0.0;
        match (self, which) {
            (
                PsiRefs::StrictlyCausal {
                    nj, ny, q_x, w_xj, ..
                },
                Psi::One,
            ) => {
                for (i, &v) in c.iter().enumerate() {
                    if v == 0 {
                        continue;
                    }
                    let (x, y, j) = (i / (ny * nj), (i / nj) % ny, i % nj);
                    let p = v as f64 / n;
                    d += kl_term(p, q_x[x] * p_j(j) * w_xj[(x * nj + j) * ny + y]);
                }
            }
            (
                PsiRefs::StrictlyCausal {
                    ns,
                    nu,
                    q_x,
                    q_s,
                    q_u_xs,
                    ..
                },
                Psi::Two,
            ) => {
                for (i, &v) in c.iter().enumerate() {
                    if v == 0 {
                        continue;
                    }
                    let (x, u, s) = (i / (nu * ns), (i / ns) % nu, i % ns);
                    let q = q_x[x] * q_s[s] * q_u_xs[(x * ns + s) * nu + u];
                    d += kl_term(v as f64 / n, q);
                }
            }
            (
                PsiRefs::StrictlyCausal {
                    nu,
                    nj,
                    ny,
                    q_x,
                    q_u_x,
                    q_y_xuj,
                    ..
                },
                Psi::Three,
            ) => {
                for (i, &v) in c.iter().enumerate() {
                    if v == 0 {
                        continue;
                    }
                    let j = i % nj;
                    let y = (i / nj) % ny;
                    let u = (i / (nj * ny)) % nu;
                    let x = i / (nj * ny * nu);
                    let q = q_x[x]
                        * p_j(j)
                        * q_u_x[x * nu + u]
                        * q_y_xuj[((x * nu + u) * nj + j) * ny + y];
                    d += kl_term(v as f64 / n, q);
                }
            }
            (
                PsiRefs::StrictlyCausal {
                    ns,
                    nu,
                    nj,
                    q_x,
                    q_s,
                    q_u_xs,
                    ..
                },
                Psi::Four,
            ) => {
                for (i, &v) in c.iter().enumerate() {
                    if v == 0 {
                        continue;
                    }
                    let j = i % nj;
                    let s = (i / nj) % ns;
                    let u = (i / (nj * ns)) % nu;
                    let x = i / (nj * ns * nu);
                    let q = q_x[x] * q_s[s] * q_u_xs[(x * ns + s) * nu + u] * p_j(j);
                    d += kl_term(v as f64 / n, q);
                }
            }
            (PsiRefs::Noncausal { nj, ny, q_y_uj, .. }, Psi::One) => {
                let uj = t.marginal(&[0, 2])?;
                for (i, &v) in c.iter().enumerate() {
                    if v == 0 {
                        continue;
                    }
                    let (u, y, j) = (i / (ny * nj), (i / nj) % ny, i % nj);
                    let p_y = v as f64 / uj.counts()[u * nj + j] as f64;
                    d += v as f64 / n * kl_term(p_y, q_y_uj[(u * nj + j) * ny + y]) / p_y;
                }
            }
            (PsiRefs::Noncausal { q_us, .. }, Psi::Two) => {
                let us = t.marginal(&[0, 1])?;
                for (i, &v) in us.counts().iter().enumerate() {
                    if v > 0 {
                        d += kl_term(v as f64 / n, q_us[i]);
                    }
                }
            }
            _ => unreachable!("sizes() rejects the remaining combinations"),
        }
        Ok(d.max(0.0))
    }
}

/// `p log2(p/q)` with the conventions `0 log 0/q = 0` and `p log p/0 = inf`.
#[inline]
pub(crate) fn kl_term(p: f64, q: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else if q <= 0.0 {
        f64::INFINITY
    } else {
        p * (p / q).log2()
    }
}

/// Membership of `t` in the typicality set `which` at threshold `eta`,
/// together with the defining divergence.
pub fn psi_membership(t: &JointType, which: Psi, refs: &PsiRefs, eta: f64) -> Result<(bool, f64)> {
    let d = refs.divergence(t, which)?;
    Ok((d <= eta, d))
}
