use rand::Rng;
use serde::{Deserialize, Serialize};

use super::codebook::Codebook;
use super::coder::sample;
use super::psi::PsiRefs;
use crate::channel::{uniform, Kernel, StateChannel};
use crate::error::{Error, Result};
use crate::sym::{sym_margin, SymVariant, DEFAULT_SYM_TOL};

/// Which sequence a symmetrizing jammer feeds through its kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymTarget {
    /// A fake channel input: another message's x-word (strictly causal) or
    /// an input drawn from a fake codeword and fake state (noncausal).
    Input,
    /// A fake auxiliary word taken from the codebook.
    Aux,
    /// A fake state sequence drawn i.i.d. from `Q_S`.
    State,
}

/// How the jammer picks `j^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JammerStrategy {
    Constant(usize),
    Iid(Vec<f64>),
    Periodic(Vec<usize>),
    Symmetrizing {
        kernel: Kernel,
        target: SymTarget,
    },
    /// Knows the message and codeword; tries every `j^n` (at most `budget`
    /// of them) and keeps the first one that makes the decoder fail.
    MessageAware {
        budget: u64,
    },
}

impl JammerStrategy {
    /// Parses a jammer name: `constant-J`, `iid-uniform`, `periodic-DIGITS`,
    /// `symmetrizing-x`, `symmetrizing-s` or `message-aware`. The
    /// symmetrizing jammers use the channel's optimal certificate.
    pub fn from_name(name: &str, ch: &StateChannel, budget: u64) -> Result<Self> {
        let bad = || Error::Config(format!("unknown jammer {name:?}"));
        let certificate = |v: SymVariant| sym_margin(ch, v, DEFAULT_SYM_TOL).map(|r| r.certificate);
        Ok(match name {
            "iid-uniform" => JammerStrategy::Iid(uniform(ch.nj())),
            "message-aware" => JammerStrategy::MessageAware { budget },
            "symmetrizing-x" => JammerStrategy::Symmetrizing {
                kernel: certificate(SymVariant::X)?,
                target: SymTarget::Input,
            },
            "symmetrizing-s" => JammerStrategy::Symmetrizing {
                kernel: certificate(SymVariant::S)?,
                target: SymTarget::State,
            },
            _ => {
                if let Some(j) = name.strip_prefix("constant-") {
                    JammerStrategy::Constant(j.parse().map_err(|_| bad())?)
                } else if let Some(p) = name.strip_prefix("periodic-") {
                    JammerStrategy::Periodic(
                        p.chars()
                            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                            .collect::<Result<_>>()?,
                    )
                } else {
                    return Err(bad());
                }
            }
        })
    }

    pub fn name(&self) -> String {
        match self {
            JammerStrategy::Constant(j) => format!("constant-{j}"),
            JammerStrategy::Iid(q) => {
                let p: Vec<String> = q.iter().map(|v| format!("{v}")).collect();
                format!("iid({})", p.join(","))
            }
            JammerStrategy::Periodic(p) => {
                let s: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                format!("periodic({})", s.join(""))
            }
            JammerStrategy::Symmetrizing { target, .. } => match target {
                SymTarget::Input => "symmetrizing-input".into(),
                SymTarget::Aux => "symmetrizing-aux".into(),
                SymTarget::State => "symmetrizing-state".into(),
            },
            JammerStrategy::MessageAware { .. } => "message-aware".into(),
        }
    }

    /// Checks the strategy against the codebook's alphabets.
    pub fn validate(&self, cb: &Codebook) -> Result<()> {
        let (nx, ns, nj) = alphabets(&cb.refs);
        let bad = |msg: String| Err(Error::Config(msg));
        match self {
            JammerStrategy::Constant(j) if *j >= nj => bad(format!("jammer symbol {j} >= {nj}")),
            JammerStrategy::Iid(q) => {
                if q.len() != nj {
                    return bad(format!("Q_J has {} entries, |J| = {nj}", q.len()));
                }
                crate::channel::check_distribution(q, 1e-9, &[])
            }
            JammerStrategy::Periodic(p) if p.is_empty() => bad("empty jamming pattern".into()),
            JammerStrategy::Periodic(p) if p.iter().any(|&j| j >= nj) => {
                bad(format!("pattern symbol outside 0..{nj}"))
            }
            JammerStrategy::Symmetrizing { kernel, target } => {
                let rows = match target {
                    SymTarget::Input => nx,
                    SymTarget::Aux => cb.nu(),
                    SymTarget::State => ns,
                };
                if kernel.rows() != rows || kernel.cols() != nj {
                    return bad(format!(
                        "symmetrizing kernel must be {rows}x{nj}, got {}x{}",
                        kernel.rows(),
                        kernel.cols()
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

pub(crate) fn alphabets(refs: &PsiRefs) -> (usize, usize, usize) {
    match refs {
        PsiRefs::StrictlyCausal { nx, ns, nj, .. } | PsiRefs::Noncausal { nx, ns, nj, .. } => {
            (*nx, *ns, *nj)
        }
    }
}

/// Draws `j^n` for a jammer that ignores the message.
pub(crate) fn oblivious_jam<R: Rng + ?Sized>(
    strategy: &JammerStrategy,
    cb: &Codebook,
    q_s: &[f64],
    rng: &mut R,
) -> Vec<usize> {
    let n = cb.n;
    match strategy {
        JammerStrategy::Constant(j) => vec![*j; n],
        JammerStrategy::Iid(q) => (0..n).map(|_| sample(q, rng)).collect(),
        JammerStrategy::Periodic(p) => (0..n).map(|i| p[i % p.len()]).collect(),
        JammerStrategy::Symmetrizing { kernel, target } => {
            let fake: Vec<usize> = match (target, &cb.refs) {
                (SymTarget::State, _) => (0..n).map(|_| sample(q_s, rng)).collect(),
                (SymTarget::Input, PsiRefs::StrictlyCausal { .. }) => {
                    cb.x_words[rng.gen_range(0..cb.x_words.len())].clone()
                }
                (SymTarget::Input, PsiRefs::Noncausal { nx, ns, q_x_us, .. }) => {
                    let u = random_u_word(cb, rng);
                    u.iter()
                        .map(|&ui| {
                            let s = sample(q_s, rng);
                            sample(&q_x_us[(ui * ns + s) * nx..(ui * ns + s + 1) * nx], rng)
                        })
                        .collect()
                }
                (SymTarget::Aux, _) => random_u_word(cb, rng),
            };
            fake.iter().map(|&a| sample(kernel.row(a), rng)).collect()
        }
        JammerStrategy::MessageAware { .. } => {
            unreachable!("message-aware jamming is resolved by the trial loop")
        }
    }
}

fn random_u_word<R: Rng + ?Sized>(cb: &Codebook, rng: &mut R) -> Vec<usize> {
    let list = &cb.u_words[rng.gen_range(0..cb.u_words.len())];
    if list.is_empty() {
        return vec![0; cb.n];
    }
    list[rng.gen_range(0..list.len())].clone()
}

/// Every `j^n` in lexicographic order.
pub(crate) fn all_sequences(nj: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = (nj as u64).pow(n as u32);
    (0..total).map(move |mut k| {
        let mut s = vec![0; n];
        for i in (0..n).rev() {
            s[i] = (k % nj as u64) as usize;
            k /= nj as u64;
        }
        s
    })
}
