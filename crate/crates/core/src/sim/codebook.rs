use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::psi::PsiRefs;
use super::types::{draw_conditional, draw_from_counts, round_conditional, round_to_type};
use crate::bounds::{CodingMode, RatePlan};
use crate::channel::{joint_type, AuxLaw, Kernel, StateChannel};
use crate::error::{Error, Result};

/// Default cap on the number of stored codewords.
pub const DEFAULT_MAX_WORDS: usize = 1 << 21;

/// `floor(2^(n rate))`, at least one.
pub fn codebook_size(n: usize, rate: f64) -> f64 {
    (n as f64 * rate).exp2().floor().max(1.0)
}

/// Random constant-composition codebook with random binning.
///
/// Strictly causal: `x_words[m * n_bins + l]` carries message `m` and state
/// description `l`; `u_words[m * n_bins + l]` is its subcodebook of
/// description words, each with a bin label in `0..n_bins`. Noncausal:
/// `u_words[0]` is the flat list and `bins[0][i]` the message of word `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    pub mode: CodingMode,
    pub n: usize,
    pub plan: RatePlan,
    pub messages: usize,
    /// Strictly causal: number of description bins `2^{nR_S}`; noncausal: 1.
    pub n_bins: usize,
    /// Composition of every x-word (strictly causal) or u-word (noncausal).
    pub base_type: Vec<u32>,
    /// Strictly causal: cells `N(x) Q(u|x)` of the description words.
    pub conditional_cells: Vec<Vec<u32>>,
    /// Largest per-letter gap left by rounding the laws to types.
    pub rounding_gap: f64,
    pub x_words: Vec<Vec<usize>>,
    pub u_words: Vec<Vec<Vec<usize>>>,
    pub bins: Vec<Vec<usize>>,
    pub good_flags: Vec<Vec<bool>>,
    pub refs: PsiRefs,
}

impl Codebook {
    pub fn nu(&self) -> usize {
        match &self.refs {
            PsiRefs::StrictlyCausal { nu, .. } | PsiRefs::Noncausal { nu, .. } => *nu,
        }
    }

    /// Noncausal: `(m, l)` of word `i`, `l` counting earlier words of bin `m`.
    pub fn message_of(&self, i: usize) -> (usize, usize) {
        let m = self.bins[0][i];
        (m, self.bins[0][..i].iter().filter(|&&b| b == m).count())
    }

    /// Noncausal: indices of the words in message bin `m`.
    pub fn bin_members(&self, m: usize) -> Vec<usize> {
        (0..self.bins[0].len())
            .filter(|&i| self.bins[0][i] == m)
            .collect()
    }
}

/// Draws a codebook for `aux` at blocklength `n` and the rates of `plan`.
pub fn build_codebook(
    ch: &StateChannel,
    aux: &AuxLaw,
    plan: &RatePlan,
    n: usize,
    seed: u64,
    max_words: usize,
) -> Result<Codebook> {
    if n == 0 {
        return Err(Error::Config("blocklength must be positive".into()));
    }
    let refs = PsiRefs::new(ch, aux)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match aux {
        AuxLaw::StrictlyCausal { q_x, .. } => {
            if plan.mode != CodingMode::StrictlyCausal {
                return Err(Error::Config("rate plan is not strictly causal".into()));
            }
            let messages = codebook_size(n, plan.r);
            let n_bins = codebook_size(n, plan.r_s);
            let sub = codebook_size(n, plan.r_s_tilde);
            let required = messages * n_bins * (1.0 + sub);
            if required > max_words as f64 {
                return Err(Error::SizeOverflow {
                    required,
                    budget: max_words,
                });
            }
            let (messages, n_bins, sub) = (messages as usize, n_bins as usize, sub as usize);
            let (base, gap_x) = round_to_type(q_x, n);
            let PsiRefs::StrictlyCausal { nx, nu, q_u_x, .. } = &refs else {
                unreachable!()
            };
            let k_ux = Kernel::from_flat_unchecked(*nx, *nu, q_u_x.clone());
            let (cells, gap_u) = round_conditional(&k_ux, &base);
            let x_words: Vec<Vec<usize>> = (0..messages * n_bins)
                .map(|_| draw_from_counts(&base, &mut rng))
                .collect();
            let mut u_words = Vec::with_capacity(x_words.len());
            let mut bins = Vec::with_capacity(x_words.len());
            for x in &x_words {
                u_words.push(
                    (0..sub)
                        .map(|_| draw_conditional(&cells, x, &mut rng))
                        .collect::<Vec<_>>(),
                );
                bins.push(
                    (0..sub)
                        .map(|_| rng.gen_range(0..n_bins))
                        .collect::<Vec<_>>(),
                );
            }
            let good_flags = vec![vec![true; sub]; x_words.len()];
            Ok(Codebook {
                mode: CodingMode::StrictlyCausal,
                n,
                plan: plan.clone(),
                messages,
                n_bins,
                base_type: base,
                conditional_cells: cells,
                rounding_gap: gap_x.max(gap_u / n as f64),
                x_words,
                u_words,
                bins,
                good_flags,
                refs,
            })
        }
        AuxLaw::Noncausal { .. } => {
            if plan.mode != CodingMode::Noncausal {
                return Err(Error::Config("rate plan is not noncausal".into()));
            }
            let messages = codebook_size(n, plan.r);
            let total = codebook_size(n, plan.r_s_tilde).max(messages);
            if total > max_words as f64 {
                return Err(Error::SizeOverflow {
                    required: total,
                    budget: max_words,
                });
            }
            let (messages, total) = (messages as usize, total as usize);
            let PsiRefs::Noncausal { nu, ns, q_us, .. } = &refs else {
                unreachable!()
            };
            let q_u: Vec<f64> = (0..*nu)
                .map(|u| q_us[u * ns..(u + 1) * ns].iter().sum())
                .collect();
            let (base, gap) = round_to_type(&q_u, n);
            let words: Vec<Vec<usize>> = (0..total)
                .map(|_| draw_from_counts(&base, &mut rng))
                .collect();
            let bins: Vec<usize> = (0..total).map(|_| rng.gen_range(0..messages)).collect();
            let good = good_codewords(&words, *nu, plan.r_s_tilde)?;
            Ok(Codebook {
                mode: CodingMode::Noncausal,
                n,
                plan: plan.clone(),
                messages,
                n_bins: 1,
                base_type: base,
                conditional_cells: Vec::new(),
                rounding_gap: gap,
                x_words: Vec::new(),
                u_words: vec![words],
                bins: vec![bins],
                good_flags: vec![good],
                refs,
            })
        }
    }
}

/// Empirical `I(a;b)` in bits of two sequences.
pub(crate) fn empirical_mi(a: &[usize], b: &[usize], na: usize, nb: usize) -> Result<f64> {
    joint_type(&[a, b], &[na, nb])?
        .to_distribution()
        .mutual_information(&[0], &[1], &[])
}

/// Word `i` is good when `I(u_i; u_j) < r_tilde` for every other word `j`.
pub fn good_codewords(words: &[Vec<usize>], nu: usize, r_tilde: f64) -> Result<Vec<bool>> {
    let mut good = vec![true; words.len()];
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            if empirical_mi(&words[i], &words[j], nu, nu)? >= r_tilde {
                good[i] = false;
                good[j] = false;
            }
        }
    }
    Ok(good)
}

/// Summary of a codebook's statistical health.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookAudit {
    pub words: usize,
    pub good_fraction: f64,
    /// Occupancy of every bin (noncausal: message bins; strictly causal:
    /// description bins of every subcodebook, concatenated).
    pub bin_sizes: Vec<usize>,
    pub bin_mean: f64,
    /// Binomial standard deviation of a bin size under uniform binning.
    pub bin_sigma: f64,
    /// Largest `|size - mean| / sigma` over bins.
    pub bin_max_z: f64,
    /// Largest ratio of a joint-type shell's occupancy to its budget
    /// `2^{n(|R~ - I|^+ + delta)}` over the sampled jamming sequences.
    pub shell_max_ratio: f64,
    pub shells_checked: usize,
    pub shell_violations: usize,
}

/// Reports the good-word fraction, bin spread and, for a sample of
/// jamming sequences, the occupancy of the joint-type shells around each
/// word.
pub fn audit_codebook(
    cb: &Codebook,
    delta: f64,
    samples: usize,
    seed: u64,
) -> Result<CodebookAudit> {
    let (nj, nx) = match &cb.refs {
        PsiRefs::StrictlyCausal { nj, nx, .. } => (*nj, *nx),
        PsiRefs::Noncausal { nj, .. } => (*nj, 0),
    };
    let total_good: usize = cb.good_flags.iter().flatten().filter(|&&g| g).count();
    let words: usize = cb.good_flags.iter().map(Vec::len).sum();
    let (bin_sizes, slots, per) = match cb.mode {
        CodingMode::Noncausal => {
            let mut sizes = vec![0usize; cb.messages];
            cb.bins[0].iter().for_each(|&b| sizes[b] += 1);
            (sizes, cb.messages, cb.u_words[0].len())
        }
        CodingMode::StrictlyCausal => {
            let mut sizes = Vec::new();
            for b in &cb.bins {
                let mut s = vec![0usize; cb.n_bins];
                b.iter().for_each(|&v| s[v] += 1);
                sizes.extend(s);
            }
            (sizes, cb.n_bins, cb.bins.first().map_or(0, Vec::len))
        }
    };
    let p = 1.0 / slots as f64;
    let bin_mean = per as f64 * p;
    let bin_sigma = (per as f64 * p * (1.0 - p)).sqrt();
    let bin_max_z = if bin_sigma > 0.0 {
        bin_sizes
            .iter()
            .map(|&s| (s as f64 - bin_mean).abs() / bin_sigma)
            .fold(0.0, f64::max)
    } else {
        0.0
    };

    // shells: list of words, their alphabet and their rate
    let (list, alpha, rate): (&[Vec<usize>], usize, f64) = match cb.mode {
        CodingMode::Noncausal => (&cb.u_words[0], cb.nu(), cb.plan.r_s_tilde),
        CodingMode::StrictlyCausal => (&cb.x_words, nx, cb.plan.r + cb.plan.r_s),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio: f64 = 0.0;
    let (mut checked, mut violations) = (0, 0);
    let n = cb.n as f64;
    for _ in 0..samples {
        let j: Vec<usize> = (0..cb.n).map(|_| rng.gen_range(0..nj)).collect();
        let i = rng.gen_range(0..list.len());
        let mut shells: std::collections::HashMap<Vec<u32>, usize> = Default::default();
        for (k, w) in list.iter().enumerate() {
            if k == i {
                continue;
            }
            let t = joint_type(&[w, &list[i], &j], &[alpha, alpha, nj])?;
            *shells.entry(t.counts().to_vec()).or_default() += 1;
        }
        for (counts, occ) in shells {
            let t = crate::channel::JointType::from_counts(vec![alpha, alpha, nj], counts)?;
            let i_v = t.to_distribution().mutual_information(&[0], &[1, 2], &[])?;
            let budget = (n * ((rate - i_v).max(0.0) + delta)).exp2();
            let ratio = occ as f64 / budget;
            max_ratio = max_ratio.max(ratio);
            checked += 1;
            if ratio > 1.0 {
                violations += 1;
            }
        }
    }
    Ok(CodebookAudit {
        words,
        good_fraction: if words == 0 {
            1.0
        } else {
            total_good as f64 / words as f64
        },
        bin_sizes,
        bin_mean,
        bin_sigma,
        bin_max_z,
        shell_max_ratio: max_ratio,
        shells_checked: checked,
        shell_violations: violations,
    })
}
