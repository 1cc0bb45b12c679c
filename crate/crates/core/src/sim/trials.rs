use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::codebook::{build_codebook, Codebook, DEFAULT_MAX_WORDS};
use super::coder::{
    decode_description, decode_message, encode, estimate_state, sample, DecodeOutcome,
    EncodeOutcome, EncoderInput, DEFAULT_SEARCH_BUDGET,
};
use super::jammer::{all_sequences, alphabets, oblivious_jam, JammerStrategy};
use super::TypicalityParams;
use crate::bounds::{CodingMode, RatePlan};
use crate::channel::{AuxLaw, Estimator, StateChannel};
use crate::error::{Error, Result};

/// Everything a batch of simulated transmissions needs besides the channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub aux: AuxLaw,
    pub plan: RatePlan,
    pub estimator: Estimator,
    /// `None` picks [`TypicalityParams::for_blocklength`] per `n`.
    pub params: Option<TypicalityParams>,
    pub jammers: Vec<JammerStrategy>,
    pub n_list: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub search_budget: u64,
    pub max_words: usize,
}

impl SimConfig {
    pub fn new(aux: AuxLaw, plan: RatePlan, estimator: Estimator) -> Self {
        Self {
            aux,
            plan,
            estimator,
            params: None,
            jammers: vec![JammerStrategy::Constant(0)],
            n_list: vec![8],
            trials: 100,
            seed: 0,
            search_budget: DEFAULT_SEARCH_BUDGET,
            max_words: DEFAULT_MAX_WORDS,
        }
    }
}

/// Aggregate over the trials of one `(jammer, n)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub jammer: String,
    pub n: usize,
    pub trials: usize,
    pub messages: usize,
    pub eta: f64,
    /// Fraction of trials whose message was not recovered, counting
    /// encoder failures and decoder failures as errors.
    pub avg_error: f64,
    pub avg_error_std: f64,
    /// Largest per-message error rate among messages that occurred.
    pub max_error: f64,
    /// Mean per-letter distortion of the state estimate; trials without an
    /// estimate are charged the largest distortion value.
    pub distortion: f64,
    pub distortion_std: f64,
    pub covering_failures: usize,
    pub ambiguities: usize,
    pub no_candidate: usize,
    pub bad_codeword_errors: usize,
    pub explosions: usize,
    /// Strictly causal: trials whose state description was lost.
    pub description_errors: usize,
    /// Decoded indices whose conditions failed the sequence-level re-check.
    pub unverified: usize,
    /// Other per-trial errors.
    pub failures: usize,
}

impl TrialStats {
    pub const CSV_HEADER: &'static str =
        "jammer,n,trials,avg_error,max_error,distortion,covering_failures,ambiguities,bad_codeword_errors";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.jammer,
            self.n,
            self.trials,
            self.avg_error,
            self.max_error,
            self.distortion,
            self.covering_failures,
            self.ambiguities,
            self.bad_codeword_errors
        )
    }
}

/// CSV rendering of a batch, one row per `(jammer, n)`.
pub fn stats_to_csv(stats: &[TrialStats]) -> String {
    let mut out = String::from(TrialStats::CSV_HEADER);
    out.push('\n');
    for s in stats {
        out.push_str(&s.csv_row());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Default)]
struct Outcome {
    message: usize,
    error: bool,
    distortion: f64,
    covering: bool,
    bad: bool,
    ambiguous: usize,
    no_candidate: usize,
    explosion: bool,
    description_lost: bool,
    unverified: usize,
    failure: bool,
}

impl Outcome {
    fn tally(&mut self, d: &DecodeOutcome) {
        match d {
            DecodeOutcome::Ambiguous { .. } => self.ambiguous += 1,
            DecodeOutcome::NoCandidate => self.no_candidate += 1,
            DecodeOutcome::Decoded { verified, .. } => {
                if !verified {
                    self.unverified += 1;
                }
            }
        }
    }
}

/// Runs every `(jammer, n)` pair of `cfg` on a fresh codebook per `n`.
///
/// Each trial draws from its own ChaCha stream keyed by the seed, `n`, the
/// jammer and the trial index, so the result does not depend on how rayon
/// schedules the trials.
pub fn run_trials(ch: &StateChannel, cfg: &SimConfig) -> Result<Vec<TrialStats>> {
    let mut out = Vec::new();
    for &n in &cfg.n_list {
        let cb = build_codebook(
            ch,
            &cfg.aux,
            &cfg.plan,
            n,
            stream_seed(cfg.seed, n),
            cfg.max_words,
        )?;
        for (ji, jammer) in cfg.jammers.iter().enumerate() {
            out.push(run_on_codebook(ch, &cb, cfg, jammer, ji)?);
        }
    }
    Ok(out)
}

fn stream_seed(seed: u64, n: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (n as u64).wrapping_mul(0xD1B5_4A32_D192_ED03)
}

/// Runs `cfg.trials` transmissions over a given codebook with one jammer.
pub fn run_on_codebook(
    ch: &StateChannel,
    cb: &Codebook,
    cfg: &SimConfig,
    jammer: &JammerStrategy,
    jammer_index: usize,
) -> Result<TrialStats> {
    jammer.validate(cb)?;
    let params = cfg
        .params
        .unwrap_or_else(|| default_params(cb, cfg.plan.tau));
    let d_max = ch
        .distortion()
        .iter()
        .flatten()
        .copied()
        .fold(0.0, f64::max);
    let outcomes: Vec<Outcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(((cb.n as u64) << 48) ^ ((jammer_index as u64) << 32) ^ t as u64);
            let run = match cb.mode {
                CodingMode::Noncausal => {
                    noncausal_trial(ch, cb, cfg, jammer, &params, d_max, &mut rng)
                }
                CodingMode::StrictlyCausal => {
                    strictly_causal_trial(ch, cb, cfg, jammer, &params, d_max, &mut rng)
                }
            };
            run.unwrap_or_else(|e| Outcome {
                error: true,
                distortion: d_max,
                explosion: matches!(e, Error::ExplosionGuard { .. }),
                failure: !matches!(e, Error::ExplosionGuard { .. }),
                ..Outcome::default()
            })
        })
        .collect();
    Ok(aggregate(jammer.name(), cb, params.eta, &outcomes))
}

fn default_params(cb: &Codebook, tau: f64) -> TypicalityParams {
    TypicalityParams::for_blocklength(cb.n, decoding_cells(cb), tau)
}

/// Number of cells of the largest joint type the decoder tests.
pub fn decoding_cells(cb: &Codebook) -> usize {
    match &cb.refs {
        super::PsiRefs::StrictlyCausal { nx, nu, nj, ny, .. } => nx * nu * nj * ny,
        super::PsiRefs::Noncausal { nu, nj, ny, .. } => nu * nj * ny,
    }
}

fn aggregate(jammer: String, cb: &Codebook, eta: f64, o: &[Outcome]) -> TrialStats {
    let t = o.len().max(1) as f64;
    let errors = o.iter().filter(|v| v.error).count() as f64;
    let p = errors / t;
    let mean_d = o.iter().map(|v| v.distortion).sum::<f64>() / t;
    let var_d = o
        .iter()
        .map(|v| (v.distortion - mean_d).powi(2))
        .sum::<f64>()
        / (t - 1.0).max(1.0);
    let mut per: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for v in o {
        let e = per.entry(v.message).or_default();
        e.0 += 1;
        e.1 += v.error as usize;
    }
    let max_error = per
        .values()
        .map(|&(n, e)| e as f64 / n as f64)
        .fold(0.0, f64::max);
    TrialStats {
        jammer,
        n: cb.n,
        trials: o.len(),
        messages: cb.messages,
        eta,
        avg_error: p,
        avg_error_std: (p * (1.0 - p) / t).sqrt(),
        max_error,
        distortion: mean_d,
        distortion_std: (var_d / t).sqrt(),
        covering_failures: o.iter().filter(|v| v.covering).count(),
        ambiguities: o.iter().map(|v| v.ambiguous).sum(),
        no_candidate: o.iter().map(|v| v.no_candidate).sum(),
        bad_codeword_errors: o.iter().filter(|v| v.bad).count(),
        explosions: o.iter().filter(|v| v.explosion).count(),
        description_errors: o.iter().filter(|v| v.description_lost).count(),
        unverified: o.iter().map(|v| v.unverified).sum(),
        failures: o.iter().filter(|v| v.failure).count(),
    }
}

fn channel_output(
    ch: &StateChannel,
    x: &[usize],
    s: &[usize],
    j: &[usize],
    noise: &[f64],
) -> Vec<usize> {
    (0..x.len())
        .map(|i| {
            let row = ch.row(x[i], s[i], j[i]);
            let mut acc = 0.0;
            for (y, &p) in row.iter().enumerate() {
                acc += p;
                if noise[i] < acc {
                    return y;
                }
            }
            row.iter().rposition(|&p| p > 0.0).unwrap_or(0)
        })
        .collect()
}

fn mean_distortion(ch: &StateChannel, s: &[usize], s_hat: &[usize]) -> f64 {
    let d = ch.distortion();
    s.iter().zip(s_hat).map(|(&a, &b)| d[a][b]).sum::<f64>() / s.len().max(1) as f64
}

/// Jamming sequence for one block: oblivious draw, or the first sequence
/// under which `fails` holds.
fn block_jam<R: Rng + ?Sized>(
    jammer: &JammerStrategy,
    cb: &Codebook,
    q_s: &[f64],
    rng: &mut R,
    mut fails: impl FnMut(&[usize]) -> Result<bool>,
) -> Result<Vec<usize>> {
    match jammer {
        JammerStrategy::MessageAware { budget } => {
            let nj = alphabets(&cb.refs).2;
            let total = (nj as f64).powi(cb.n as i32);
            if total > *budget as f64 {
                return Err(Error::ExplosionGuard {
                    required: total,
                    budget: *budget as f64,
                });
            }
            for j in all_sequences(nj, cb.n) {
                if fails(&j)? {
                    return Ok(j);
                }
            }
            Ok(vec![0; cb.n])
        }
        _ => Ok(oblivious_jam(jammer, cb, q_s, rng)),
    }
}

fn noncausal_trial(
    ch: &StateChannel,
    cb: &Codebook,
    cfg: &SimConfig,
    jammer: &JammerStrategy,
    params: &TypicalityParams,
    d_max: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Outcome> {
    let n = cb.n;
    let m = rng.gen_range(0..cb.messages);
    let s: Vec<usize> = (0..n).map(|_| sample(ch.q_s(), rng)).collect();
    let mut out = Outcome {
        message: m,
        ..Outcome::default()
    };
    let x = match encode(cb, m, EncoderInput::Noncausal { s: &s }, params, rng)? {
        EncodeOutcome::Sent { x, .. } => x,
        EncodeOutcome::CoveringFailure => {
            out.covering = true;
            out.error = true;
            out.distortion = d_max;
            return Ok(out);
        }
        EncodeOutcome::BadCodewordSelected { .. } => {
            out.bad = true;
            out.error = true;
            out.distortion = d_max;
            return Ok(out);
        }
    };
    let noise: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
    let (eta, budget) = (params.eta, cfg.search_budget);
    let wrong = |d: &DecodeOutcome| !matches!(d, DecodeOutcome::Decoded { index, .. } if cb.bins[0][*index] == m);
    let j = block_jam(jammer, cb, ch.q_s(), rng, |j| {
        let y = channel_output(ch, &x, &s, j, &noise);
        Ok(wrong(&decode_message(cb, &y, eta, budget)?))
    })?;
    let y = channel_output(ch, &x, &s, &j, &noise);
    let dec = decode_message(cb, &y, eta, budget)?;
    out.tally(&dec);
    out.error = wrong(&dec);
    out.distortion = match &dec {
        DecodeOutcome::Decoded { index, .. } => {
            let s_hat = estimate_state(&cb.u_words[0][*index], &[], &y, &cfg.estimator)?;
            mean_distortion(ch, &s, &s_hat)
        }
        _ => d_max,
    };
    Ok(out)
}

fn strictly_causal_trial(
    ch: &StateChannel,
    cb: &Codebook,
    cfg: &SimConfig,
    jammer: &JammerStrategy,
    params: &TypicalityParams,
    d_max: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Outcome> {
    let n = cb.n;
    let (eta, budget) = (params.eta, cfg.search_budget);
    let m1 = rng.gen_range(0..cb.messages);
    let l1 = rng.gen_range(0..cb.n_bins);
    let m2 = rng.gen_range(0..cb.messages);
    let mut out = Outcome {
        message: m1 * cb.messages + m2,
        ..Outcome::default()
    };
    let wrong = |d: &DecodeOutcome, word: usize| !matches!(d, DecodeOutcome::Decoded { index, .. } if *index == word);

    // block 1
    let s1: Vec<usize> = (0..n).map(|_| sample(ch.q_s(), rng)).collect();
    let word1 = m1 * cb.n_bins + l1;
    let x1 = cb.x_words[word1].clone();
    let noise1: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
    let j1 = block_jam(jammer, cb, ch.q_s(), rng, |j| {
        let y = channel_output(ch, &x1, &s1, j, &noise1);
        Ok(wrong(&decode_message(cb, &y, eta, budget)?, word1))
    })?;
    let y1 = channel_output(ch, &x1, &s1, &j1, &noise1);

    // block 2 carries m2 and the description of s1
    let enc = encode(
        cb,
        m2,
        EncoderInput::NextBlock {
            m_prev: m1,
            l_prev: l1,
            s_prev: &s1,
        },
        params,
        rng,
    )?;
    let (x2, word2, k) = match enc {
        EncodeOutcome::Sent {
            x,
            word,
            description,
            ..
        } => (x, word, description),
        EncodeOutcome::CoveringFailure => {
            out.covering = true;
            out.error = true;
            out.description_lost = true;
            out.distortion = d_max;
            return Ok(out);
        }
        EncodeOutcome::BadCodewordSelected { .. } => {
            unreachable!("strictly causal words are all good")
        }
    };
    let s2: Vec<usize> = (0..n).map(|_| sample(ch.q_s(), rng)).collect();
    let noise2: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
    let j2 = block_jam(jammer, cb, ch.q_s(), rng, |j| {
        let y = channel_output(ch, &x2, &s2, j, &noise2);
        Ok(wrong(&decode_message(cb, &y, eta, budget)?, word2))
    })?;
    let y2 = channel_output(ch, &x2, &s2, &j2, &noise2);

    let d1 = decode_message(cb, &y1, eta, budget)?;
    let d2 = decode_message(cb, &y2, eta, budget)?;
    out.tally(&d1);
    out.tally(&d2);
    let m_of = |d: &DecodeOutcome| match d {
        DecodeOutcome::Decoded { index, .. } => Some(*index),
        _ => None,
    };
    let (w1, w2) = (m_of(&d1), m_of(&d2));
    out.error = w1.map(|w| w / cb.n_bins) != Some(m1) || w2.map(|w| w / cb.n_bins) != Some(m2);
    out.distortion = d_max;
    out.description_lost = true;
    if let (Some(w1), Some(w2)) = (w1, w2) {
        let bin = w2 % cb.n_bins;
        let db = decode_description(cb, w1, bin, &y1, eta, budget)?;
        out.tally(&db);
        // survivors that share one sequence still give a usable estimate
        let chosen = match &db {
            DecodeOutcome::Decoded { index, .. } => Some(*index),
            DecodeOutcome::Ambiguous { survivors } => {
                let first = &cb.u_words[w1][survivors[0]];
                survivors
                    .iter()
                    .all(|&i| &cb.u_words[w1][i] == first)
                    .then_some(survivors[0])
            }
            DecodeOutcome::NoCandidate => None,
        };
        if let Some(index) = chosen {
            let u_hat = &cb.u_words[w1][index];
            out.description_lost = w1 != word1 || k.is_none_or(|k| &cb.u_words[word1][k] != u_hat);
            let s_hat = estimate_state(u_hat, &cb.x_words[w1], &y1, &cfg.estimator)?;
            out.distortion = mean_distortion(ch, &s1, &s_hat);
        }
    }
    Ok(out)
}
