//! Small-blocklength Monte Carlo of the typicality coding schemes:
//! constant-composition codebooks with random binning, covering encoders,
//! decoders that search exactly over the hidden jamming (and state)
//! sequence at the level of joint types, configurable jammers, and batch
//! statistics.

mod codebook;
mod coder;
mod jammer;
mod psi;
mod trials;
mod types;
mod witness;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use codebook::{
    audit_codebook, build_codebook, codebook_size, good_codewords, Codebook, CodebookAudit,
    DEFAULT_MAX_WORDS,
};
pub use coder::{
    decode_description, decode_message, encode, estimate_state, DecodeOutcome, EncodeOutcome,
    EncoderInput, DEFAULT_SEARCH_BUDGET,
};
pub use jammer::{JammerStrategy, SymTarget};
pub use psi::{psi_membership, Psi, PsiRefs};
pub use trials::{
    decoding_cells, run_on_codebook, run_trials, stats_to_csv, SimConfig, TrialStats,
};
pub use types::{
    conditional_cells, draw_conditional, draw_from_counts, round_conditional, round_to_type,
    sample_conditional_type_class, sample_type_class, type_counts,
};

/// Thresholds of the encoder and decoder tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypicalityParams {
    /// Divergence and mutual-information threshold of the decoder, bits.
    pub eta: f64,
    /// Covering threshold of the noncausal encoder, bits.
    pub delta: f64,
    /// Rate slack the plan was built with.
    pub tau: f64,
}

/// Multiplier of the type-fluctuation scale in the default threshold.
pub const ETA_FLOOR_FACTOR: f64 = 2.0;

impl TypicalityParams {
    pub fn new(eta: f64, delta: f64, tau: f64) -> Result<Self> {
        if !(eta > 0.0 && delta > 0.0 && tau > 0.0) {
            return Err(Error::Config(format!(
                "typicality parameters must be positive (eta {eta}, delta {delta}, tau {tau})"
            )));
        }
        Ok(Self { eta, delta, tau })
    }

    /// `eta = 4 cells log2(n + 1) / n`, `delta = eta / 2`. By the type
    /// counting bound this holds the type of the true law with overwhelming
    /// probability; at blocklengths below a few dozen it exceeds every
    /// mutual information involved, so the tests reduce to support checks.
    pub fn for_blocklength(n: usize, cells: usize, tau: f64) -> Self {
        let eta = 4.0 * cells as f64 * ((n + 1) as f64).log2() / n.max(1) as f64;
        Self {
            eta,
            delta: eta / 2.0,
            tau,
        }
    }

    /// `eta = c (cells - 1) / (2 n ln 2)` with `c = ETA_FLOOR_FACTOR`, a
    /// multiple of the mean divergence of an empirical type with `cells`
    /// cells from its law; `delta = eta / 2`. Sharper than
    /// [`Self::for_blocklength`], at the price of rejecting the true
    /// codeword with non-vanishing probability.
    pub fn fluctuation_floor(n: usize, cells: usize, tau: f64) -> Self {
        let eta = ETA_FLOOR_FACTOR * (cells.max(2) - 1) as f64
            / (2.0 * n.max(1) as f64 * std::f64::consts::LN_2);
        Self {
            eta,
            delta: eta / 2.0,
            tau,
        }
    }
}
