use serde::{Deserialize, Serialize};

use crate::channel::AVChannel;
use crate::error::{Error, Result};

/// Default cap on `|J|^n * |Y|^n`.
pub const DEFAULT_PROBE_BUDGET: f64 = 1e8;

/// Decoder given as a table over all output sequences in lexicographic
/// order (`y_0` most significant). Entries at or beyond the number of
/// messages are erasures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeTable {
    pub n: usize,
    pub ny: usize,
    pub table: Vec<usize>,
}

impl DecodeTable {
    pub fn from_fn(n: usize, ny: usize, f: impl Fn(&[usize]) -> usize) -> Self {
        let total = ny.pow(n as u32);
        let mut y = vec![0; n];
        let table = (0..total)
            .map(|idx| {
                decode_index(idx, ny, &mut y);
                f(&y)
            })
            .collect();
        Self { n, ny, table }
    }
}

fn decode_index(mut idx: usize, base: usize, out: &mut [usize]) {
    for k in (0..out.len()).rev() {
        out[k] = idx % base;
        idx /= base;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    /// `max_{j^n, m} P(decode != m | m, j^n)`.
    pub max_error: f64,
    pub worst_message: usize,
    pub worst_jamming: Vec<usize>,
}

/// Exact worst-case error of a code over every jamming sequence, by full
/// enumeration of `J^n x Y^n`.
pub fn converse_probe(
    avc: &AVChannel,
    codewords: &[Vec<usize>],
    decoder: &DecodeTable,
    budget: f64,
) -> Result<ProbeResult> {
    let n = decoder.n;
    let (nj, ny) = (avc.nj(), avc.ny());
    if decoder.ny != ny || decoder.table.len() != ny.pow(n as u32) {
        return Err(Error::DimensionMismatch(
            "decode table does not cover the output space".into(),
        ));
    }
    for (m, cw) in codewords.iter().enumerate() {
        if cw.len() != n {
            return Err(Error::LengthMismatch(format!(
                "codeword {m} has length {}, n = {n}",
                cw.len()
            )));
        }
        if let Some((pos, &x)) = cw.iter().enumerate().find(|(_, &x)| x >= avc.n_in()) {
            return Err(Error::SymbolOutOfRange {
                sequence: m,
                position: pos,
                symbol: x,
                alphabet: avc.n_in(),
            });
        }
    }
    let required = (nj as f64).powi(n as i32) * (ny as f64).powi(n as i32);
    if required > budget {
        return Err(Error::ExplosionGuard { required, budget });
    }
    let mut best = ProbeResult {
        max_error: 0.0,
        worst_message: 0,
        worst_jamming: vec![0; n],
    };
    let n_j = nj.pow(n as u32);
    let n_y = ny.pow(n as u32);
    let mut js = vec![0; n];
    let mut ys = vec![0; n];
    for jidx in 0..n_j {
        decode_index(jidx, nj, &mut js);
        for (m, cw) in codewords.iter().enumerate() {
            let mut correct = 0.0;
            for yidx in 0..n_y {
                if decoder.table[yidx] != m {
                    continue;
                }
                decode_index(yidx, ny, &mut ys);
                let mut p = 1.0;
                for t in 0..n {
                    p *= avc.q(cw[t], js[t], ys[t]);
                    if p == 0.0 {
                        break;
                    }
                }
                correct += p;
            }
            let err = 1.0 - correct;
            if err > best.max_error {
                best = ProbeResult {
                    max_error: err,
                    worst_message: m,
                    worst_jamming: js.clone(),
                };
            }
        }
    }
    Ok(best)
}
