//! Scalar information measures on finite distributions. All logarithms are
//! base 2, so every value is in bits.

use crate::error::{Error, Result};

/// Row-sum tolerance for internally constructed distributions.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// `p log2 p` with the convention `0 log 0 = 0`.
#[inline]
pub fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.log2()
    }
}

/// Shannon entropy in bits.
///
/// ```
/// use avc_jsc::channel::entropy;
/// assert!((entropy(&[0.5, 0.5]) - 1.0).abs() < 1e-15);
/// assert_eq!(entropy(&[1.0, 0.0]), 0.0);
/// ```
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().map(|&v| plogp(v)).sum::<f64>()
}

/// Binary entropy function.
pub fn binary_entropy(p: f64) -> f64 {
    entropy(&[p, 1.0 - p])
}

/// Relative entropy `D(p || q)` in bits. Returns `+inf` when `p` charges a
/// symbol that `q` does not.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "kl_divergence: |p| = {}, |q| = {}",
            p.len(),
            q.len()
        )));
    }
    Ok(kl_unchecked(p, q))
}

pub(crate) fn kl_unchecked(p: &[f64], q: &[f64]) -> f64 {
    let mut d = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a <= 0.0 {
            continue;
        }
        if b <= 0.0 {
            return f64::INFINITY;
        }
        d += a * (a / b).log2();
    }
    d.max(0.0)
}

/// Checks that `p` is a distribution: finite, nonnegative, summing to one
/// within `tol`. `index` is the prefix reported in errors.
pub fn check_distribution(p: &[f64], tol: f64, index: &[usize]) -> Result<()> {
    for (k, &v) in p.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            let mut idx = index.to_vec();
            idx.push(k);
            return Err(Error::NegativeEntry {
                index: idx,
                value: v,
            });
        }
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(Error::NonStochasticRow {
            index: index.to_vec(),
            sum,
        });
    }
    Ok(())
}

/// Rescales a nonnegative vector to unit mass in place.
pub(crate) fn normalize(p: &mut [f64]) {
    let s: f64 = p.iter().sum();
    if s > 0.0 {
        p.iter_mut().for_each(|v| *v /= s);
    }
}

pub fn uniform(k: usize) -> Vec<f64> {
    vec![1.0 / k as f64; k]
}

/// Point mass on `i` in a `k`-symbol alphabet.
pub fn point_mass(k: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; k];
    v[i] = 1.0;
    v
}

/// Mutual information `I(X;Y)` for input law `p` and channel rows `w[x]`.
pub fn mi_input_channel(p: &[f64], w: &[Vec<f64>]) -> f64 {
    let ny = w.first().map_or(0, |r| r.len());
    let mut q = vec![0.0; ny];
    for (px, row) in p.iter().zip(w) {
        for (qy, &wy) in q.iter_mut().zip(row) {
            *qy += px * wy;
        }
    }
    let mut i = 0.0;
    for (px, row) in p.iter().zip(w) {
        if *px <= 0.0 {
            continue;
        }
        for (&wy, &qy) in row.iter().zip(&q) {
            if wy > 0.0 {
                i += px * wy * (wy / qy).log2();
            }
        }
    }
    i.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_examples() {
        assert!((entropy(&[0.5, 0.5]) - 1.0).abs() < 1e-15);
        assert!((binary_entropy(0.1) - 0.468_995_593_589_281).abs() < 1e-12);
        assert_eq!(entropy(&[1.0, 0.0]), 0.0);
    }

    #[test]
    fn kl_examples() {
        assert_eq!(kl_divergence(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert!((kl_divergence(&[1.0, 0.0], &[0.5, 0.5]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(
            kl_divergence(&[1.0, 0.0], &[0.0, 1.0]).unwrap(),
            f64::INFINITY
        );
        assert!(matches!(
            kl_divergence(&[1.0], &[0.5, 0.5]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn bsc_mutual_information() {
        let w = vec![vec![0.9, 0.1], vec![0.1, 0.9]];
        let i = mi_input_channel(&[0.5, 0.5], &w);
        assert!((i - (1.0 - binary_entropy(0.1))).abs() < 1e-12);
    }

    #[test]
    fn distribution_checks() {
        assert!(check_distribution(&[0.5, 0.5], 1e-12, &[]).is_ok());
        assert!(matches!(
            check_distribution(&[0.5, 0.4], 1e-12, &[3]),
            Err(Error::NonStochasticRow { .. })
        ));
        assert!(matches!(
            check_distribution(&[1.5, -0.5], 1e-12, &[]),
            Err(Error::NegativeEntry { .. })
        ));
    }
}
