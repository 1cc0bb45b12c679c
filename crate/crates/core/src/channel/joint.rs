use serde::{Deserialize, Serialize};

use super::prob::{entropy, STOCHASTIC_TOL};
use crate::error::{Error, Result};

fn strides(sizes: &[usize]) -> Vec<usize> {
    let mut st = vec![1; sizes.len()];
    for k in (0..sizes.len().saturating_sub(1)).rev() {
        st[k] = st[k + 1] * sizes[k + 1];
    }
    st
}

/// Decomposes a row-major flat index into per-variable coordinates.
pub(crate) fn unravel(mut idx: usize, sizes: &[usize], out: &mut [usize]) {
    for k in (0..sizes.len()).rev() {
        out[k] = idx % sizes[k];
        idx /= sizes[k];
    }
}

/// Dense joint law of several finite variables, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    sizes: Vec<usize>,
    p: Vec<f64>,
}

impl JointDistribution {
    pub fn new(sizes: Vec<usize>, p: Vec<f64>) -> Result<Self> {
        let len: usize = sizes.iter().product();
        if p.len() != len || sizes.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "joint of sizes {sizes:?} needs {len} entries, got {}",
                p.len()
            )));
        }
        for (i, &v) in p.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                let mut idx = vec![0; sizes.len()];
                unravel(i, &sizes, &mut idx);
                return Err(Error::NegativeEntry {
                    index: idx,
                    value: v,
                });
            }
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > STOCHASTIC_TOL * len.max(1) as f64 {
            return Err(Error::NonStochasticRow {
                index: vec![],
                sum: total,
            });
        }
        Ok(Self { sizes, p })
    }

    pub(crate) fn new_unchecked(sizes: Vec<usize>, p: Vec<f64>) -> Self {
        Self { sizes, p }
    }

    /// Product law of independent marginals.
    pub fn product(marginals: &[&[f64]]) -> Self {
        let sizes: Vec<usize> = marginals.iter().map(|m| m.len()).collect();
        let len: usize = sizes.iter().product();
        let mut p = vec![0.0; len];
        let mut idx = vec![0; sizes.len()];
        for (i, v) in p.iter_mut().enumerate() {
            unravel(i, &sizes, &mut idx);
            *v = idx.iter().zip(marginals).map(|(&k, m)| m[k]).product();
        }
        Self { sizes, p }
    }

    pub fn arity(&self) -> usize {
        self.sizes.len()
    }
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }
    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        let st = strides(&self.sizes);
        self.p[idx.iter().zip(&st).map(|(a, b)| a * b).sum::<usize>()]
    }

    fn check_vars(&self, vars: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.arity()];
        for &v in vars {
            if v >= self.arity() {
                return Err(Error::IndexError(format!(
                    "variable {v} out of range (arity {})",
                    self.arity()
                )));
            }
            if seen[v] {
                return Err(Error::IndexError(format!("variable {v} repeated")));
            }
            seen[v] = true;
        }
        Ok(())
    }

    /// Marginal over `vars`, in the given order.
    pub fn marginal(&self, vars: &[usize]) -> Result<JointDistribution> {
        self.check_vars(vars)?;
        let sizes: Vec<usize> = vars.iter().map(|&v| self.sizes[v]).collect();
        let st = strides(&sizes);
        let mut out = vec![0.0; sizes.iter().product::<usize>().max(1)];
        let mut idx = vec![0; self.arity()];
        for (i, &v) in self.p.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            unravel(i, &self.sizes, &mut idx);
            let k: usize = vars.iter().zip(&st).map(|(&var, s)| idx[var] * s).sum();
            out[k] += v;
        }
        Ok(Self { sizes, p: out })
    }

    /// Joint entropy of the variables in `vars` (zero for the empty set).
    pub fn entropy_of(&self, vars: &[usize]) -> Result<f64> {
        if vars.is_empty() {
            return Ok(0.0);
        }
        Ok(entropy(&self.marginal(vars)?.p))
    }

    /// Conditional mutual information `I(A;B|C)` in bits.
    ///
    /// ```
    /// use avc_jsc::channel::JointDistribution;
    /// let bsc = JointDistribution::new(vec![2, 2], vec![0.45, 0.05, 0.05, 0.45]).unwrap();
    /// let i = bsc.mutual_information(&[0], &[1], &[]).unwrap();
    /// assert!((i - 0.531).abs() < 1e-3);
    /// ```
    pub fn mutual_information(&self, a: &[usize], b: &[usize], c: &[usize]) -> Result<f64> {
        let all: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
        self.check_vars(&all)?;
        if a.is_empty() || b.is_empty() {
            return Ok(0.0);
        }
        let ac: Vec<usize> = a.iter().chain(c).copied().collect();
        let bc: Vec<usize> = b.iter().chain(c).copied().collect();
        let i = self.entropy_of(&ac)? + self.entropy_of(&bc)?
            - self.entropy_of(&all)?
            - self.entropy_of(c)?;
        Ok(i.max(0.0))
    }
}

/// Exact empirical joint distribution of equal-length sequences.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JointType {
    sizes: Vec<usize>,
    counts: Vec<u32>,
    n: usize,
}

impl JointType {
    pub fn from_counts(sizes: Vec<usize>, counts: Vec<u32>) -> Result<Self> {
        let len: usize = sizes.iter().product();
        if counts.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "type of sizes {sizes:?} needs {len} cells, got {}",
                counts.len()
            )));
        }
        let n = counts.iter().map(|&c| c as usize).sum();
        Ok(Self { sizes, counts, n })
    }

    pub fn arity(&self) -> usize {
        self.sizes.len()
    }
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn count(&self, idx: &[usize]) -> u32 {
        let st = strides(&self.sizes);
        self.counts[idx.iter().zip(&st).map(|(a, b)| a * b).sum::<usize>()]
    }

    /// `counts / n` as a joint distribution.
    pub fn to_distribution(&self) -> JointDistribution {
        let n = self.n.max(1) as f64;
        JointDistribution::new_unchecked(
            self.sizes.clone(),
            self.counts.iter().map(|&c| c as f64 / n).collect(),
        )
    }

    /// Marginal counts over `vars`, in the given order.
    pub fn marginal(&self, vars: &[usize]) -> Result<JointType> {
        for &v in vars {
            if v >= self.arity() {
                return Err(Error::IndexError(format!(
                    "variable {v} out of range (arity {})",
                    self.arity()
                )));
            }
        }
        let sizes: Vec<usize> = vars.iter().map(|&v| self.sizes[v]).collect();
        let st = strides(&sizes);
        let mut out = vec![0u32; sizes.iter().product::<usize>().max(1)];
        let mut idx = vec![0; self.arity()];
        for (i, &c) in self.counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            unravel(i, &self.sizes, &mut idx);
            let k: usize = vars.iter().zip(&st).map(|(&var, s)| idx[var] * s).sum();
            out[k] += c;
        }
        Ok(JointType {
            sizes,
            counts: out,
            n: self.n,
        })
    }
}

/// Counts the joint type of `seqs`, whose symbols live in alphabets `sizes`.
///
/// ```
/// use avc_jsc::channel::joint_type;
/// let t = joint_type(&[&[0, 1, 0, 1], &[0, 0, 1, 1]], &[2, 2]).unwrap();
/// assert_eq!(t.counts(), &[1, 1, 1, 1]);
/// ```
pub fn joint_type(seqs: &[&[usize]], sizes: &[usize]) -> Result<JointType> {
    if seqs.len() != sizes.len() {
        return Err(Error::ArityMismatch {
            expected: sizes.len(),
            got: seqs.len(),
        });
    }
    let n = seqs.first().map_or(0, |s| s.len());
    for (k, s) in seqs.iter().enumerate() {
        if s.len() != n {
            return Err(Error::LengthMismatch(format!(
                "sequence {k} has length {}, sequence 0 has {n}",
                s.len()
            )));
        }
        if let Some((pos, &sym)) = s.iter().enumerate().find(|(_, &v)| v >= sizes[k]) {
            return Err(Error::SymbolOutOfRange {
                sequence: k,
                position: pos,
                symbol: sym,
                alphabet: sizes[k],
            });
        }
    }
    let st = strides(sizes);
    let mut counts = vec![0u32; sizes.iter().product::<usize>().max(1)];
    for t in 0..n {
        let k: usize = seqs.iter().zip(&st).map(|(s, st)| s[t] * st).sum();
        counts[k] += 1;
    }
    Ok(JointType {
        sizes: sizes.to_vec(),
        counts,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::prob::binary_entropy;

    #[test]
    fn independence_and_identity() {
        let prod = JointDistribution::product(&[&[0.3, 0.7], &[0.6, 0.4]]);
        assert!(prod.mutual_information(&[0], &[1], &[]).unwrap() < 1e-12);
        let diag = JointDistribution::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((diag.mutual_information(&[0], &[1], &[]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bsc_coupling() {
        let j = JointDistribution::new(vec![2, 2], vec![0.45, 0.05, 0.05, 0.45]).unwrap();
        let i = j.mutual_information(&[0], &[1], &[]).unwrap();
        assert!((i - (1.0 - binary_entropy(0.1))).abs() < 1e-12);
    }

    #[test]
    fn bad_indices() {
        let j = JointDistribution::product(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!(matches!(
            j.mutual_information(&[0], &[2], &[]),
            Err(Error::IndexError(_))
        ));
        assert!(matches!(
            j.mutual_information(&[0], &[0], &[]),
            Err(Error::IndexError(_))
        ));
    }

    #[test]
    fn type_examples() {
        let t = joint_type(&[&[0, 1, 0, 1], &[0, 0, 1, 1]], &[2, 2]).unwrap();
        assert_eq!(t.n(), 4);
        assert_eq!(t.count(&[1, 0]), 1);
        let t = joint_type(&[&[0, 0, 0]], &[2]).unwrap();
        assert_eq!(t.counts(), &[3, 0]);
        let t = joint_type(&[&[0, 1, 1], &[0, 1, 1]], &[2, 2]).unwrap();
        assert_eq!(t.counts(), &[1, 0, 0, 2]);
    }

    #[test]
    fn type_errors() {
        assert!(matches!(
            joint_type(&[&[0, 1], &[0]], &[2, 2]),
            Err(Error::LengthMismatch(_))
        ));
        assert_eq!(
            joint_type(&[&[0, 3]], &[2]),
            Err(Error::SymbolOutOfRange {
                sequence: 0,
                position: 1,
                symbol: 3,
                alphabet: 2
            })
        );
    }
}
