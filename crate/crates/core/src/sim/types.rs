use rand::seq::SliceRandom;
use rand::Rng;

use crate::channel::Kernel;
use crate::error::{Error, Result};

const INTEGRAL_TOL: f64 = 1e-9;

/// Composition closest to `n * p` in the largest-remainder sense, and the
/// largest gap `|count/n - p|` it leaves.
pub fn round_to_type(p: &[f64], n: usize) -> (Vec<u32>, f64) {
    let nf = n as f64;
    let mut counts: Vec<u32> = p.iter().map(|&v| (v * nf).floor() as u32).collect();
    let mut left = n.saturating_sub(counts.iter().map(|&c| c as usize).sum());
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = p[a] * nf - counts[a] as f64;
        let rb = p[b] * nf - counts[b] as f64;
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &k in order.iter().cycle() {
        if left == 0 {
            break;
        }
        if p[k] > 0.0 {
            counts[k] += 1;
            left -= 1;
        }
    }
    let gap = counts
        .iter()
        .zip(p)
        .map(|(&c, &v)| (c as f64 / nf - v).abs())
        .fold(0.0, f64::max);
    (counts, gap)
}

/// Exact counts `n * p`, or `NonIntegralType`.
pub fn type_counts(p: &[f64], n: usize) -> Result<Vec<u32>> {
    p.iter()
        .enumerate()
        .map(|(k, &v)| {
            let c = v * n as f64;
            if !(c >= -INTEGRAL_TOL) || (c - c.round()).abs() > INTEGRAL_TOL {
                Err(Error::NonIntegralType {
                    n,
                    detail: format!("n * P({k}) = {c}"),
                })
            } else {
                Ok(c.round() as u32)
            }
        })
        .collect::<Result<Vec<u32>>>()
        .and_then(|c| {
            let total: u32 = c.iter().sum();
            if total as usize != n {
                Err(Error::NonIntegralType {
                    n,
                    detail: format!("counts sum to {total}"),
                })
            } else {
                Ok(c)
            }
        })
}

fn canonical(counts: &[u32]) -> Vec<usize> {
    counts
        .iter()
        .enumerate()
        .flat_map(|(a, &c)| std::iter::repeat_n(a, c as usize))
        .collect()
}

/// One uniform draw from the type class of `counts`.
pub fn draw_from_counts<R: Rng + ?Sized>(counts: &[u32], rng: &mut R) -> Vec<usize> {
    let mut seq = canonical(counts);
    seq.shuffle(rng);
    seq
}

/// `count` independent uniform draws from the type class of `p` at
/// blocklength `n`.
///
/// ```
/// use avc_jsc::sim::sample_type_class;
/// use rand::SeedableRng;
/// let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
/// let seqs = sample_type_class(&[0.5, 0.5], 4, 3, &mut rng).unwrap();
/// assert!(seqs.iter().all(|s| s.iter().sum::<usize>() == 2));
/// ```
pub fn sample_type_class<R: Rng + ?Sized>(
    p: &[f64],
    n: usize,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Vec<usize>>> {
    let counts = type_counts(p, n)?;
    Ok((0..count).map(|_| draw_from_counts(&counts, rng)).collect())
}

/// Cell counts `N(x) Q(u|x)` of a conditional type given `x_seq`.
pub fn conditional_cells(kernel: &Kernel, x_seq: &[usize]) -> Result<Vec<Vec<u32>>> {
    let nx = kernel.rows();
    let mut n_x = vec![0usize; nx];
    for (pos, &x) in x_seq.iter().enumerate() {
        if x >= nx {
            return Err(Error::SymbolOutOfRange {
                sequence: 0,
                position: pos,
                symbol: x,
                alphabet: nx,
            });
        }
        n_x[x] += 1;
    }
    (0..nx)
        .map(|x| {
            (0..kernel.cols())
                .map(|u| {
                    let c = n_x[x] as f64 * kernel.get(x, u);
                    if (c - c.round()).abs() > INTEGRAL_TOL {
                        Err(Error::NonIntegralCell(format!(
                            "N({x}) Q({u}|{x}) = {} * {} = {c}",
                            n_x[x],
                            kernel.get(x, u)
                        )))
                    } else {
                        Ok(c.round() as u32)
                    }
                })
                .collect()
        })
        .collect()
}

/// Per-row rounding of `N(x) Q(.|x)` to integral cells.
pub fn round_conditional(kernel: &Kernel, n_x: &[u32]) -> (Vec<Vec<u32>>, f64) {
    let mut gap: f64 = 0.0;
    let cells = n_x
        .iter()
        .enumerate()
        .map(|(x, &m)| {
            if m == 0 {
                return vec![0; kernel.cols()];
            }
            let (c, g) = round_to_type(kernel.row(x), m as usize);
            gap = gap.max(g * m as f64);
            c
        })
        .collect();
    (cells, gap)
}

/// One uniform draw from the conditional type class with the given cells.
pub fn draw_conditional<R: Rng + ?Sized>(
    cells: &[Vec<u32>],
    x_seq: &[usize],
    rng: &mut R,
) -> Vec<usize> {
    let mut out = vec![0; x_seq.len()];
    for (x, row) in cells.iter().enumerate() {
        let mut fill = canonical(row);
        fill.shuffle(rng);
        let positions = x_seq
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == x)
            .map(|(i, _)| i);
        for (i, u) in positions.zip(fill) {
            out[i] = u;
        }
    }
    out
}

/// `count` uniform draws from the conditional type class of `kernel` given
/// `x_seq`.
pub fn sample_conditional_type_class<R: Rng + ?Sized>(
    kernel: &Kernel,
    x_seq: &[usize],
    count: usize,
    rng: &mut R,
) -> Result<Vec<Vec<usize>>> {
    let cells = conditional_cells(kernel, x_seq)?;
    Ok((0..count)
        .map(|_| draw_conditional(&cells, x_seq, rng))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::joint_type;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rounding_keeps_total() {
        let (c, gap) = round_to_type(&[0.9, 0.1], 16);
        assert_eq!(c, vec![14, 2]);
        assert!((gap - (0.9 - 14.0 / 16.0)).abs() < 1e-12);
        let (c, _) = round_to_type(&[1.0 / 3.0; 3], 8);
        assert_eq!(c.iter().sum::<u32>(), 8);
        let (c, _) = round_to_type(&[0.0, 1.0], 5);
        assert_eq!(c, vec![0, 5]);
    }

    #[test]
    fn point_type_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = sample_type_class(&[1.0, 0.0], 5, 2, &mut rng).unwrap();
        assert!(s.iter().all(|v| v == &vec![0; 5]));
    }

    #[test]
    fn non_integral_type_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            sample_type_class(&[0.3, 0.7], 4, 1, &mut rng),
            Err(Error::NonIntegralType { .. })
        ));
    }

    #[test]
    fn conditional_draw_hits_the_joint_type() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k = Kernel::from_rows(&[vec![0.5, 0.5], vec![0.25, 0.75]]).unwrap();
        let x = [0, 0, 1, 1, 1, 1, 0, 0];
        for u in sample_conditional_type_class(&k, &x, 20, &mut rng).unwrap() {
            let t = joint_type(&[&x, &u], &[2, 2]).unwrap();
            assert_eq!(t.counts(), &[2, 2, 1, 3]);
        }
        assert!(matches!(
            sample_conditional_type_class(&k, &[0, 1, 1], 1, &mut rng),
            Err(Error::NonIntegralCell(_))
        ));
    }
}
