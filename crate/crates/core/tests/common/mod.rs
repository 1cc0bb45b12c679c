#![allow(clippy::needless_range_loop)]

//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use avc_jsc::channel::{AVChannel, StateChannel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn h2(p: f64) -> f64 {
    entropy(&[p, 1.0 - p])
}

pub fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.log2()).sum()
}

/// `I(X;Y)` for input law `p` and channel rows `w[x][y]`.
pub fn mi(p: &[f64], w: &[Vec<f64>]) -> f64 {
    let ny = w[0].len();
    let mut q = vec![0.0; ny];
    for (px, row) in p.iter().zip(w) {
        for (qy, wy) in q.iter_mut().zip(row) {
            *qy += px * wy;
        }
    }
    let mut acc = 0.0;
    for (px, row) in p.iter().zip(w) {
        for (y, &wy) in row.iter().enumerate() {
            if px * wy > 0.0 {
                acc += px * wy * (wy / q[y]).log2();
            }
        }
    }
    acc
}

/// Entropy of the marginal over the listed axes of a dense table.
pub fn marginal_entropy(p: &[f64], sizes: &[usize], axes: &[usize]) -> f64 {
    let msize: usize = axes.iter().map(|&a| sizes[a]).product();
    let mut m = vec![0.0; msize];
    for (flat, &v) in p.iter().enumerate() {
        let mut rem = flat;
        let mut idx = vec![0; sizes.len()];
        for k in (0..sizes.len()).rev() {
            idx[k] = rem % sizes[k];
            rem /= sizes[k];
        }
        let mut key = 0;
        for &a in axes {
            key = key * sizes[a] + idx[a];
        }
        m[key] += v;
    }
    entropy(&m)
}

/// `I(A;B|C)` from entropies of a dense table.
pub fn cond_mi(p: &[f64], sizes: &[usize], a: &[usize], b: &[usize], c: &[usize]) -> f64 {
    let cat = |u: &[usize], v: &[usize]| -> Vec<usize> { u.iter().chain(v).copied().collect() };
    marginal_entropy(p, sizes, &cat(a, c)) + marginal_entropy(p, sizes, &cat(b, c))
        - marginal_entropy(p, sizes, &cat(&cat(a, b), c))
        - marginal_entropy(p, sizes, c)
}

/// Joint `(x, s, y)` table with `S` independent of `X` and jammer law `q_j`.
pub fn xsy_table(ch: &StateChannel, q_x: &[f64], q_j: &[f64]) -> Vec<f64> {
    let (nx, ns, nj, ny) = (ch.nx(), ch.ns(), ch.nj(), ch.ny());
    let mut p = vec![0.0; nx * ns * ny];
    for x in 0..nx {
        for s in 0..ns {
            for j in 0..nj {
                for y in 0..ny {
                    p[(x * ns + s) * ny + y] += q_x[x] * ch.q_s()[s] * q_j[j] * ch.w(x, s, j, y);
                }
            }
        }
    }
    p
}

/// Rows of the AVC collapsed under an iid jammer.
pub fn mix(avc: &AVChannel, q_j: &[f64]) -> Vec<Vec<f64>> {
    (0..avc.n_in())
        .map(|i| {
            (0..avc.ny())
                .map(|y| (0..avc.nj()).map(|j| q_j[j] * avc.q(i, j, y)).sum())
                .collect()
        })
        .collect()
}

/// Minimum of `f` over binary laws `(t, 1 - t)` on a uniform grid.
pub fn grid_min_binary(steps: usize, f: impl Fn(&[f64]) -> f64) -> f64 {
    (0..=steps)
        .map(|k| {
            let t = k as f64 / steps as f64;
            f(&[t, 1.0 - t])
        })
        .fold(f64::INFINITY, f64::min)
}

/// BSC with cross-over `p` as a single-jammer AVC.
pub fn bsc(p: f64) -> AVChannel {
    AVChannel::from_nested(&[vec![vec![1.0 - p, p]], vec![vec![p, 1.0 - p]]]).unwrap()
}

/// Random law on `k` points bounded away from the boundary.
pub fn random_dist(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() + 0.05).collect();
    let t: f64 = v.iter().sum();
    v.into_iter().map(|x| x / t).collect()
}

/// Random channel with all alphabets of size two.
pub fn random_binary_channel(seed: u64) -> StateChannel {
    let mut g = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<Vec<Vec<Vec<f64>>>> = (0..2)
        .map(|_| {
            (0..2)
                .map(|_| (0..2).map(|_| random_dist(&mut g, 2)).collect())
                .collect()
        })
        .collect();
    let q_s = random_dist(&mut g, 2);
    StateChannel::from_nested(&w, q_s, avc_jsc::builtin::hamming(2)).unwrap()
}

/// Builds a channel from unnormalized positive weights laid out
/// `[x][s][j][y]`, normalizing each row.
pub fn channel_from_weights(
    dims: (usize, usize, usize, usize),
    weights: &[f64],
    q_s: &[f64],
) -> StateChannel {
    let (nx, ns, nj, ny) = dims;
    let mut it = weights.chunks(ny);
    let w: Vec<Vec<Vec<Vec<f64>>>> = (0..nx)
        .map(|_| {
            (0..ns)
                .map(|_| {
                    (0..nj)
                        .map(|_| {
                            let r = it.next().unwrap();
                            let t: f64 = r.iter().sum();
                            r.iter().map(|v| v / t).collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let t: f64 = q_s.iter().sum();
    let q_s = q_s.iter().map(|v| v / t).collect();
    StateChannel::from_nested(&w, q_s, avc_jsc::builtin::hamming(ns)).unwrap()
}

/// Max violation of a symmetrizability equality under kernel `t`, written
/// directly from the definitions. `t` has one row per conditioning symbol
/// (`x`, `s`, or `x * ns + s`).
pub fn sym_violation(ch: &StateChannel, variant: &str, t: &[Vec<f64>]) -> f64 {
    let (nx, ns, nj, ny) = (ch.nx(), ch.ns(), ch.nj(), ch.ny());
    // side(a, ta) = sum_j W(y | a, j) T(j | ta) for every y.
    let gap = |xa: usize, sa: usize, xb: usize, sb: usize, ta: usize, tb: usize| -> f64 {
        (0..ny)
            .map(|y| {
                let l: f64 = (0..nj).map(|j| ch.w(xa, sa, j, y) * t[tb][j]).sum();
                let r: f64 = (0..nj).map(|j| ch.w(xb, sb, j, y) * t[ta][j]).sum();
                (l - r).abs()
            })
            .fold(0.0, f64::max)
    };
    let mut worst: f64 = 0.0;
    for x in 0..nx {
        for s in 0..ns {
            for x2 in 0..nx {
                for s2 in 0..ns {
                    let v = match variant {
                        "XS" if (x, s) != (x2, s2) => gap(x, s, x2, s2, x * ns + s, x2 * ns + s2),
                        "X" if s == s2 && x != x2 => gap(x, s, x2, s, x, x2),
                        "S" if x == x2 && s != s2 => gap(x, s, x, s2, s, s2),
                        "X|S" if s == s2 && x != x2 => gap(x, s, x2, s, x * ns + s, x2 * ns + s),
                        "S|X" if x == x2 && s != s2 => gap(x, s, x, s2, x * ns + s, x * ns + s2),
                        _ => 0.0,
                    };
                    worst = worst.max(v);
                }
            }
        }
    }
    worst
}

/// Number of kernel rows a variant uses.
pub fn sym_rows(ch: &StateChannel, variant: &str) -> usize {
    match variant {
        "X" => ch.nx(),
        "S" => ch.ns(),
        _ => ch.nx() * ch.ns(),
    }
}

/// Brute-force `min_T` of [`sym_violation`] for binary jammers, with each
/// row of `T` on the grid `k / steps`.
pub fn sym_margin_grid(ch: &StateChannel, variant: &str, steps: usize) -> f64 {
    let rows = sym_rows(ch, variant);
    let axis: Vec<f64> = (0..=steps).map(|k| k as f64 / steps as f64).collect();
    grid_over_rows(ch, variant, &vec![axis; rows]).0
}

fn grid_over_rows(ch: &StateChannel, variant: &str, axes: &[Vec<f64>]) -> (f64, Vec<f64>) {
    assert_eq!(ch.nj(), 2);
    let total: usize = axes.iter().map(Vec::len).product();
    let mut t = vec![vec![0.0; 2]; axes.len()];
    let mut best = (f64::INFINITY, vec![0.0; axes.len()]);
    for idx in 0..total {
        let mut rem = idx;
        for (row, axis) in t.iter_mut().zip(axes) {
            let p = axis[rem % axis.len()];
            rem /= axis.len();
            row[0] = p;
            row[1] = 1.0 - p;
        }
        let v = sym_violation(ch, variant, &t);
        if v < best.0 {
            best = (v, t.iter().map(|r| r[0]).collect());
        }
    }
    best
}
