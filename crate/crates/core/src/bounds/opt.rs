//! Optimization primitives over simplices and products of simplices.

/// Euclidean projection of `v` onto the probability simplex, in place.
pub fn project_simplex(v: &mut [f64]) {
    let k = v.len();
    if k == 0 {
        return;
    }
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    v.iter_mut().for_each(|x| *x = (*x - theta).max(0.0));
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        v.iter_mut().for_each(|x| *x /= s);
    } else {
        v.iter_mut().for_each(|x| *x = 1.0 / k as f64);
    }
}

/// Projects each consecutive block of `dim` entries onto its simplex.
pub fn project_blocks(v: &mut [f64], dim: usize) {
    for b in v.chunks_mut(dim) {
        project_simplex(b);
    }
}

/// All points of the simplex in `dim` coordinates with denominator `denom`.
pub fn simplex_grid(dim: usize, denom: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; dim];
    fn rec(pos: usize, left: usize, cur: &mut Vec<usize>, denom: usize, out: &mut Vec<Vec<f64>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.iter().map(|&c| c as f64 / denom as f64).collect());
            return;
        }
        for c in (0..=left).rev() {
            cur[pos] = c;
            rec(pos + 1, left - c, cur, denom, out);
        }
    }
    if dim > 0 {
        rec(0, denom, &mut cur, denom, &mut out);
    }
    out
}

/// Number of grid points `C(denom + dim - 1, dim - 1)` without building them.
pub fn simplex_grid_len(dim: usize, denom: usize) -> f64 {
    let mut c = 1.0;
    for i in 1..dim {
        c *= (denom + i) as f64 / i as f64;
    }
    c
}

/// Outcome of a convex minimization with a Frank-Wolfe certificate.
#[derive(Debug, Clone)]
pub struct ConvexMin {
    pub x: Vec<f64>,
    pub value: f64,
    /// Certified lower bound on the minimum (linearization at the final
    /// iterate minimized over the feasible vertices).
    pub lower: f64,
    pub iterations: usize,
}

fn fw_gap(x: &[f64], g: &[f64], dim: usize) -> f64 {
    let mut gap = 0.0;
    for (xb, gb) in x.chunks(dim).zip(g.chunks(dim)) {
        let inner: f64 = xb.iter().zip(gb).map(|(a, b)| a * b).sum();
        let min = gb.iter().copied().fold(f64::INFINITY, f64::min);
        gap += inner - min;
    }
    gap.max(0.0)
}

/// Minimizes a convex function over a product of simplices of size `dim`
/// by projected gradient descent with backtracking. `f` returns the value
/// and a gradient.
pub fn minimize_convex(
    dim: usize,
    x0: Vec<f64>,
    f: &dyn Fn(&[f64]) -> (f64, Vec<f64>),
    max_iter: usize,
    tol: f64,
) -> ConvexMin {
    let mut x = x0;
    project_blocks(&mut x, dim);
    let (mut fx, mut g) = f(&x);
    let mut lower = f64::NEG_INFINITY;
    let mut step = 1.0;
    let mut it = 0;
    let mut stalled = 0;
    while it < max_iter {
        it += 1;
        let gap = fw_gap(&x, &g, dim);
        lower = lower.max(fx - gap);
        // progress below rounding noise ends the run as well
        if gap <= tol || stalled >= 8 {
            break;
        }
        let before = fx;
        let mut accepted = false;
        let mut t = step * 2.0;
        while t > 1e-16 {
            let mut y: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - t * b).collect();
            project_blocks(&mut y, dim);
            let d: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
            let dn: f64 = d.iter().map(|v| v * v).sum();
            if dn < 1e-30 {
                break;
            }
            let (fy, gy) = f(&y);
            let lin: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
            if fy <= fx + lin + dn / (2.0 * t) + 1e-15 {
                x = y;
                fx = fy;
                g = gy;
                step = t;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // projected step stalled; try a Frank-Wolfe step with line search
            let mut v = vec![0.0; x.len()];
            for (vb, gb) in v.chunks_mut(dim).zip(g.chunks(dim)) {
                let k = gb
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .map_or(0, |p| p.0);
                vb[k] = 1.0;
            }
            let mut best = (fx, x.clone(), g.clone());
            let mut gamma = 1.0;
            for _ in 0..40 {
                let y: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a + gamma * (b - a)).collect();
                let (fy, gy) = f(&y);
                if fy < best.0 {
                    best = (fy, y, gy);
                    break;
                }
                gamma *= 0.5;
            }
            if best.0 < fx {
                fx = best.0;
                x = best.1;
                g = best.2;
            } else {
                let gap = fw_gap(&x, &g, dim);
                lower = lower.max(fx - gap);
                break;
            }
        }
        if before - fx < 1e-14 * (1.0 + fx.abs()) {
            stalled += 1;
        } else {
            stalled = 0;
        }
    }
    ConvexMin {
        x,
        value: fx,
        lower: lower.min(fx),
        iterations: it,
    }
}

/// Maximizes a concave function over the simplex: grid seeding, projected
/// supergradient ascent, then pattern search along edge directions.
pub fn maximize_concave(
    dim: usize,
    f: &(dyn Fn(&[f64]) -> (f64, Vec<f64>) + Sync),
    grid_denom: usize,
    rounds: usize,
) -> (Vec<f64>, f64) {
    use rayon::prelude::*;
    if dim == 1 {
        let x = vec![1.0];
        let v = f(&x).0;
        return (x, v);
    }
    let mut denom = grid_denom.max(1);
    while simplex_grid_len(dim, denom) > 4000.0 && denom > 2 {
        denom /= 2;
    }
    let seeds = simplex_grid(dim, denom);
    let vals: Vec<f64> = seeds.par_iter().map(|s| f(s).0).collect();
    let (bi, _) =
        vals.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |b, (i, &v)| if v > b.1 { (i, v) } else { b },
        );
    let mut x = seeds[bi].clone();
    let (mut fx, mut g) = f(&x);

    // supergradient ascent with diminishing steps
    let mut step = 0.5 / denom as f64;
    for k in 0..60 * rounds.max(1) {
        let mut y: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a + step * b).collect();
        project_simplex(&mut y);
        let (fy, gy) = f(&y);
        if fy > fx {
            x = y;
            fx = fy;
            g = gy;
        } else {
            step *= 0.7;
        }
        if step < 1e-9 || k > 400 {
            break;
        }
    }

    // pattern search along e_a - e_b
    let mut h = 1.0 / denom as f64;
    let min_h = 1e-9;
    while h > min_h {
        let mut improved = false;
        for a in 0..dim {
            for b in 0..dim {
                if a == b || x[b] <= 0.0 {
                    continue;
                }
                let mv = h.min(x[b]);
                let mut y = x.clone();
                y[a] += mv;
                y[b] -= mv;
                let (fy, _) = f(&y);
                if fy > fx + 1e-15 {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    (x, fx)
}

/// Blahut-Arimoto result. `lower` is the mutual information at `p`, `upper`
/// the dual bound, so the constrained capacity lies in `[lower, upper]`.
#[derive(Debug, Clone)]
pub struct BaResult {
    pub p: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
}

/// Capacity of the DMC `w` (rows `n_in x ny`, flat) over input laws whose
/// mass on each group is fixed: `group[i]` names the group of input `i` and
/// `group_mass[g]` its total mass. A single group of mass one gives the
/// ordinary capacity.
pub fn blahut_arimoto(
    w: &[f64],
    ny: usize,
    group: &[usize],
    group_mass: &[f64],
    tol: f64,
    max_iter: usize,
) -> BaResult {
    let n_in = group.len();
    let ng = group_mass.len();
    let mut members = vec![0usize; ng];
    for &g in group {
        members[g] += 1;
    }
    let mut p: Vec<f64> = group
        .iter()
        .map(|&g| group_mass[g] / members[g] as f64)
        .collect();
    let mut q = vec![0.0; ny];
    let mut d = vec![0.0; n_in];
    let mut lower = 0.0;
    let mut upper = f64::INFINITY;
    for _ in 0..max_iter {
        q.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n_in {
            for y in 0..ny {
                q[y] += p[i] * w[i * ny + y];
            }
        }
        for i in 0..n_in {
            let mut di = 0.0;
            for y in 0..ny {
                let wy = w[i * ny + y];
                if wy > 0.0 {
                    di += wy * (wy / q[y]).log2();
                }
            }
            d[i] = di;
        }
        lower = p.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>().max(0.0);
        let mut gmax = vec![f64::NEG_INFINITY; ng];
        for i in 0..n_in {
            gmax[group[i]] = gmax[group[i]].max(d[i]);
        }
        upper = gmax
            .iter()
            .zip(group_mass)
            .map(|(m, w)| if *w > 0.0 { m * w } else { 0.0 })
            .sum();
        if upper - lower < tol {
            break;
        }
        let mut norm = vec![0.0; ng];
        for i in 0..n_in {
            p[i] *= (d[i] - gmax[group[i]]).exp2();
            norm[group[i]] += p[i];
        }
        for i in 0..n_in {
            let g = group[i];
            if norm[g] > 0.0 {
                p[i] *= group_mass[g] / norm[g];
            }
        }
    }
    BaResult {
        p,
        lower,
        upper: upper.max(lower),
    }
}

/// Derivative-free maximization over a product of simplices of varying
/// sizes, moving mass between two coordinates of one block at a time.
pub fn pattern_search(
    blocks: &[usize],
    x0: Vec<f64>,
    f: &dyn Fn(&[f64]) -> f64,
    step0: f64,
    min_step: f64,
) -> (Vec<f64>, f64) {
    let mut x = x0;
    let mut fx = f(&x);
    let mut h = step0;
    while h >= min_step {
        let mut improved = false;
        let mut off = 0;
        for &size in blocks {
            for a in 0..size {
                for b in 0..size {
                    if a == b || x[off + b] <= 0.0 {
                        continue;
                    }
                    let mv = h.min(x[off + b]);
                    let mut y = x.clone();
                    y[off + a] += mv;
                    y[off + b] -= mv;
                    let fy = f(&y);
                    if fy > fx + 1e-12 {
                        x = y;
                        fx = fy;
                        improved = true;
                    }
                }
            }
            off += size;
        }
        if !improved {
            h *= 0.5;
        }
    }
    (x, fx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::binary_entropy;

    #[test]
    fn projection() {
        let mut v = vec![0.5, 0.5, 0.5];
        project_simplex(&mut v);
        assert!(v.iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-12));
        let mut v = vec![2.0, 0.0];
        project_simplex(&mut v);
        assert_eq!(v, vec![1.0, 0.0]);
        let mut v = vec![0.2, 0.3, 0.5];
        project_simplex(&mut v);
        assert!((v[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(simplex_grid(2, 32).len(), 33);
        assert_eq!(simplex_grid(3, 4).len(), 15);
        assert_eq!(simplex_grid_len(3, 4), 15.0);
    }

    #[test]
    fn quadratic_minimum_certified() {
        let f = |x: &[f64]| {
            let v = (x[0] - 0.3).powi(2) + (x[1] - 0.7).powi(2);
            (v, vec![2.0 * (x[0] - 0.3), 2.0 * (x[1] - 0.7)])
        };
        let r = minimize_convex(2, vec![1.0, 0.0], &f, 1000, 1e-12);
        assert!((r.x[0] - 0.3).abs() < 1e-6);
        assert!(r.lower <= r.value && r.value - r.lower < 1e-9);
    }

    #[test]
    fn bsc_capacity() {
        let w = [0.9, 0.1, 0.1, 0.9];
        let r = blahut_arimoto(&w, 2, &[0, 0], &[1.0], 1e-12, 10_000);
        let c = 1.0 - binary_entropy(0.1);
        assert!((r.lower - c).abs() < 1e-9 && r.upper >= r.lower);
        assert!((r.p[0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn z_channel_capacity() {
        // Z channel with crossover 0.5: capacity log2(5/4)
        let w = [1.0, 0.0, 0.5, 0.5];
        let r = blahut_arimoto(&w, 2, &[0, 0], &[1.0], 1e-13, 100_000);
        assert!((r.lower - (1.25f64).log2()).abs() < 1e-7);
    }

    #[test]
    fn concave_max() {
        let f = |x: &[f64]| {
            let v = -(x[0] - 0.25).powi(2) - (x[1] - 0.25).powi(2) - (x[2] - 0.5).powi(2);
            (
                v,
                vec![
                    -2.0 * (x[0] - 0.25),
                    -2.0 * (x[1] - 0.25),
                    -2.0 * (x[2] - 0.5),
                ],
            )
        };
        let (x, v) = maximize_concave(3, &f, 32, 2);
        assert!(v > -1e-12, "{x:?}");
    }
}
