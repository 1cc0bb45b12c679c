use serde::{Deserialize, Serialize};

use super::types::{AVChannel, Composite, Kernel, StateChannel};
use crate::error::{Error, Result};

/// Auxiliary-variable law describing how the encoder uses its state
/// knowledge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AuxLaw {
    /// Input `Q_X` chosen ahead of the state; `U` drawn from `Q_{U|XS}`
    /// (kernel rows indexed `x * ns + s`).
    StrictlyCausal { q_x: Vec<f64>, q_u_xs: Kernel },
    /// `U` drawn from `Q_{U|S}`, then `X` from `Q_{X|US}` (kernel rows
    /// indexed `u * ns + s`).
    Noncausal { q_u_s: Kernel, q_x_us: Kernel },
}

impl AuxLaw {
    pub fn nu(&self) -> usize {
        match self {
            AuxLaw::StrictlyCausal { q_u_xs, .. } => q_u_xs.cols(),
            AuxLaw::Noncausal { q_u_s, .. } => q_u_s.cols(),
        }
    }

    pub fn is_noncausal(&self) -> bool {
        matches!(self, AuxLaw::Noncausal { .. })
    }

    pub fn check(&self, ch: &StateChannel) -> Result<()> {
        let (nx, ns) = (ch.nx(), ch.ns());
        match self {
            AuxLaw::StrictlyCausal { q_x, q_u_xs } => {
                if q_x.len() != nx {
                    return Err(Error::DimensionMismatch(format!(
                        "Q_X has {} entries, nx = {nx}",
                        q_x.len()
                    )));
                }
                super::prob::check_distribution(q_x, 1e-9, &[])?;
                if q_u_xs.rows() != nx * ns {
                    return Err(Error::DimensionMismatch(format!(
                        "Q_U|XS has {} rows, expected nx*ns = {}",
                        q_u_xs.rows(),
                        nx * ns
                    )));
                }
            }
            AuxLaw::Noncausal { q_u_s, q_x_us } => {
                if q_u_s.rows() != ns {
                    return Err(Error::DimensionMismatch(format!(
                        "Q_U|S has {} rows, ns = {ns}",
                        q_u_s.rows()
                    )));
                }
                if q_x_us.rows() != q_u_s.cols() * ns || q_x_us.cols() != nx {
                    return Err(Error::DimensionMismatch(format!(
                        "Q_X|US must be {}x{nx}",
                        q_u_s.cols() * ns
                    )));
                }
            }
        }
        Ok(())
    }

    /// Jammer-free joint law `P(x,u,s)`, flat `[x][u][s]`.
    pub fn joint_xus(&self, ch: &StateChannel) -> Vec<f64> {
        let (nx, ns, nu) = (ch.nx(), ch.ns(), self.nu());
        let q_s = ch.q_s();
        let mut p = vec![0.0; nx * nu * ns];
        for x in 0..nx {
            for u in 0..nu {
                for s in 0..ns {
                    p[(x * nu + u) * ns + s] = match self {
                        AuxLaw::StrictlyCausal { q_x, q_u_xs } => {
                            q_x[x] * q_s[s] * q_u_xs.get(x * ns + s, u)
                        }
                        AuxLaw::Noncausal { q_u_s, q_x_us } => {
                            q_s[s] * q_u_s.get(s, u) * q_x_us.get(u * ns + s, x)
                        }
                    };
                }
            }
        }
        p
    }
}

/// Domain of a symbolwise state estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimatorDomain {
    /// `h(x, u, y)`.
    Xuy { nx: usize, nu: usize, ny: usize },
    /// `h(u, y)`.
    Uy { nu: usize, ny: usize },
}

/// Deterministic state reconstruction table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Estimator {
    domain: EstimatorDomain,
    table: Vec<usize>,
}

impl Estimator {
    pub fn xuy(nx: usize, nu: usize, ny: usize, f: impl Fn(usize, usize, usize) -> usize) -> Self {
        let mut table = Vec::with_capacity(nx * nu * ny);
        for x in 0..nx {
            for u in 0..nu {
                for y in 0..ny {
                    table.push(f(x, u, y));
                }
            }
        }
        Self {
            domain: EstimatorDomain::Xuy { nx, nu, ny },
            table,
        }
    }

    pub fn uy(nu: usize, ny: usize, f: impl Fn(usize, usize) -> usize) -> Self {
        let mut table = Vec::with_capacity(nu * ny);
        for u in 0..nu {
            for y in 0..ny {
                table.push(f(u, y));
            }
        }
        Self {
            domain: EstimatorDomain::Uy { nu, ny },
            table,
        }
    }

    pub fn from_table(domain: EstimatorDomain, table: Vec<usize>) -> Result<Self> {
        let len = match domain {
            EstimatorDomain::Xuy { nx, nu, ny } => nx * nu * ny,
            EstimatorDomain::Uy { nu, ny } => nu * ny,
        };
        if table.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "estimator table has {} entries, domain needs {len}",
                table.len()
            )));
        }
        Ok(Self { domain, table })
    }

    pub fn domain(&self) -> EstimatorDomain {
        self.domain
    }
    pub fn table(&self) -> &[usize] {
        &self.table
    }

    #[inline]
    pub fn estimate(&self, x: usize, u: usize, y: usize) -> usize {
        match self.domain {
            EstimatorDomain::Xuy { nu, ny, .. } => self.table[(x * nu + u) * ny + y],
            EstimatorDomain::Uy { ny, .. } => self.table[u * ny + y],
        }
    }

    fn check(&self, ch: &StateChannel, nu: usize) -> Result<()> {
        let ok = match self.domain {
            EstimatorDomain::Xuy { nx, nu: k, ny } => nx == ch.nx() && k == nu && ny == ch.ny(),
            EstimatorDomain::Uy { nu: k, ny } => k == nu && ny == ch.ny(),
        };
        if !ok {
            return Err(Error::DimensionMismatch(format!(
                "estimator domain {:?} does not fit the channel",
                self.domain
            )));
        }
        if let Some(&bad) = self.table.iter().find(|&&v| v >= ch.ns_hat()) {
            return Err(Error::IndexError(format!(
                "estimator output {bad} outside reconstruction alphabet {}",
                ch.ns_hat()
            )));
        }
        Ok(())
    }
}

/// State-averaged AVC `Q(y|x,j) = sum_s Q_S(s) W(y|x,s,j)`.
pub fn average_out_state(ch: &StateChannel) -> AVChannel {
    let (nx, ns, nj, ny) = (ch.nx(), ch.ns(), ch.nj(), ch.ny());
    let mut q = vec![0.0; nx * nj * ny];
    for x in 0..nx {
        for j in 0..nj {
            let out = &mut q[(x * nj + j) * ny..(x * nj + j + 1) * ny];
            for s in 0..ns {
                let ps = ch.q_s()[s];
                for (o, &w) in out.iter_mut().zip(ch.row(x, s, j)) {
                    *o += ps * w;
                }
            }
        }
    }
    AVChannel::from_parts(nx, nj, ny, q, vec![true; nx], None)
}

/// Result of inducing a stateless channel on the auxiliary input.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedChannel {
    /// Strictly causal: composite input `(x, u)`; noncausal: input `u`.
    pub avc: AVChannel,
    /// Strictly causal only: Bayes posterior `Q_{S|UX}` per composite input,
    /// `None` where the input has zero mass.
    pub posterior: Option<Vec<Option<Vec<f64>>>>,
    /// Marginal law of the induced input.
    pub input_law: Vec<f64>,
}

impl InducedChannel {
    /// Fails with `ZeroMassInput` at the first input that has no mass.
    pub fn require_full_support(&self) -> Result<()> {
        (0..self.avc.n_in()).try_for_each(|i| self.avc.require_defined(i))
    }
}

/// Induces `Q_{Y|UXJ}` (strictly causal) or `Q_{Y|UJ}` (noncausal).
pub fn induce_u_channel(ch: &StateChannel, aux: &AuxLaw) -> Result<InducedChannel> {
    aux.check(ch)?;
    let (nx, ns, nj, ny, nu) = (ch.nx(), ch.ns(), ch.nj(), ch.ny(), aux.nu());
    let p = aux.joint_xus(ch);
    let pxus = |x: usize, u: usize, s: usize| p[(x * nu + u) * ns + s];
    match aux {
        AuxLaw::StrictlyCausal { .. } => {
            let comp = Composite { nx, nu };
            let n_in = nx * nu;
            let mut q = vec![0.0; n_in * nj * ny];
            let mut defined = vec![false; n_in];
            let mut post = vec![None; n_in];
            let mut law = vec![0.0; n_in];
            for x in 0..nx {
                for u in 0..nu {
                    let i = comp.index(x, u);
                    let mass: f64 = (0..ns).map(|s| pxus(x, u, s)).sum();
                    law[i] = mass;
                    if mass <= 0.0 {
                        continue;
                    }
                    defined[i] = true;
                    let ps: Vec<f64> = (0..ns).map(|s| pxus(x, u, s) / mass).collect();
                    for j in 0..nj {
                        let out = &mut q[(i * nj + j) * ny..(i * nj + j + 1) * ny];
                        for (s, &w_s) in ps.iter().enumerate() {
                            if w_s == 0.0 {
                                continue;
                            }
                            for (o, &w) in out.iter_mut().zip(ch.row(x, s, j)) {
                                *o += w_s * w;
                            }
                        }
                    }
                    post[i] = Some(ps);
                }
            }
            Ok(InducedChannel {
                avc: AVChannel::from_parts(n_in, nj, ny, q, defined, Some(comp)),
                posterior: Some(post),
                input_law: law,
            })
        }
        AuxLaw::Noncausal { .. } => {
            let mut q = vec![0.0; nu * nj * ny];
            let mut defined = vec![false; nu];
            let mut law = vec![0.0; nu];
            for u in 0..nu {
                let mass: f64 = (0..nx)
                    .flat_map(|x| (0..ns).map(move |s| (x, s)))
                    .map(|(x, s)| pxus(x, u, s))
                    .sum();
                law[u] = mass;
                if mass <= 0.0 {
                    continue;
                }
                defined[u] = true;
                for j in 0..nj {
                    let out = &mut q[(u * nj + j) * ny..(u * nj + j + 1) * ny];
                    for x in 0..nx {
                        for s in 0..ns {
                            let w_xs = pxus(x, u, s) / mass;
                            if w_xs == 0.0 {
                                continue;
                            }
                            for (o, &w) in out.iter_mut().zip(ch.row(x, s, j)) {
                                *o += w_xs * w;
                            }
                        }
                    }
                }
            }
            Ok(InducedChannel {
                avc: AVChannel::from_parts(nu, nj, ny, q, defined, None),
                posterior: None,
                input_law: law,
            })
        }
    }
}

/// Jammer behaviour folded into a single-letter channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum JammerLaw {
    /// Input-independent `Q_J`.
    Iid(Vec<f64>),
    /// Per-input kernel `Q_{J|in}` (row-convex extension).
    PerInput(Kernel),
}

/// Collapses the AVC to a DMC `Q(y|in)` under the given jammer law. Rows of
/// undefined inputs stay zero.
pub fn apply_jammer_kernel(avc: &AVChannel, law: &JammerLaw) -> Result<Kernel> {
    let (n_in, nj, ny) = (avc.n_in(), avc.nj(), avc.ny());
    match law {
        JammerLaw::Iid(qj) if qj.len() != nj => {
            return Err(Error::DimensionMismatch(format!(
                "Q_J has {} entries, nj = {nj}",
                qj.len()
            )))
        }
        JammerLaw::PerInput(k) if k.rows() != n_in || k.cols() != nj => {
            return Err(Error::DimensionMismatch(format!(
                "jammer kernel is {}x{}, expected {n_in}x{nj}",
                k.rows(),
                k.cols()
            )))
        }
        _ => {}
    }
    let mut out = vec![0.0; n_in * ny];
    for i in 0..n_in {
        let weights = match law {
            JammerLaw::Iid(qj) => qj.as_slice(),
            JammerLaw::PerInput(k) => k.row(i),
        };
        mix_into(avc, i, weights, &mut out[i * ny..(i + 1) * ny]);
    }
    Ok(Kernel::from_flat_unchecked(n_in, ny, out))
}

/// `out = sum_j weights[j] q(.|i,j)`.
#[inline]
pub(crate) fn mix_into(avc: &AVChannel, i: usize, weights: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for (j, &a) in weights.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (o, &q) in out.iter_mut().zip(avc.row(i, j)) {
            *o += a * q;
        }
    }
}

/// Worst-case expected distortion over i.i.d. jammer laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub worst: f64,
    pub worst_q_j: Vec<f64>,
    /// Expected distortion when the jammer always sends `j`.
    pub per_jammer_symbol: Vec<f64>,
}

/// Expected distortion `E[d(S, h(X,U,Y))]` under a fixed jammer law.
pub fn distortion_at(ch: &StateChannel, aux: &AuxLaw, h: &Estimator, q_j: &[f64]) -> Result<f64> {
    let rep = expected_distortion(ch, aux, h)?;
    if q_j.len() != ch.nj() {
        return Err(Error::DimensionMismatch(format!(
            "Q_J has {} entries, nj = {}",
            q_j.len(),
            ch.nj()
        )));
    }
    Ok(q_j
        .iter()
        .zip(&rep.per_jammer_symbol)
        .map(|(a, b)| a * b)
        .sum())
}

/// Maximum over i.i.d. jammer laws of `E[d(S, h(X,U,Y))]`. The expectation is
/// linear in `Q_J`, so the maximum sits at a point mass.
pub fn expected_distortion(
    ch: &StateChannel,
    aux: &AuxLaw,
    h: &Estimator,
) -> Result<DistortionReport> {
    aux.check(ch)?;
    let nu = aux.nu();
    h.check(ch, nu)?;
    let (nx, ns, nj, ny) = (ch.nx(), ch.ns(), ch.nj(), ch.ny());
    let p = aux.joint_xus(ch);
    let d = ch.distortion();
    let mut per_j = vec![0.0; nj];
    for (j, dj) in per_j.iter_mut().enumerate() {
        let mut acc = 0.0;
        for x in 0..nx {
            for u in 0..nu {
                for s in 0..ns {
                    let pm = p[(x * nu + u) * ns + s];
                    if pm == 0.0 {
                        continue;
                    }
                    for y in 0..ny {
                        let w = ch.w(x, s, j, y);
                        if w > 0.0 {
                            acc += pm * w * d[s][h.estimate(x, u, y)];
                        }
                    }
                }
            }
        }
        *dj = acc;
    }
    let (arg, &worst) =
        per_j.iter().enumerate().fold(
            (0, &f64::NEG_INFINITY),
            |b, c| if *c.1 > *b.1 { c } else { b },
        );
    let mut worst_q_j = vec![0.0; nj];
    worst_q_j[arg] = 1.0;
    Ok(DistortionReport {
        worst,
        worst_q_j,
        per_jammer_symbol: per_j,
    })
}

/// Bayes estimator minimizing expected distortion under a fixed `Q_J`.
/// Noncausal laws yield a `(u, y)` table, strictly causal ones `(x, u, y)`.
pub fn bayes_estimator(ch: &StateChannel, aux: &AuxLaw, q_j: &[f64]) -> Result<Estimator> {
    aux.check(ch)?;
    let (nx, ns, nj, ny, nu, nsh) = (ch.nx(), ch.ns(), ch.nj(), ch.ny(), aux.nu(), ch.ns_hat());
    if q_j.len() != nj {
        return Err(Error::DimensionMismatch(format!(
            "Q_J has {} entries, nj = {nj}",
            q_j.len()
        )));
    }
    let p = aux.joint_xus(ch);
    let d = ch.distortion();
    // post[x][u][y][s] = P(x,u,s,y) under q_j
    let mut post = vec![0.0; nx * nu * ny * ns];
    for x in 0..nx {
        for u in 0..nu {
            for s in 0..ns {
                let pm = p[(x * nu + u) * ns + s];
                if pm == 0.0 {
                    continue;
                }
                for (j, &a) in q_j.iter().enumerate() {
                    if a == 0.0 {
                        continue;
                    }
                    for y in 0..ny {
                        post[((x * nu + u) * ny + y) * ns + s] += pm * a * ch.w(x, s, j, y);
                    }
                }
            }
        }
    }
    let best = |weights: &dyn Fn(usize) -> f64| -> usize {
        let mut arg = 0;
        let mut val = f64::INFINITY;
        for t in 0..nsh {
            let c: f64 = (0..ns).map(|s| weights(s) * d[s][t]).sum();
            if c < val - 1e-15 {
                val = c;
                arg = t;
            }
        }
        arg
    };
    if aux.is_noncausal() {
        Ok(Estimator::uy(nu, ny, |u, y| {
            best(&|s| {
                (0..nx)
                    .map(|x| post[((x * nu + u) * ny + y) * ns + s])
                    .sum()
            })
        }))
    } else {
        Ok(Estimator::xuy(nx, nu, ny, |x, u, y| {
            best(&|s| post[((x * nu + u) * ny + y) * ns + s])
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::prob::uniform;

    pub(crate) fn binary_example() -> StateChannel {
        StateChannel::from_nested(
            &[
                vec![
                    vec![vec![1.0, 0.0], vec![0.85, 0.15]],
                    vec![vec![1.0, 0.0], vec![0.35, 0.65]],
                ],
                vec![
                    vec![vec![0.15, 0.85], vec![0.0, 1.0]],
                    vec![vec![0.65, 0.35], vec![0.0, 1.0]],
                ],
            ],
            vec![0.9, 0.1],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        )
        .unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn averaged_binary_example() {
        let avc = average_out_state(&binary_example());
        assert!(close(avc.row(0, 0), &[1.0, 0.0]));
        assert!(close(avc.row(1, 0), &[0.2, 0.8]));
        assert!(close(avc.row(0, 1), &[0.8, 0.2]));
        assert!(close(avc.row(1, 1), &[0.0, 1.0]));
    }

    #[test]
    fn jammer_mixtures_of_binary_example() {
        let avc = average_out_state(&binary_example());
        let bsc = apply_jammer_kernel(&avc, &JammerLaw::Iid(vec![0.5, 0.5])).unwrap();
        assert!(close(bsc.row(0), &[0.9, 0.1]));
        assert!(close(bsc.row(1), &[0.1, 0.9]));
        let k = Kernel::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let bsc = apply_jammer_kernel(&avc, &JammerLaw::PerInput(k)).unwrap();
        assert!(close(bsc.row(0), &[0.8, 0.2]));
        assert!(close(bsc.row(1), &[0.2, 0.8]));
        assert!(matches!(
            apply_jammer_kernel(&avc, &JammerLaw::Iid(vec![1.0])),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn state_blind_aux_reproduces_averaged_channel() {
        let ch = binary_example();
        let aux = AuxLaw::StrictlyCausal {
            q_x: uniform(2),
            q_u_xs: Kernel::constant(4, &[0.3, 0.7]),
        };
        let ind = induce_u_channel(&ch, &aux).unwrap();
        let avg = average_out_state(&ch);
        let comp = ind.avc.composite().unwrap();
        for x in 0..2 {
            for u in 0..2 {
                for j in 0..2 {
                    assert!(close(ind.avc.row(comp.index(x, u), j), avg.row(x, j)));
                }
            }
        }
    }

    #[test]
    fn noncausal_identity_aux() {
        let ch = binary_example();
        let q_x_us = Kernel::from_rows(&[
            vec![0.3, 0.7],
            vec![0.5, 0.5],
            vec![0.5, 0.5],
            vec![0.9, 0.1],
        ])
        .unwrap();
        let aux = AuxLaw::Noncausal {
            q_u_s: Kernel::deterministic(2, 2, |s| s),
            q_x_us: q_x_us.clone(),
        };
        let ind = induce_u_channel(&ch, &aux).unwrap();
        for s in 0..2 {
            for j in 0..2 {
                let mut expect = [0.0; 2];
                for x in 0..2 {
                    for y in 0..2 {
                        expect[y] += q_x_us.get(s * 2 + s, x) * ch.w(x, s, j, y);
                    }
                }
                assert!(close(ind.avc.row(s, j), &expect));
            }
        }
    }

    #[test]
    fn unreached_composite_inputs_are_flagged() {
        let ch = binary_example();
        let aux = AuxLaw::StrictlyCausal {
            q_x: vec![1.0, 0.0],
            q_u_xs: Kernel::deterministic(4, 2, |r| r % 2),
        };
        let ind = induce_u_channel(&ch, &aux).unwrap();
        assert!(ind.avc.is_defined(0) && ind.avc.is_defined(1));
        assert!(!ind.avc.is_defined(2) && !ind.avc.is_defined(3));
        assert!(matches!(
            ind.require_full_support(),
            Err(Error::ZeroMassInput(_))
        ));
        let post = ind.posterior.unwrap();
        assert!(close(post[0].as_ref().unwrap(), &[1.0, 0.0]));
        assert!(post[2].is_none());
    }

    #[test]
    fn distortion_examples() {
        let ch = binary_example();
        let aux = AuxLaw::StrictlyCausal {
            q_x: uniform(2),
            q_u_xs: Kernel::deterministic(4, 2, |r| r % 2),
        };
        let h = Estimator::xuy(2, 2, 2, |_, u, _| u);
        let rep = expected_distortion(&ch, &aux, &h).unwrap();
        assert_eq!(rep.worst, 0.0);
        let h0 = Estimator::xuy(2, 2, 2, |_, _, _| 0);
        let rep = expected_distortion(&ch, &aux, &h0).unwrap();
        assert!((rep.worst - 0.1).abs() < 1e-15);
        assert!(rep
            .per_jammer_symbol
            .iter()
            .all(|&v| (v - 0.1).abs() < 1e-15));
    }

    #[test]
    fn bayes_recovers_revealed_state() {
        let ch = binary_example();
        let aux = AuxLaw::StrictlyCausal {
            q_x: uniform(2),
            q_u_xs: Kernel::deterministic(4, 2, |r| r % 2),
        };
        let h = bayes_estimator(&ch, &aux, &[0.5, 0.5]).unwrap();
        assert_eq!(expected_distortion(&ch, &aux, &h).unwrap().worst, 0.0);
    }
}
