use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::evaluate::{
    binary_output_bound, lossless_strictly_causal_bound, minimax_capacity, noncausal_bound_at,
    noncausal_maximal_bound_at, strictly_causal_bound_at, strictly_causal_maximal_bound_at,
};
use super::info::JammerFamily;
use super::opt::pattern_search;
use super::{BoundKind, BoundResult, SearchConfig};
use crate::channel::{
    average_out_state, bayes_estimator, expected_distortion, AuxLaw, Estimator, Kernel,
    StateChannel,
};
use crate::error::{Error, Result};

/// Worst expected distortion of `h` over i.i.d. jammer laws, or over
/// per-input kernels conditioned on `X` (strictly causal) or `U`
/// (noncausal). Returns the value and the maximizing law as rows.
pub fn worst_case_distortion(
    ch: &StateChannel,
    aux: &AuxLaw,
    h: &Estimator,
    family: JammerFamily,
) -> Result<(f64, Vec<Vec<f64>>)> {
    let rep = expected_distortion(ch, aux, h)?;
    if family == JammerFamily::Iid {
        return Ok((rep.worst, vec![rep.worst_q_j]));
    }
    let (nx, ns, nj, ny, nu) = (ch.nx(), ch.ns(), ch.nj(), ch.ny(), aux.nu());
    let p = aux.joint_xus(ch);
    let dist = ch.distortion();
    let keys = if aux.is_noncausal() { nu } else { nx };
    let mut c = vec![vec![0.0; nj]; keys];
    for x in 0..nx {
        for u in 0..nu {
            let key = if aux.is_noncausal() { u } else { x };
            for s in 0..ns {
                let pm = p[(x * nu + u) * ns + s];
                if pm == 0.0 {
                    continue;
                }
                for (j, cj) in c[key].iter_mut().enumerate() {
                    for y in 0..ny {
                        *cj += pm * ch.w(x, s, j, y) * dist[s][h.estimate(x, u, y)];
                    }
                }
            }
        }
    }
    let mut total = 0.0;
    let rows = c
        .iter()
        .map(|row| {
            let (arg, &m) = row
                .iter()
                .enumerate()
                .fold(
                    (0, &f64::NEG_INFINITY),
                    |b, e| if *e.1 > *b.1 { e } else { b },
                );
            total += m;
            let mut r = vec![0.0; nj];
            r[arg] = 1.0;
            r
        })
        .collect();
    Ok((total, rows))
}

/// Deterministic estimator with the smallest worst-case (i.i.d. jammer)
/// distortion found by ten rounds of fictitious play between the Bayes
/// estimator and the jammer's best response.
pub fn optimal_estimator(ch: &StateChannel, aux: &AuxLaw) -> Result<Estimator> {
    let nj = ch.nj();
    let mut counts = vec![1.0 / nj as f64; nj];
    let mut best: Option<(f64, Estimator)> = None;
    for round in 0..10 {
        let total: f64 = counts.iter().sum();
        let q: Vec<f64> = counts.iter().map(|c| c / total).collect();
        let h = bayes_estimator(ch, aux, &q)?;
        let rep = expected_distortion(ch, aux, &h)?;
        if best.as_ref().is_none_or(|b| rep.worst < b.0 - 1e-15) {
            best = Some((rep.worst, h));
        }
        let arg = rep.worst_q_j.iter().position(|&v| v == 1.0).unwrap_or(0);
        counts[arg] += 1.0 + round as f64;
    }
    Ok(best.expect("at least one round").1)
}

fn evaluate_kind(
    kind: BoundKind,
    ch: &StateChannel,
    aux: &AuxLaw,
    d: f64,
    cfg: &SearchConfig,
) -> Result<BoundResult> {
    if kind.is_noncausal() != aux.is_noncausal() {
        return Err(Error::Config(format!(
            "auxiliary law does not match bound {}",
            kind.name()
        )));
    }
    let h = optimal_estimator(ch, aux)?;
    match (kind, aux) {
        (BoundKind::StrictlyCausal, AuxLaw::StrictlyCausal { q_x, q_u_xs }) => {
            strictly_causal_bound_at(ch, q_x, q_u_xs, &h, d, cfg)
        }
        (BoundKind::StrictlyCausalMaximal, AuxLaw::StrictlyCausal { q_x, q_u_xs }) => {
            strictly_causal_maximal_bound_at(ch, q_x, q_u_xs, &h, d, cfg)
        }
        (BoundKind::Noncausal, AuxLaw::Noncausal { q_u_s, q_x_us }) => {
            noncausal_bound_at(ch, q_u_s, q_x_us, &h, d, cfg)
        }
        (BoundKind::NoncausalMaximal, AuxLaw::Noncausal { q_u_s, q_x_us }) => {
            noncausal_maximal_bound_at(ch, q_u_s, q_x_us, &h, d, cfg)
        }
        (BoundKind::BinaryNoncausal | BoundKind::BinaryStrictlyCausal, _) => {
            binary_output_bound(ch, aux, &h, d, cfg)
        }
        _ => Err(Error::Config(format!(
            "{} has no auxiliary law",
            kind.name()
        ))),
    }
}

/// Block sizes of the free kernels.
fn blocks(kind: BoundKind, ch: &StateChannel, nu: usize) -> Vec<usize> {
    let (nx, ns) = (ch.nx(), ch.ns());
    if kind.is_noncausal() {
        let mut b = vec![nu; ns];
        b.extend(std::iter::repeat_n(nx, nu * ns));
        b
    } else {
        let mut b = vec![nx];
        b.extend(std::iter::repeat_n(nu, nx * ns));
        b
    }
}

fn decode(kind: BoundKind, ch: &StateChannel, nu: usize, v: &[f64]) -> AuxLaw {
    let (nx, ns) = (ch.nx(), ch.ns());
    if kind.is_noncausal() {
        let (a, b) = v.split_at(ns * nu);
        AuxLaw::Noncausal {
            q_u_s: Kernel::from_flat_unchecked(ns, nu, a.to_vec()),
            q_x_us: Kernel::from_flat_unchecked(nu * ns, nx, b.to_vec()),
        }
    } else {
        let (a, b) = v.split_at(nx);
        AuxLaw::StrictlyCausal {
            q_x: a.to_vec(),
            q_u_xs: Kernel::from_flat_unchecked(nx * ns, nu, b.to_vec()),
        }
    }
}

fn encode(aux: &AuxLaw) -> Vec<f64> {
    match aux {
        AuxLaw::StrictlyCausal { q_x, q_u_xs } => {
            let mut v = q_x.clone();
            v.extend_from_slice(q_u_xs.as_flat());
            v
        }
        AuxLaw::Noncausal { q_u_s, q_x_us } => {
            let mut v = q_u_s.as_flat().to_vec();
            v.extend_from_slice(q_x_us.as_flat());
            v
        }
    }
}

/// Structured starting points: `U = S`, constant `U`, uniform `U`, and a
/// state-blind `U = X` design for the noncausal case.
fn structured_seeds(kind: BoundKind, ch: &StateChannel, nu: usize) -> Vec<AuxLaw> {
    let (nx, ns) = (ch.nx(), ch.ns());
    let ux = vec![1.0 / nx as f64; nx];
    let uu = vec![1.0 / nu as f64; nu];
    if kind.is_noncausal() {
        let x_of_u = Kernel::deterministic(nu * ns, nx, |r| (r / ns) % nx);
        let state_u = Kernel::deterministic(ns, nu, |s| s.min(nu - 1));
        let mut blind = vec![0.0; nu];
        let k = nu.min(nx);
        blind[..k].iter_mut().for_each(|v| *v = 1.0 / k as f64);
        vec![
            AuxLaw::Noncausal {
                q_u_s: state_u.clone(),
                q_x_us: Kernel::constant(nu * ns, &ux),
            },
            AuxLaw::Noncausal {
                q_u_s: state_u,
                q_x_us: x_of_u.clone(),
            },
            AuxLaw::Noncausal {
                q_u_s: Kernel::constant(ns, &blind),
                q_x_us: x_of_u,
            },
            AuxLaw::Noncausal {
                q_u_s: Kernel::constant(ns, &uu),
                q_x_us: Kernel::constant(nu * ns, &ux),
            },
        ]
    } else {
        vec![
            AuxLaw::StrictlyCausal {
                q_x: ux.clone(),
                q_u_xs: Kernel::deterministic(nx * ns, nu, |r| (r % ns).min(nu - 1)),
            },
            AuxLaw::StrictlyCausal {
                q_x: ux.clone(),
                q_u_xs: Kernel::deterministic(nx * ns, nu, |_| 0),
            },
            AuxLaw::StrictlyCausal {
                q_x: ux.clone(),
                q_u_xs: Kernel::deterministic(nx * ns, nu, |r| (r / ns + r % ns) % nu),
            },
            AuxLaw::StrictlyCausal {
                q_x: ux,
                q_u_xs: Kernel::constant(nx * ns, &uu),
            },
        ]
    }
}

fn random_point(blocks: &[usize], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v = Vec::new();
    for &b in blocks {
        let e: Vec<f64> = (0..b).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let s: f64 = e.iter().sum();
        v.extend(e.into_iter().map(|x| x / s));
    }
    v
}

/// Best feasible point of a bound over its free kernels, from structured
/// seeds plus `cfg.multistart_count` random starts, each refined by local
/// search. The result is a heuristic lower bound on the maximum.
pub fn bound_search(
    kind: BoundKind,
    ch: &StateChannel,
    d: f64,
    cfg: &SearchConfig,
) -> Result<BoundResult> {
    let nu = cfg.u_card.unwrap_or(ch.ns() + 1);
    let seeds = match kind {
        BoundKind::Minimax | BoundKind::LosslessStrictlyCausal => Vec::new(),
        _ => structured_seeds(kind, ch, nu),
    };
    bound_search_seeded(kind, ch, d, cfg, seeds)
}

/// [`bound_search`] from caller-supplied seeds (plus the random starts).
pub fn bound_search_seeded(
    kind: BoundKind,
    ch: &StateChannel,
    d: f64,
    cfg: &SearchConfig,
    seeds: Vec<AuxLaw>,
) -> Result<BoundResult> {
    cfg.validate()?;
    match kind {
        BoundKind::Minimax => {
            let r = minimax_capacity(&average_out_state(ch), cfg)?;
            return if r.feasible {
                Ok(r)
            } else {
                Err(Error::NoFeasiblePoint(format!(
                    "state-averaged channel is {}",
                    r.infeasibility_reason.unwrap_or_default()
                )))
            };
        }
        BoundKind::LosslessStrictlyCausal => {
            let r = lossless_strictly_causal_bound(ch, cfg)?;
            return if r.feasible {
                Ok(r)
            } else {
                Err(Error::NoFeasiblePoint(format!(
                    "channel is {}",
                    r.infeasibility_reason.unwrap_or_default()
                )))
            };
        }
        _ => {}
    }
    if matches!(
        kind,
        BoundKind::BinaryNoncausal | BoundKind::BinaryStrictlyCausal
    ) && ch.ny() != 2
    {
        return Err(Error::NotBinaryOutput(ch.ny()));
    }
    let nu = seeds
        .first()
        .map(|s| s.nu())
        .unwrap_or_else(|| cfg.u_card.unwrap_or(ch.ns() + 1));
    let blocks = blocks(kind, ch, nu);
    let mut starts: Vec<Vec<f64>> = Vec::new();
    for s in &seeds {
        s.check(ch)?;
        if s.nu() != nu {
            return Err(Error::Config(
                "seeds must share one auxiliary alphabet".into(),
            ));
        }
        starts.push(encode(s));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    for _ in 0..cfg.multistart_count {
        starts.push(random_point(&blocks, &mut rng));
    }
    if starts.is_empty() {
        return Err(Error::Config("no starting points".into()));
    }

    let score = |v: &[f64]| -> f64 {
        match evaluate_kind(kind, ch, &decode(kind, ch, nu, v), d, cfg) {
            Ok(r) if r.feasible => r.terms["raw"].max(0.0),
            Ok(r) => {
                let excess = r.terms.get("distortion").map_or(0.0, |x| (x - d).max(0.0));
                -1.0 - excess
            }
            Err(_) => -10.0,
        }
    };
    let step0 = 0.25;
    let min_step =
        1.0 / (cfg.grid_resolution as f64 * (1u64 << cfg.refinement_rounds.min(20)) as f64);
    let finals: Vec<(Vec<f64>, f64)> = starts
        .into_par_iter()
        .map(|s| {
            if cfg.local_search {
                pattern_search(&blocks, s, &score, step0, min_step)
            } else {
                let v = score(&s);
                (s, v)
            }
        })
        .collect();
    let mut best: Option<BoundResult> = None;
    let mut reasons = std::collections::BTreeSet::new();
    for (v, _) in finals {
        let r = evaluate_kind(kind, ch, &decode(kind, ch, nu, &v), d, cfg)?;
        if let Some(why) = &r.infeasibility_reason {
            reasons.insert(why.split(' ').next().unwrap_or_default().to_string());
        }
        if r.feasible && best.as_ref().is_none_or(|b| r.value > b.value) {
            best = Some(r);
        }
    }
    let mut r = best.ok_or_else(|| {
        Error::NoFeasiblePoint(format!(
            "every probe violated a side constraint ({})",
            reasons.into_iter().collect::<Vec<_>>().join(", ")
        ))
    })?;
    r.heuristic = true;
    Ok(r)
}
