use serde::{Deserialize, Serialize};

use super::coupling::coupling_min_mi;
use super::info::{
    grouped_mi_grad, input_divergences, jammed, worst_jammer_grouped, worst_jammer_mi,
    JammerFamily, JammerMin,
};
use super::opt::{blahut_arimoto, maximize_concave, minimize_convex};
use super::search::worst_case_distortion;
use super::{BoundKind, BoundResult, SearchConfig};
use crate::channel::{
    average_out_state, entropy, induce_u_channel, AVChannel, AuxLaw, Composite, Estimator,
    JammerLaw, JointDistribution, Kernel, StateChannel,
};
use crate::error::{Error, Result};
use crate::sym::{build_graph, indicator_u_given_x, sym_margin, SymVariant};

fn law_rows(law: &JammerLaw) -> Vec<Vec<f64>> {
    match law {
        JammerLaw::Iid(q) => vec![q.clone()],
        JammerLaw::PerInput(k) => k.to_rows(),
    }
}

/// Jammer contraction of a DMC gradient: `d/dQ(j) = sum_{i,y} g(y|i) q(y|i,j)`.
fn contract_iid(avc: &AVChannel, gw: &[f64]) -> Vec<f64> {
    let (n_in, nj, ny) = (avc.n_in(), avc.nj(), avc.ny());
    let mut g = vec![0.0; nj];
    for i in 0..n_in {
        for (j, gj) in g.iter_mut().enumerate() {
            let row = avc.row(i, j);
            *gj += (0..ny).map(|y| gw[i * ny + y] * row[y]).sum::<f64>();
        }
    }
    g
}

/// `max_{Q_X} min_{Q_J} I(X;Y)`, with the min-max side computed through
/// Blahut-Arimoto to report a duality gap. Forced to zero when the AVC is
/// symmetrizable.
pub fn minimax_capacity(avc: &AVChannel, cfg: &SearchConfig) -> Result<BoundResult> {
    cfg.validate()?;
    let mut r = BoundResult::new(BoundKind::Minimax);
    let (n_in, nj, ny) = (avc.n_in(), avc.nj(), avc.ny());
    let sym = sym_margin(avc, SymVariant::P2pX, cfg.tolerance)?;
    if sym.margin.is_finite() {
        r.term("sym_margin", sym.margin);
    }
    if sym.symmetrizable {
        r.fail("symmetrizable-X");
    }

    let f = |p: &[f64]| -> (f64, Vec<f64>) {
        match worst_jammer_mi(avc, p, JammerFamily::Iid) {
            Ok(m) => {
                let w = jammed(avc, &m.argmin);
                (m.value, input_divergences(&w, ny, p))
            }
            Err(_) => (f64::NEG_INFINITY, vec![0.0; p.len()]),
        }
    };
    let (q_x, _) = maximize_concave(n_in, &f, cfg.grid_resolution, cfg.refinement_rounds);
    let inner = worst_jammer_mi(avc, &q_x, JammerFamily::Iid)?;

    let one = vec![0; n_in];
    let cap = |q: &[f64]| -> (f64, Vec<f64>) {
        let w = jammed(avc, &JammerLaw::Iid(q.to_vec()));
        let ba = blahut_arimoto(&w, ny, &one, &[1.0], 1e-12, 20_000);
        let (_, gw) = grouped_mi_grad(&w, ny, &ba.p, &one, 1);
        (ba.lower, contract_iid(avc, &gw))
    };
    let start = match &inner.argmin {
        JammerLaw::Iid(q) => q.clone(),
        JammerLaw::PerInput(_) => vec![1.0 / nj as f64; nj],
    };
    let outer = minimize_convex(nj, start, &cap, 2000, 1e-9);
    let w = jammed(avc, &JammerLaw::Iid(outer.x.clone()));
    let upper = blahut_arimoto(&w, ny, &one, &[1.0], 1e-12, 50_000).upper;

    r.term("max_min", inner.value);
    r.term("max_min_lower", inner.lower);
    r.term("min_max_upper", upper);
    r.duality_gap = Some(upper - inner.lower);
    r.inner_argmin.insert("Q_J".into(), law_rows(&inner.argmin));
    r.inner_argmin.insert("Q_J (min-max)".into(), vec![outer.x]);
    r.outer_argmax.insert("Q_X".into(), vec![q_x]);
    r.finish(inner.value);
    if !r.feasible {
        r.value = 0.0;
    }
    Ok(r)
}

/// Information terms shared by the strictly causal bounds.
struct CausalTerms {
    aux: AuxLaw,
    avg: AVChannel,
    message: JammerMin,
    description: JammerMin,
    i_us_given_x: f64,
}

fn causal_terms(
    ch: &StateChannel,
    q_x: &[f64],
    q_u_xs: &Kernel,
    message_family: JammerFamily,
) -> Result<CausalTerms> {
    let aux = AuxLaw::StrictlyCausal {
        q_x: q_x.to_vec(),
        q_u_xs: q_u_xs.clone(),
    };
    aux.check(ch)?;
    let (nx, ns, nu) = (ch.nx(), ch.ns(), aux.nu());
    let avg = average_out_state(ch);
    let message = worst_jammer_mi(&avg, q_x, message_family)?;
    let ind = induce_u_channel(ch, &aux)?;
    let comp = ind
        .avc
        .composite()
        .expect("strictly causal channels are composite");
    let group: Vec<usize> = (0..ind.avc.n_in()).map(|i| comp.split(i).0).collect();
    let description =
        worst_jammer_grouped(&ind.avc, &ind.input_law, &group, nx, JammerFamily::Iid)?;
    let joint = JointDistribution::new_unchecked(vec![nx, nu, ns], aux.joint_xus(ch));
    let i_us_given_x = joint.mutual_information(&[1], &[2], &[0])?;
    Ok(CausalTerms {
        aux,
        avg,
        message,
        description,
        i_us_given_x,
    })
}

fn record_causal(r: &mut BoundResult, t: &CausalTerms, q_x: &[f64], q_u_xs: &Kernel) {
    r.term("min I(U;Y|X)", t.description.value);
    r.term("I(U;S|X)", t.i_us_given_x);
    r.inner_argmin
        .insert("Q_J (description)".into(), law_rows(&t.description.argmin));
    r.outer_argmax.insert("Q_X".into(), vec![q_x.to_vec()]);
    r.outer_argmax.insert("Q_U|XS".into(), q_u_xs.to_rows());
}

fn check_distortion(
    r: &mut BoundResult,
    ch: &StateChannel,
    aux: &AuxLaw,
    h: &Estimator,
    d: f64,
    family: JammerFamily,
) -> Result<()> {
    let (worst, arg) = worst_case_distortion(ch, aux, h, family)?;
    r.term("distortion", worst);
    r.inner_argmin.insert("Q_J (distortion)".into(), arg);
    r.estimator = Some(h.clone());
    if worst > d + 1e-12 {
        r.fail(format!("distortion {worst:.6} exceeds D = {d}"));
    }
    Ok(())
}

fn check_indicator(
    r: &mut BoundResult,
    ch: &StateChannel,
    q_x: &[f64],
    q_u_xs: &Kernel,
    tol: f64,
) -> Result<()> {
    let ind = indicator_u_given_x(ch, q_x, q_u_xs, tol)?;
    r.term("indicator U|X", ind as f64);
    if ind == 0 {
        r.fail("symmetrizable-U|X");
    }
    Ok(())
}

/// Strictly causal state knowledge under the average error criterion:
/// `min_{Q_J} I(X;Y) + min_{Q_J} I(U;Y|X) - I(U;S|X)`, feasible when the
/// induced channel is nonsymmetrizable-`U|X`, the state-averaged channel is
/// nonsymmetrizable, and the worst-case distortion of `h` is at most `d`.
pub fn strictly_causal_bound_at(
    ch: &StateChannel,
    q_x: &[f64],
    q_u_xs: &Kernel,
    h: &Estimator,
    d: f64,
    cfg: &SearchConfig,
) -> Result<BoundResult> {
    let mut r = BoundResult::new(BoundKind::StrictlyCausal);
    let t = causal_terms(ch, q_x, q_u_xs, JammerFamily::Iid)?;
    r.term("min I(X;Y)", t.message.value);
    r.inner_argmin
        .insert("Q_J (message)".into(), law_rows(&t.message.argmin));
    record_causal(&mut r, &t, q_x, q_u_xs);
    check_indicator(&mut r, ch, q_x, q_u_xs, cfg.tolerance)?;
    if sym_margin(&t.avg, SymVariant::P2pX, cfg.tolerance)?.symmetrizable {
        r.fail("symmetrizable-X");
    }
    check_distortion(&mut r, ch, &t.aux, h, d, JammerFamily::Iid)?;
    r.finish(t.message.value + t.description.value - t.i_us_given_x);
    Ok(r)
}

/// Strictly causal, maximal error:
/// `min{min_{Q_J|X} I(X;Y), D(Q_X)} + min_{Q_J} I(U;Y|X) - I(U;S|X)`,
/// feasible when the graph of the state-averaged channel has a pair of
/// unconnected inputs, the `U|X` indicator is one, and distortion is at
/// most `d`.
pub fn strictly_causal_maximal_bound_at(
    ch: &StateChannel,
    q_x: &[f64],
    q_u_xs: &Kernel,
    h: &Estimator,
    d: f64,
    cfg: &SearchConfig,
) -> Result<BoundResult> {
    let mut r = BoundResult::new(BoundKind::StrictlyCausalMaximal);
    let t = causal_terms(ch, q_x, q_u_xs, JammerFamily::PerInput)?;
    let graph = build_graph(&t.avg, cfg.tolerance)?;
    let d_qx = coupling_min_mi(q_x, &graph)?;
    r.term("min I(X;Y) per-input", t.message.value);
    r.term("D(Q_X)", d_qx.value);
    r.inner_argmin
        .insert("Q_J|X".into(), law_rows(&t.message.argmin));
    record_causal(&mut r, &t, q_x, q_u_xs);
    if graph.is_complete() {
        r.fail("complete-graph");
    }
    check_indicator(&mut r, ch, q_x, q_u_xs, cfg.tolerance)?;
    check_distortion(&mut r, ch, &t.aux, h, d, JammerFamily::Iid)?;
    r.finish(t.message.value.min(d_qx.value) + t.description.value - t.i_us_given_x);
    Ok(r)
}

/// Composite `(x, s)` AVC with rows `W(.|x,s,j)`, index `x * ns + s`.
fn state_input_avc(ch: &StateChannel) -> AVChannel {
    let (nx, ns, nj, ny) = (ch.nx(), ch.ns(), ch.nj(), ch.ny());
    let mut q = Vec::with_capacity(nx * ns * nj * ny);
    for x in 0..nx {
        for s in 0..ns {
            for j in 0..nj {
                q.extend_from_slice(ch.row(x, s, j));
            }
        }
    }
    AVChannel::from_parts(
        nx * ns,
        nj,
        ny,
        q,
        vec![true; nx * ns],
        Some(Composite { nx, nu: ns }),
    )
}

/// Lossless state reconstruction with strictly causal knowledge:
/// `max_{Q_X} [min_{Q_J} I(X;Y) - max_{Q_J'} H(S|X,Y)]^+`, feasible when
/// the channel is nonsymmetrizable-`S|X`.
pub fn lossless_strictly_causal_bound(
    ch: &StateChannel,
    cfg: &SearchConfig,
) -> Result<BoundResult> {
    cfg.validate()?;
    let mut r = BoundResult::new(BoundKind::LosslessStrictlyCausal);
    let (nx, ns, ny) = (ch.nx(), ch.ns(), ch.ny());
    let avg = average_out_state(ch);
    let xs = state_input_avc(ch);
    let group: Vec<usize> = (0..nx * ns).map(|i| i / ns).collect();
    let h_s = entropy(ch.q_s());
    let q_s = ch.q_s().to_vec();
    let joint =
        |q_x: &[f64]| -> Vec<f64> { (0..nx * ns).map(|i| q_x[i / ns] * q_s[i % ns]).collect() };

    let f = |q_x: &[f64]| -> (f64, Vec<f64>) {
        let (Ok(a), Ok(b)) = (
            worst_jammer_mi(&avg, q_x, JammerFamily::Iid),
            worst_jammer_grouped(&xs, &joint(q_x), &group, nx, JammerFamily::Iid),
        ) else {
            return (f64::NEG_INFINITY, vec![0.0; nx]);
        };
        let wa = jammed(&avg, &a.argmin);
        let mut g = input_divergences(&wa, ny, q_x);
        // I(S;Y|X=x) under the minimizing Q_J'
        let wb = jammed(&xs, &b.argmin);
        for (x, gx) in g.iter_mut().enumerate() {
            let block = &wb[x * ns * ny..(x + 1) * ns * ny];
            *gx += input_divergences(block, ny, &q_s)
                .iter()
                .zip(&q_s)
                .map(|(d, p)| d * p)
                .sum::<f64>();
        }
        (a.value - h_s + b.value, g)
    };
    let (q_x, _) = maximize_concave(nx, &f, cfg.grid_resolution, cfg.refinement_rounds);
    let a = worst_jammer_mi(&avg, &q_x, JammerFamily::Iid)?;
    let b = worst_jammer_grouped(&xs, &joint(&q_x), &group, nx, JammerFamily::Iid)?;

    r.term("min I(X;Y)", a.value);
    r.term("H(S)", h_s);
    r.term("min I(S;Y|X)", b.value);
    r.term("max H(S|X,Y)", h_s - b.value);
    r.inner_argmin.insert("Q_J".into(), law_rows(&a.argmin));
    r.inner_argmin.insert("Q_J'".into(), law_rows(&b.argmin));
    r.outer_argmax.insert("Q_X".into(), vec![q_x]);
    let sym = sym_margin(ch, SymVariant::SGivenX, cfg.tolerance)?;
    if sym.margin.is_finite() {
        r.term("sym_margin S|X", sym.margin);
    }
    if sym.symmetrizable {
        r.fail("symmetrizable-S|X");
    }
    r.finish(a.value - h_s + b.value);
    Ok(r)
}

/// Noncausal auxiliary channel restricted to the support of `Q_U`.
struct NoncausalTerms {
    aux: AuxLaw,
    avc: AVChannel,
    q_u: Vec<f64>,
    support: Vec<usize>,
    i_us: f64,
}

fn noncausal_terms(ch: &StateChannel, q_u_s: &Kernel, q_x_us: &Kernel) -> Result<NoncausalTerms> {
    let aux = AuxLaw::Noncausal {
        q_u_s: q_u_s.clone(),
        q_x_us: q_x_us.clone(),
    };
    aux.check(ch)?;
    let (nx, ns, nu) = (ch.nx(), ch.ns(), aux.nu());
    let ind = induce_u_channel(ch, &aux)?;
    let support: Vec<usize> = (0..nu).filter(|&u| ind.input_law[u] > 0.0).collect();
    let avc = ind.avc.restrict_inputs(&support);
    let q_u: Vec<f64> = support.iter().map(|&u| ind.input_law[u]).collect();
    let joint = JointDistribution::new_unchecked(vec![nx, nu, ns], aux.joint_xus(ch));
    let i_us = joint.mutual_information(&[1], &[2], &[])?;
    Ok(NoncausalTerms {
        aux,
        avc,
        q_u,
        support,
        i_us,
    })
}

fn record_noncausal(r: &mut BoundResult, t: &NoncausalTerms, q_u_s: &Kernel, q_x_us: &Kernel) {
    r.term("I(U;S)", t.i_us);
    r.outer_argmax.insert("Q_U|S".into(), q_u_s.to_rows());
    r.outer_argmax.insert("Q_X|US".into(), q_x_us.to_rows());
    r.outer_argmax.insert(
        "U support".into(),
        vec![t.support.iter().map(|&u| u as f64).collect()],
    );
}

/// Noncausal state knowledge, average error: `min_{Q_J} I(U;Y) - I(U;S)`,
/// feasible when the induced `Q_{Y|UJ}` on the support of `Q_U` is
/// nonsymmetrizable and the distortion of `h` is at most `d`.
pub fn noncausal_bound_at(
    ch: &StateChannel,
    q_u_s: &Kernel,
    q_x_us: &Kernel,
    h: &Estimator,
    d: f64,
    cfg: &SearchConfig,
) -> Result<BoundResult> {
    let mut r = BoundResult::new(BoundKind::Noncausal);
    let t = noncausal_terms(ch, q_u_s, q_x_us)?;
    let a = worst_jammer_mi(&t.avc, &t.q_u, JammerFamily::Iid)?;
    r.term("min I(U;Y)", a.value);
    r.inner_argmin.insert("Q_J".into(), law_rows(&a.argmin));
    record_noncausal(&mut r, &t, q_u_s, q_x_us);
    if sym_margin(&t.avc, SymVariant::P2pX, cfg.tolerance)?.symmetrizable {
        r.fail("symmetrizable-U");
    }
    check_distortion(&mut r, ch, &t.aux, h, d, JammerFamily::Iid)?;
    r.finish(a.value - t.i_us);
    Ok(r)
}

/// Noncausal, maximal error: `min{min_{Q_J|U} I(U;Y), D(Q_U)} - I(U;S)`,
/// feasible when the graph of the induced channel has a pair of
/// unconnected inputs and the distortion of `h` is at most `d`.
pub fn noncausal_maximal_bound_at(
    ch: &StateChannel,
    q_u_s: &Kernel,
    q_x_us: &Kernel,
    h: &Estimator,
    d: f64,
    cfg: &SearchConfig,
) -> Result<BoundResult> {
    let mut r = BoundResult::new(BoundKind::NoncausalMaximal);
    let t = noncausal_terms(ch, q_u_s, q_x_us)?;
    let a = worst_jammer_mi(&t.avc, &t.q_u, JammerFamily::PerInput)?;
    let graph = build_graph(&t.avc, cfg.tolerance)?;
    let d_qu = coupling_min_mi(&t.q_u, &graph)?;
    r.term("min I(U;Y) per-input", a.value);
    r.term("D(Q_U)", d_qu.value);
    r.inner_argmin.insert("Q_J|U".into(), law_rows(&a.argmin));
    record_noncausal(&mut r, &t, q_u_s, q_x_us);
    if graph.is_complete() {
        r.fail("complete-graph");
    }
    check_distortion(&mut r, ch, &t.aux, h, d, JammerFamily::Iid)?;
    r.finish(a.value.min(d_qu.value) - t.i_us);
    Ok(r)
}

/// Binary-output maximal-error bounds. Noncausal: `min_{Q_J|U} I(U;Y) -
/// I(U;S)`; strictly causal: `min_{Q_J|X} I(X;Y) + min_{Q_J} I(U;Y|X) -
/// I(U;S|X)`. Distortion is maximized over per-input jammer kernels.
pub fn binary_output_bound(
    ch: &StateChannel,
    aux: &AuxLaw,
    h: &Estimator,
    d: f64,
    cfg: &SearchConfig,
) -> Result<BoundResult> {
    if ch.ny() != 2 {
        return Err(Error::NotBinaryOutput(ch.ny()));
    }
    match aux {
        AuxLaw::Noncausal { q_u_s, q_x_us } => {
            let mut r = BoundResult::new(BoundKind::BinaryNoncausal);
            let t = noncausal_terms(ch, q_u_s, q_x_us)?;
            let a = worst_jammer_mi(&t.avc, &t.q_u, JammerFamily::PerInput)?;
            r.term("message", a.value);
            r.term("min I(U;Y) per-input", a.value);
            r.inner_argmin.insert("Q_J|U".into(), law_rows(&a.argmin));
            record_noncausal(&mut r, &t, q_u_s, q_x_us);
            check_distortion(&mut r, ch, &t.aux, h, d, JammerFamily::PerInput)?;
            r.finish(a.value - t.i_us);
            Ok(r)
        }
        AuxLaw::StrictlyCausal { q_x, q_u_xs } => {
            let mut r = BoundResult::new(BoundKind::BinaryStrictlyCausal);
            let t = causal_terms(ch, q_x, q_u_xs, JammerFamily::PerInput)?;
            r.term("message", t.message.value);
            r.term("min I(X;Y) per-input", t.message.value);
            r.inner_argmin
                .insert("Q_J|X".into(), law_rows(&t.message.argmin));
            record_causal(&mut r, &t, q_x, q_u_xs);
            check_indicator(&mut r, ch, q_x, q_u_xs, cfg.tolerance)?;
            check_distortion(&mut r, ch, &t.aux, h, d, JammerFamily::PerInput)?;
            r.finish(t.message.value + t.description.value - t.i_us_given_x);
            Ok(r)
        }
    }
}

/// Lossless state reconstruction without a message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LosslessFeasibility {
    pub feasible: bool,
    /// `H(S)`.
    pub lhs: f64,
    /// `min_{Q_J} max_{Q_{X|S}} I(X,S;Y)` (upper end of the bracket).
    pub rhs: f64,
    /// Certified lower end of the bracket for `rhs`.
    pub rhs_lower: f64,
    /// Nonsymmetrizable-`X x S`.
    pub sym_ok: bool,
    pub worst_q_j: Vec<f64>,
    pub best_q_x_s: Vec<Vec<f64>>,
}

/// Whether the state can be conveyed losslessly: `H(S) <= min_{Q_J}
/// max_{Q_{X|S}} I(X,S;Y)` and the channel is nonsymmetrizable-`X x S`.
pub fn pure_lossless_feasibility(
    ch: &StateChannel,
    cfg: &SearchConfig,
) -> Result<LosslessFeasibility> {
    cfg.validate()?;
    let (nx, ns, nj, ny) = (ch.nx(), ch.ns(), ch.nj(), ch.ny());
    let xs = state_input_avc(ch);
    let group: Vec<usize> = (0..nx * ns).map(|i| i % ns).collect();
    let mass = ch.q_s().to_vec();
    let inner = |q: &[f64]| {
        let w = jammed(&xs, &JammerLaw::Iid(q.to_vec()));
        let ba = blahut_arimoto(&w, ny, &group, &mass, 1e-12, 20_000);
        (w, ba)
    };
    let f = |q: &[f64]| -> (f64, Vec<f64>) {
        let (w, ba) = inner(q);
        let (_, gw) = grouped_mi_grad(&w, ny, &ba.p, &vec![0; nx * ns], 1);
        (ba.lower, contract_iid(&xs, &gw))
    };
    let mut best = (f64::INFINITY, vec![1.0 / nj as f64; nj]);
    for s in super::opt::simplex_grid(nj, cfg.grid_resolution.min(16)) {
        let v = f(&s).0;
        if v < best.0 {
            best = (v, s);
        }
    }
    let m = minimize_convex(nj, best.1, &f, 2000, 1e-9);
    let (_, ba) = inner(&m.x);
    let lhs = entropy(ch.q_s());
    let sym_ok = !sym_margin(ch, SymVariant::XS, cfg.tolerance)?.symmetrizable;
    // conditional law Q_{X|S} from the joint optimizer
    let best_q_x_s = (0..ns)
        .map(|s| {
            (0..nx)
                .map(|x| {
                    if mass[s] > 0.0 {
                        ba.p[x * ns + s] / mass[s]
                    } else {
                        1.0 / nx as f64
                    }
                })
                .collect()
        })
        .collect();
    Ok(LosslessFeasibility {
        feasible: sym_ok && lhs <= ba.upper + cfg.tolerance,
        lhs,
        rhs: ba.upper,
        rhs_lower: m.lower.min(ba.upper),
        sym_ok,
        worst_q_j: m.x,
        best_q_x_s,
    })
}
