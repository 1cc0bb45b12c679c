use serde::{Deserialize, Serialize};

use super::coupling::coupling_min_mi;
use super::info::{worst_jammer_grouped, worst_jammer_mi, JammerFamily};
use crate::channel::{
    average_out_state, induce_u_channel, AuxLaw, JointDistribution, StateChannel,
};
use crate::error::{Error, Result};
use crate::sym::{build_graph, DEFAULT_SYM_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodingMode {
    StrictlyCausal,
    Noncausal,
}

/// Concrete rates in bits per symbol.
///
/// Strictly causal: `r` message rate, `r_s` bin rate, `r_s_tilde`
/// description rate, `r_s_prime = r_s_tilde - r_s` within-bin rate.
/// Noncausal: `r_s_tilde` is the codebook rate, `r = r_s` the message
/// (bin) rate and `r_s_prime` the within-bin rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePlan {
    pub mode: CodingMode,
    pub r: f64,
    pub r_s: f64,
    pub r_s_tilde: f64,
    pub r_s_prime: f64,
    pub tau: f64,
    /// `I(U;S|X)` (strictly causal) or `I(U;S)` (noncausal).
    pub covering_rate: f64,
    /// Largest admissible message rate under this plan.
    pub max_r: f64,
}

impl RatePlan {
    /// Lowers the message rate, keeping every constraint satisfied.
    pub fn with_message_rate(&self, r: f64) -> Result<Self> {
        if !(r > 0.0) || r > self.max_r + 1e-12 {
            return Err(Error::InsufficientHeadroom(format!(
                "message rate {r} outside (0, {}]",
                self.max_r
            )));
        }
        let mut p = self.clone();
        p.r = r;
        if p.mode == CodingMode::Noncausal {
            p.r_s = r;
            p.r_s_prime = p.r_s_tilde - r;
        }
        Ok(p)
    }
}

/// Rates for the coding simulator.
///
/// Strictly causal: `R~_S = I(U;S|X) + 2 tau`, `R + R_S = min I(X;Y) - tau`
/// and `R_S' = R~_S - R_S <= min I(U;Y|X) - tau`, with `R_S` as small as
/// allowed. Noncausal: `R~ = min{min_{Q_J|U} I(U;Y), D(Q_U)} - tau` and
/// `R = R~ - I(U;S) - 2 tau`.
pub fn rate_plan(ch: &StateChannel, aux: &AuxLaw, tau: f64) -> Result<RatePlan> {
    if !(tau > 0.0) {
        return Err(Error::Config("tau must be positive".into()));
    }
    aux.check(ch)?;
    let (nx, ns, nu) = (ch.nx(), ch.ns(), aux.nu());
    let joint = JointDistribution::new_unchecked(vec![nx, nu, ns], aux.joint_xus(ch));
    let ind = induce_u_channel(ch, aux)?;
    match aux {
        AuxLaw::StrictlyCausal { q_x, .. } => {
            let a = worst_jammer_mi(&average_out_state(ch), q_x, JammerFamily::Iid)?.value;
            let comp = ind.avc.composite().expect("composite input");
            let group: Vec<usize> = (0..ind.avc.n_in()).map(|i| comp.split(i).0).collect();
            let b = worst_jammer_grouped(&ind.avc, &ind.input_law, &group, nx, JammerFamily::Iid)?
                .value;
            let c = joint.mutual_information(&[1], &[2], &[0])?;
            let used_u = ind.input_law.iter().filter(|&&p| p > 0.0).count();
            let single_u = (0..nx).all(|x| {
                (0..nu)
                    .filter(|&u| ind.input_law[comp.index(x, u)] > 0.0)
                    .count()
                    <= 1
            });
            let r_s_tilde = c + 2.0 * tau;
            let r_s = if used_u == 0 || single_u {
                r_s_tilde
            } else {
                if b - tau < 0.0 {
                    return Err(Error::InsufficientHeadroom(format!(
                        "min I(U;Y|X) = {b:.4} leaves no within-bin rate at tau = {tau}"
                    )));
                }
                (r_s_tilde - (b - tau)).max(0.0)
            };
            let r = a - tau - r_s;
            if r <= 0.0 {
                return Err(Error::InsufficientHeadroom(format!(
                    "R = min I(X;Y) - tau - R_S = {a:.4} - {tau} - {r_s:.4} <= 0"
                )));
            }
            Ok(RatePlan {
                mode: CodingMode::StrictlyCausal,
                r,
                r_s,
                r_s_tilde,
                r_s_prime: r_s_tilde - r_s,
                tau,
                covering_rate: c,
                max_r: r,
            })
        }
        AuxLaw::Noncausal { .. } => {
            let support: Vec<usize> = (0..nu).filter(|&u| ind.input_law[u] > 0.0).collect();
            let avc = ind.avc.restrict_inputs(&support);
            let q_u: Vec<f64> = support.iter().map(|&u| ind.input_law[u]).collect();
            let a = worst_jammer_mi(&avc, &q_u, JammerFamily::PerInput)?.value;
            let graph = build_graph(&avc, DEFAULT_SYM_TOL)?;
            let dq = coupling_min_mi(&q_u, &graph)?.value;
            let i_us = joint.mutual_information(&[1], &[2], &[])?;
            let r_tilde = a.min(dq) - tau;
            let r = r_tilde - i_us - 2.0 * tau;
            if r <= 0.0 {
                return Err(Error::InsufficientHeadroom(format!(
                    "R = min(min I(U;Y), D(Q_U)) - I(U;S) - 3 tau = {:.4} - {i_us:.4} - {} <= 0",
                    a.min(dq),
                    3.0 * tau
                )));
            }
            Ok(RatePlan {
                mode: CodingMode::Noncausal,
                r,
                r_s: r,
                r_s_tilde: r_tilde,
                r_s_prime: r_tilde - r,
                tau,
                covering_rate: i_us,
                max_r: r,
            })
        }
    }
}
