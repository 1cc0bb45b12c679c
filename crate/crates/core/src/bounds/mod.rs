//! Capacity and capacity-distortion bounds: minimax mutual information,
//! strictly causal and noncausal lower bounds under the average and
//! maximal error criteria, the minimum-information coupling `D(Q_U)`, and
//! concrete rate plans for the coding simulator.

mod coupling;
mod evaluate;
mod info;
pub mod opt;
mod rates;
mod search;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::channel::Estimator;
use crate::error::{Error, Result};

pub use coupling::{coupling_min_mi, CouplingResult};
pub use evaluate::{
    binary_output_bound, lossless_strictly_causal_bound, minimax_capacity, noncausal_bound_at,
    noncausal_maximal_bound_at, pure_lossless_feasibility, strictly_causal_bound_at,
    strictly_causal_maximal_bound_at, LosslessFeasibility,
};
pub use info::{
    grouped_mi, grouped_mi_grad, input_divergences, jammed, worst_jammer_grouped, worst_jammer_mi,
    JammerFamily, JammerMin,
};
pub use rates::{rate_plan, CodingMode, RatePlan};
pub use search::{bound_search, bound_search_seeded, optimal_estimator, worst_case_distortion};

/// Which bound an evaluation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// `max_{Q_X} min_{Q_J} I(X;Y)` of a stateless AVC.
    Minimax,
    /// Strictly causal state knowledge, average error:
    /// `min_{Q_J} I(X;Y) + min_{Q_J} I(U;Y|X) - I(U;S|X)`.
    StrictlyCausal,
    /// Strictly causal, lossless state reconstruction:
    /// `max_{Q_X} [min_{Q_J} I(X;Y) - max_{Q_J'} H(S|X,Y)]^+`.
    LosslessStrictlyCausal,
    /// Noncausal state knowledge, average error:
    /// `min_{Q_J} I(U;Y) - I(U;S)`.
    Noncausal,
    /// Noncausal, maximal error:
    /// `min{min_{Q_J|U} I(U;Y), D(Q_U)} - I(U;S)`.
    NoncausalMaximal,
    /// Strictly causal, maximal error:
    /// `min{min_{Q_J|X} I(X;Y), D(Q_X)} + min_{Q_J} I(U;Y|X) - I(U;S|X)`.
    StrictlyCausalMaximal,
    /// Binary output, noncausal, maximal error:
    /// `min_{Q_J|U} I(U;Y) - I(U;S)`.
    BinaryNoncausal,
    /// Binary output, strictly causal, maximal error:
    /// `min_{Q_J|X} I(X;Y) + min_{Q_J} I(U;Y|X) - I(U;S|X)`.
    BinaryStrictlyCausal,
}

impl BoundKind {
    pub const ALL: [BoundKind; 8] = [
        BoundKind::Minimax,
        BoundKind::StrictlyCausal,
        BoundKind::LosslessStrictlyCausal,
        BoundKind::Noncausal,
        BoundKind::NoncausalMaximal,
        BoundKind::StrictlyCausalMaximal,
        BoundKind::BinaryNoncausal,
        BoundKind::BinaryStrictlyCausal,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::Minimax => "minimax",
            BoundKind::StrictlyCausal => "strictly-causal",
            BoundKind::LosslessStrictlyCausal => "lossless-strictly-causal",
            BoundKind::Noncausal => "noncausal",
            BoundKind::NoncausalMaximal => "noncausal-maximal",
            BoundKind::StrictlyCausalMaximal => "strictly-causal-maximal",
            BoundKind::BinaryNoncausal => "binary-noncausal",
            BoundKind::BinaryStrictlyCausal => "binary-strictly-causal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Whether the auxiliary law is noncausal for this bound.
    pub fn is_noncausal(&self) -> bool {
        matches!(
            self,
            BoundKind::Noncausal | BoundKind::NoncausalMaximal | BoundKind::BinaryNoncausal
        )
    }
}

/// Outcome of a bound evaluation. `value` is the bound expression clipped
/// at zero; the unclipped expression is kept in `terms["raw"]`. When a side
/// constraint fails, `feasible` is false and the value is not an
/// achievable rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub kind: BoundKind,
    pub value: f64,
    /// Worst-case jammer laws, keyed by role (`"Q_J"`, `"Q_J|X"`, ...).
    pub inner_argmin: BTreeMap<String, Vec<Vec<f64>>>,
    /// Optimizing input-side laws (`"Q_X"`, `"Q_U|XS"`, ...).
    pub outer_argmax: BTreeMap<String, Vec<Vec<f64>>>,
    pub estimator: Option<Estimator>,
    /// Upper minus lower end of the computed max-min / min-max bracket.
    pub duality_gap: Option<f64>,
    pub feasible: bool,
    pub infeasibility_reason: Option<String>,
    /// Individual information terms in bits.
    pub terms: BTreeMap<String, f64>,
    /// True when the outer maximization is a local search.
    pub heuristic: bool,
}

impl BoundResult {
    pub(crate) fn new(kind: BoundKind) -> Self {
        Self {
            kind,
            value: 0.0,
            inner_argmin: BTreeMap::new(),
            outer_argmax: BTreeMap::new(),
            estimator: None,
            duality_gap: None,
            feasible: true,
            infeasibility_reason: None,
            terms: BTreeMap::new(),
            heuristic: false,
        }
    }

    pub(crate) fn term(&mut self, name: &str, v: f64) {
        self.terms.insert(name.to_string(), v);
    }

    /// Records a failed side constraint; the first reason wins.
    pub(crate) fn fail(&mut self, reason: impl Into<String>) {
        if self.feasible {
            self.feasible = false;
            self.infeasibility_reason = Some(reason.into());
        }
    }

    /// Stores the raw expression and sets the reported value.
    pub(crate) fn finish(&mut self, raw: f64) {
        self.term("raw", raw);
        self.value = raw.max(0.0);
    }
}

/// Knobs for grid seeding and local search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Simplex grid denominator (step `1 / grid_resolution`).
    pub grid_resolution: usize,
    /// Bisection rounds of the local search step after the grid.
    pub refinement_rounds: usize,
    /// Random starts in addition to the structured seeds.
    pub multistart_count: usize,
    pub rng_seed: u64,
    /// Tolerance for symmetrizability and edge decisions.
    pub tolerance: f64,
    /// Auxiliary alphabet size in searches; `None` means `|S| + 1`.
    pub u_card: Option<usize>,
    /// Run local search from the seeds; when off, seeds are only evaluated.
    pub local_search: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid_resolution: 32,
            refinement_rounds: 2,
            multistart_count: 8,
            rng_seed: 0,
            tolerance: crate::sym::DEFAULT_SYM_TOL,
            u_card: None,
            local_search: true,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_resolution == 0 {
            return Err(Error::Config("grid_resolution must be positive".into()));
        }
        if self.refinement_rounds == 0 {
            return Err(Error::Config("refinement_rounds must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        if self.u_card == Some(0) {
            return Err(Error::Config("u_card must be positive".into()));
        }
        Ok(())
    }
}
