//! C interface to `avc_jsc`.
//!
//! Channels and simulation results live behind opaque handles that the
//! caller releases with the matching `*_free` function. Every fallible call
//! returns an `AvcStatus`; on failure `avc_last_error` describes the
//! cause. Outputs are written only on success.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use avc_jsc::bounds::{
    bound_search, lossless_strictly_causal_bound, minimax_capacity, optimal_estimator, rate_plan,
    BoundKind, CodingMode, SearchConfig,
};
use avc_jsc::builtin;
use avc_jsc::channel::{average_out_state, channel_from_json, uniform, AuxLaw, StateChannel};
use avc_jsc::sim::{run_trials, JammerStrategy, SimConfig, TrialStats};
use avc_jsc::sym::{sym_margin, SymVariant};
use avc_jsc::Error;

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AvcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidChannel = 4,
    InvalidArgument = 5,
    /// A bound's hypotheses fail or a rate plan has no headroom.
    Infeasible = 6,
    /// An enumeration or codebook exceeded its budget.
    Budget = 7,
    Internal = 8,
}

/// Built-in channels.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AvcBuiltin {
    BinaryExample = 0,
    Adder = 1,
    StateRevealing = 2,
    JammedErasure = 3,
}

/// Coding schemes of the simulator.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AvcScheme {
    /// Strictly causal, U = S.
    DescribeState = 0,
    /// Strictly causal, constant U.
    NoDescription = 1,
    /// Noncausal, U = X uniform and independent of the state.
    StateBlind = 2,
}

/// Opaque channel handle.
pub struct AvcChannel(StateChannel);

/// Opaque handle to the rows of a simulation.
pub struct AvcSimResult(Vec<TrialStats>);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AvcShape {
    pub nx: usize,
    pub ns: usize,
    pub nj: usize,
    pub ny: usize,
    pub ns_hat: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AvcSymResult {
    /// Infinite when the variant has no pair to exchange.
    pub margin: f64,
    pub symmetrizable: bool,
    pub pairs: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AvcBound {
    pub value: f64,
    pub feasible: bool,
    /// True when the outer maximum comes from a local search.
    pub heuristic: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AvcRatePlan {
    /// True for the noncausal plan.
    pub noncausal: bool,
    pub r: f64,
    pub r_s: f64,
    pub r_s_tilde: f64,
    pub r_s_prime: f64,
    pub tau: f64,
    pub covering_rate: f64,
    pub max_r: f64,
}

/// Simulation settings. `jammers` is a comma-separated list of jammer
/// names, or null for every constant jammer plus the uniform i.i.d. one.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AvcSimOptions {
    pub scheme: AvcScheme,
    pub tau: f64,
    pub blocklengths: *const usize,
    pub blocklengths_len: usize,
    pub trials: usize,
    pub seed: u64,
    pub jammers: *const c_char,
    pub jam_budget: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AvcTrialStats {
    pub n: usize,
    pub trials: usize,
    pub messages: usize,
    pub eta: f64,
    pub avg_error: f64,
    pub max_error: f64,
    pub distortion: f64,
    pub covering_failures: usize,
    pub ambiguities: usize,
    pub bad_codeword_errors: usize,
    pub explosions: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(AvcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse(_) => AvcStatus::Parse,
            Error::NonStochasticRow { .. }
            | Error::NegativeEntry { .. }
            | Error::DimensionMismatch(_)
            | Error::ShapeMismatch(_) => AvcStatus::InvalidChannel,
            Error::NoFeasiblePoint(_) | Error::InsufficientHeadroom(_) => AvcStatus::Infeasible,
            Error::ExplosionGuard { .. } | Error::SizeOverflow { .. } => AvcStatus::Budget,
            Error::Lp(_) => AvcStatus::Internal,
            _ => AvcStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(AvcStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any failure or panic for `avc_last_error`.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> AvcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            AvcStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            AvcStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(AvcStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn channel<'a>(ch: *const AvcChannel) -> Result<&'a StateChannel, Fail> {
    ch.as_ref().map(|c| &c.0).ok_or_else(|| null("channel"))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn avc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn avc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a channel from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn avc_channel_from_json(
    json: *const c_char,
    out: *mut *mut AvcChannel,
) -> AvcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let ch = channel_from_json(text(json, "json")?)?;
        out.write(Box::into_raw(Box::new(AvcChannel(ch))));
        Ok(())
    })
}

/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn avc_channel_builtin(
    which: AvcBuiltin,
    out: *mut *mut AvcChannel,
) -> AvcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let ch = match which {
            AvcBuiltin::BinaryExample => builtin::binary_example(),
            AvcBuiltin::Adder => builtin::adder_example(),
            AvcBuiltin::StateRevealing => builtin::state_revealing(),
            AvcBuiltin::JammedErasure => builtin::jammed_erasure(),
        };
        out.write(Box::into_raw(Box::new(AvcChannel(ch))));
        Ok(())
    })
}

/// Releases a channel. Null is ignored.
///
/// # Safety
/// `ch` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn avc_channel_free(ch: *mut AvcChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

/// # Safety
/// `ch` must be a live channel handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn avc_channel_shape(ch: *const AvcChannel, out: *mut AvcShape) -> AvcStatus {
    guard(|| {
        let c = channel(ch)?;
        let shape = AvcShape {
            nx: c.nx(),
            ns: c.ns(),
            nj: c.nj(),
            ny: c.ny(),
            ns_hat: c.ns_hat(),
        };
        put(out, shape, "out")
    })
}

/// Symmetrizability margin of one variant (`XS`, `X`, `S`, `X|S`, `S|X`).
///
/// # Safety
/// `ch` must be a live channel handle, `variant` a NUL-terminated string and
/// `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn avc_sym_margin(
    ch: *const AvcChannel,
    variant: *const c_char,
    tol: f64,
    out: *mut AvcSymResult,
) -> AvcStatus {
    guard(|| {
        let c = channel(ch)?;
        let name = text(variant, "variant")?;
        let v = SymVariant::parse(name).ok_or_else(|| {
            Fail(
                AvcStatus::InvalidArgument,
                format!("unknown variant {name:?}"),
            )
        })?;
        let r = sym_margin(c, v, tol)?;
        let res = AvcSymResult {
            margin: r.margin,
            symmetrizable: r.symmetrizable,
            pairs: r.pairs,
        };
        put(out, res, "out")
    })
}

/// Evaluates a bound by name (`minimax`, `strictly-causal`, `noncausal`, ...).
/// Bounds without a distortion constraint ignore `d`. An infeasible
/// minimax or lossless bound still reports its value with `feasible` unset;
/// the other kinds return `Infeasible` when no point satisfies them.
///
/// # Safety
/// `ch` must be a live channel handle, `kind` a NUL-terminated string and
/// `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn avc_bound(
    ch: *const AvcChannel,
    kind: *const c_char,
    d: f64,
    seed: u64,
    out: *mut AvcBound,
) -> AvcStatus {
    guard(|| {
        let c = channel(ch)?;
        let name = text(kind, "kind")?;
        let k = BoundKind::parse(name).ok_or_else(|| {
            Fail(
                AvcStatus::InvalidArgument,
                format!("unknown bound {name:?}"),
            )
        })?;
        let cfg = SearchConfig {
            rng_seed: seed,
            ..SearchConfig::default()
        };
        let r = match k {
            BoundKind::Minimax => minimax_capacity(&average_out_state(c), &cfg)?,
            BoundKind::LosslessStrictlyCausal => lossless_strictly_causal_bound(c, &cfg)?,
            _ => {
                if !(d >= 0.0) {
                    return Err(Fail(
                        AvcStatus::InvalidArgument,
                        format!("distortion budget must be nonnegative, got {d}"),
                    ));
                }
                bound_search(k, c, d, &cfg)?
            }
        };
        let res = AvcBound {
            value: r.value,
            feasible: r.feasible,
            heuristic: r.heuristic,
        };
        put(out, res, "out")
    })
}

fn scheme_aux(c: &StateChannel, scheme: AvcScheme) -> Result<AuxLaw, Fail> {
    let aux = match scheme {
        AvcScheme::DescribeState => builtin::describe_state(c, uniform(c.nx())),
        AvcScheme::NoDescription => builtin::no_description(c, uniform(c.nx())),
        AvcScheme::StateBlind => builtin::state_blind_noncausal(c),
    };
    aux.check(c)?;
    Ok(aux)
}

/// Rate plan of a scheme with uniform input and slack `tau`.
///
/// # Safety
/// `ch` must be a live channel handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn avc_rate_plan(
    ch: *const AvcChannel,
    scheme: AvcScheme,
    tau: f64,
    out: *mut AvcRatePlan,
) -> AvcStatus {
    guard(|| {
        let c = channel(ch)?;
        let p = rate_plan(c, &scheme_aux(c, scheme)?, tau)?;
        let res = AvcRatePlan {
            noncausal: p.mode == CodingMode::Noncausal,
            r: p.r,
            r_s: p.r_s,
            r_s_tilde: p.r_s_tilde,
            r_s_prime: p.r_s_prime,
            tau: p.tau,
            covering_rate: p.covering_rate,
            max_r: p.max_r,
        };
        put(out, res, "out")
    })
}

/// Runs the Monte Carlo simulation. Rows are ordered by blocklength, then
/// by jammer.
///
/// # Safety
/// `ch` must be a live channel handle, `opts` a readable pointer whose
/// `blocklengths` holds `blocklengths_len` values, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn avc_simulate(
    ch: *const AvcChannel,
    opts: *const AvcSimOptions,
    out: *mut *mut AvcSimResult,
) -> AvcStatus {
    guard(|| {
        let c = channel(ch)?;
        let o = opts.as_ref().ok_or_else(|| null("opts"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if o.blocklengths.is_null() || o.blocklengths_len == 0 {
            return Err(Fail(AvcStatus::InvalidArgument, "no blocklengths".into()));
        }
        let n_list = std::slice::from_raw_parts(o.blocklengths, o.blocklengths_len).to_vec();
        if n_list.contains(&0) {
            return Err(Fail(
                AvcStatus::InvalidArgument,
                "blocklengths must be positive".into(),
            ));
        }
        let aux = scheme_aux(c, o.scheme)?;
        let plan = rate_plan(c, &aux, o.tau)?;
        let estimator = optimal_estimator(c, &aux)?;
        let mut cfg = SimConfig::new(aux, plan, estimator);
        cfg.jammers = if o.jammers.is_null() {
            let mut v: Vec<JammerStrategy> = (0..c.nj()).map(JammerStrategy::Constant).collect();
            v.push(JammerStrategy::Iid(uniform(c.nj())));
            v
        } else {
            text(o.jammers, "jammers")?
                .split(',')
                .map(|j| JammerStrategy::from_name(j.trim(), c, o.jam_budget))
                .collect::<Result<_, _>>()?
        };
        cfg.n_list = n_list;
        cfg.trials = o.trials;
        cfg.seed = o.seed;
        let stats = run_trials(c, &cfg)?;
        out.write(Box::into_raw(Box::new(AvcSimResult(stats))));
        Ok(())
    })
}

/// Number of rows; zero for a null handle.
///
/// # Safety
/// `res` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn avc_sim_result_len(res: *const AvcSimResult) -> usize {
    res.as_ref().map_or(0, |r| r.0.len())
}

/// # Safety
/// `res` must be a live result handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn avc_sim_result_get(
    res: *const AvcSimResult,
    index: usize,
    out: *mut AvcTrialStats,
) -> AvcStatus {
    guard(|| {
        let r = res.as_ref().ok_or_else(|| null("result"))?;
        let s = r.0.get(index).ok_or_else(|| {
            Fail(
                AvcStatus::InvalidArgument,
                format!("row {index} of {}", r.0.len()),
            )
        })?;
        let row = AvcTrialStats {
            n: s.n,
            trials: s.trials,
            messages: s.messages,
            eta: s.eta,
            avg_error: s.avg_error,
            max_error: s.max_error,
            distortion: s.distortion,
            covering_failures: s.covering_failures,
            ambiguities: s.ambiguities,
            bad_codeword_errors: s.bad_codeword_errors,
            explosions: s.explosions,
        };
        put(out, row, "out")
    })
}

/// Name of the jammer behind a row, copied into `buf` with a terminating
/// NUL and truncated to `len` bytes. Returns the full name length, or zero
/// for an invalid row.
///
/// # Safety
/// `res` must be a live result handle and `buf` writable for `len` bytes
/// (or null with `len` zero).
#[no_mangle]
pub unsafe extern "C" fn avc_sim_result_jammer(
    res: *const AvcSimResult,
    index: usize,
    buf: *mut c_char,
    len: usize,
) -> usize {
    let Some(s) = res.as_ref().and_then(|r| r.0.get(index)) else {
        return 0;
    };
    let name = s.jammer.as_bytes();
    if !buf.is_null() && len > 0 {
        let k = name.len().min(len - 1);
        ptr::copy_nonoverlapping(name.as_ptr().cast(), buf, k);
        buf.add(k).write(0);
    }
    name.len()
}

/// Releases a simulation result. Null is ignored.
///
/// # Safety
/// `res` must come from `avc_simulate` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn avc_sim_result_free(res: *mut AvcSimResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}
