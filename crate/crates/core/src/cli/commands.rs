use std::fmt::Write as _;

use avc_jsc::bounds::{
    bound_search, lossless_strictly_causal_bound, minimax_capacity, optimal_estimator,
    pure_lossless_feasibility, rate_plan, worst_jammer_mi, BoundKind, JammerFamily, SearchConfig,
};
use avc_jsc::builtin;
use avc_jsc::channel::{
    average_out_state, binary_entropy, induce_u_channel, read_channel, uniform, AuxLaw,
    StateChannel,
};
use avc_jsc::sim::{run_trials, stats_to_csv, JammerStrategy, SimConfig, TypicalityParams};
use avc_jsc::sym::{
    sym_margin, sym_margin_with, SymReport, SymVariant, UndefinedRowPolicy, DEFAULT_SYM_TOL,
};
use avc_jsc::{Error, Result};
use serde_json::{json, Value};

use super::args::{
    BoundArgs, Builtin, CheckSymArgs, Example, Format, Io, ReproduceArgs, Scheme, SimulateArgs,
};
use super::report::{fmt, num, write_output, Report};
use super::{INFEASIBLE, OK, SCHEMA_VERSION};

fn load(io: &Io) -> Result<StateChannel> {
    match (&io.channel, io.builtin) {
        (Some(path), _) => read_channel(path),
        (None, Some(b)) => Ok(match b {
            Builtin::BinaryExample => builtin::binary_example(),
            Builtin::Adder => builtin::adder_example(),
            Builtin::StateRevealing => builtin::state_revealing(),
            Builtin::JammedErasure => builtin::jammed_erasure(),
        }),
        (None, None) => Err(Error::Config(
            "pass --channel PATH or --builtin NAME".into(),
        )),
    }
}

fn shape(ch: &StateChannel) -> Value {
    json!({ "nx": ch.nx(), "ns": ch.ns(), "nj": ch.nj(), "ny": ch.ny() })
}

fn verdict(symmetrizable: bool) -> &'static str {
    if symmetrizable {
        "symmetrizable"
    } else {
        "nonsymmetrizable"
    }
}

fn sym_json(r: &SymReport) -> Value {
    json!({
        "variant": r.variant.name(),
        "margin": num(r.margin),
        "symmetrizable": r.symmetrizable,
        "pairs": r.pairs,
        "certificate": r.certificate.to_rows(),
    })
}

fn sym_text(out: &mut String, label: &str, r: &SymReport) {
    let _ = writeln!(
        out,
        "{label:<8} {:>14}  {}",
        fmt(r.margin),
        verdict(r.symmetrizable)
    );
    if r.symmetrizable {
        for (k, row) in r.certificate.to_rows().iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.4}")).collect();
            let _ = writeln!(out, "         T(.|{k}) = [{}]", cells.join(", "));
        }
    }
}

pub fn check_sym(a: &CheckSymArgs) -> Result<u8> {
    let ch = load(&a.io)?;
    let variants: Vec<SymVariant> = if a.variant.is_empty() {
        let mut v = SymVariant::STATE_VARIANTS.to_vec();
        v.push(SymVariant::P2pX);
        v
    } else {
        a.variant
            .iter()
            .map(|s| {
                SymVariant::parse(s.trim())
                    .ok_or_else(|| Error::Config(format!("unknown variant {s:?}")))
            })
            .collect::<Result<_>>()?
    };
    let avg = average_out_state(&ch);
    let mut reports = Vec::new();
    for v in variants {
        reports.push(match v {
            SymVariant::P2pX => sym_margin(&avg, v, a.tol)?,
            SymVariant::UGivenX => {
                return Err(Error::Config(
                    "U|X needs an auxiliary law; see `reproduce example1`".into(),
                ))
            }
            _ => sym_margin(&ch, v, a.tol)?,
        });
    }
    let mut text = format!(
        "{:<8} {:>14}  verdict (tol {:e})\n",
        "variant", "margin", a.tol
    );
    let mut csv = String::from("variant,margin,symmetrizable,pairs\n");
    for r in &reports {
        sym_text(&mut text, r.variant.name(), r);
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            r.variant.name(),
            r.margin,
            r.symmetrizable,
            r.pairs
        );
    }
    let report = Report {
        json: json!({
            "schema": SCHEMA_VERSION,
            "command": "check-sym",
            "channel": shape(&ch),
            "tol": a.tol,
            "results": reports.iter().map(sym_json).collect::<Vec<_>>(),
        }),
        csv,
        text,
    };
    report.emit(a.io.format, a.io.out.as_deref())?;
    Ok(OK)
}

fn needs_distortion(kind: BoundKind) -> bool {
    !matches!(kind, BoundKind::Minimax | BoundKind::LosslessStrictlyCausal)
}

pub fn bound(a: &BoundArgs) -> Result<u8> {
    let ch = load(&a.io)?;
    let cfg = SearchConfig {
        grid_resolution: a.grid,
        multistart_count: a.starts,
        rng_seed: a.seed,
        tolerance: a.tol,
        u_card: a.u_card,
        ..SearchConfig::default()
    };
    if a.kind == "lossless-feasibility" {
        return lossless_feasibility(a, &ch, &cfg);
    }
    let kind = BoundKind::parse(&a.kind).ok_or_else(|| {
        let names: Vec<&str> = BoundKind::ALL.iter().map(|k| k.name()).collect();
        Error::Config(format!(
            "unknown bound {:?}; expected one of {}, lossless-feasibility",
            a.kind,
            names.join(", ")
        ))
    })?;
    let d = match (a.d, needs_distortion(kind)) {
        (Some(d), _) if !(d >= 0.0) => {
            return Err(Error::Config(format!("--D must be nonnegative, got {d}")))
        }
        (Some(d), _) => d,
        (None, true) => {
            return Err(Error::Config(format!(
                "--D is required for {}",
                kind.name()
            )))
        }
        (None, false) => f64::INFINITY,
    };
    // these two keep their value when a hypothesis fails
    let direct = match kind {
        BoundKind::Minimax => Some(minimax_capacity(&average_out_state(&ch), &cfg)),
        BoundKind::LosslessStrictlyCausal => Some(lossless_strictly_causal_bound(&ch, &cfg)),
        _ => None,
    };
    let (result, reason) = match direct.unwrap_or_else(|| bound_search(kind, &ch, d, &cfg)) {
        Ok(r) => {
            let reason = r.infeasibility_reason.clone();
            (Some(r), reason)
        }
        Err(Error::NoFeasiblePoint(msg)) => (None, Some(msg)),
        Err(e) => return Err(e),
    };
    let feasible = result.as_ref().is_some_and(|r| r.feasible);
    let mut text = format!("bound    {}\n", kind.name());
    let mut csv = String::from("name,value\n");
    let mut body = json!({
        "schema": SCHEMA_VERSION,
        "command": "bound",
        "kind": kind.name(),
        "channel": shape(&ch),
        "D": num(d),
        "feasible": feasible,
        "reason": reason,
    });
    if let Some(r) = &result {
        let _ = writeln!(text, "value    {}", fmt(r.value));
        let _ = writeln!(csv, "value,{}", r.value);
        for (k, v) in &r.terms {
            let _ = writeln!(text, "  {k:<28} {}", fmt(*v));
            let _ = writeln!(csv, "{k},{v}");
        }
        for (k, rows) in r.outer_argmax.iter().chain(&r.inner_argmin) {
            let _ = writeln!(text, "  {k:<28} {}", rows_text(rows));
        }
        if r.heuristic {
            text.push_str("  (outer maximum from local search)\n");
        }
        body["result"] = serde_json::to_value(r).expect("bound result serializes");
    }
    if let Some(reason) = &reason {
        let _ = writeln!(text, "infeasible: {reason}");
    }
    Report {
        json: body,
        csv,
        text,
    }
    .emit(a.io.format, a.io.out.as_deref())?;
    Ok(if feasible { OK } else { INFEASIBLE })
}

fn rows_text(rows: &[Vec<f64>]) -> String {
    let r: Vec<String> = rows
        .iter()
        .map(|row| {
            let c: Vec<String> = row.iter().map(|v| format!("{v:.4}")).collect();
            format!("[{}]", c.join(", "))
        })
        .collect();
    r.join(" ")
}

fn lossless_feasibility(a: &BoundArgs, ch: &StateChannel, cfg: &SearchConfig) -> Result<u8> {
    let f = pure_lossless_feasibility(ch, cfg)?;
    let mut text = String::from("bound    lossless-feasibility\n");
    let _ = writeln!(text, "H(S)                         {}", fmt(f.lhs));
    let _ = writeln!(
        text,
        "min max I(X,S;Y)             {} (certified >= {})",
        fmt(f.rhs),
        fmt(f.rhs_lower)
    );
    let _ = writeln!(text, "nonsymmetrizable X x S       {}", f.sym_ok);
    let _ = writeln!(
        text,
        "{}",
        if f.feasible { "feasible" } else { "infeasible" }
    );
    let csv = format!(
        "name,value\nlhs,{}\nrhs,{}\nrhs_lower,{}\nsym_ok,{}\nfeasible,{}\n",
        f.lhs, f.rhs, f.rhs_lower, f.sym_ok, f.feasible
    );
    let json = json!({
        "schema": SCHEMA_VERSION,
        "command": "bound",
        "kind": "lossless-feasibility",
        "channel": shape(ch),
        "feasible": f.feasible,
        "result": serde_json::to_value(&f).expect("feasibility serializes"),
    });
    Report { json, csv, text }.emit(a.io.format, a.io.out.as_deref())?;
    Ok(if f.feasible { OK } else { INFEASIBLE })
}

pub fn simulate(a: &SimulateArgs) -> Result<u8> {
    let ch = load(&a.io)?;
    let q_x = if a.q_x.is_empty() {
        uniform(ch.nx())
    } else {
        a.q_x.clone()
    };
    let aux = match a.scheme {
        Scheme::DescribeState => builtin::describe_state(&ch, q_x),
        Scheme::NoDescription => builtin::no_description(&ch, q_x),
        Scheme::StateBlind => builtin::state_blind_noncausal(&ch),
    };
    aux.check(&ch)?;
    if a.n.is_empty() || a.n.contains(&0) {
        return Err(Error::Config("blocklengths must be positive".into()));
    }
    if !(a.tau > 0.0) {
        return Err(Error::Config(format!(
            "--tau must be positive, got {}",
            a.tau
        )));
    }
    let mut plan = rate_plan(&ch, &aux, a.tau)?;
    if let Some(r) = a.rate {
        plan = plan.with_message_rate(r)?;
    }
    let estimator = optimal_estimator(&ch, &aux)?;
    let mut cfg = SimConfig::new(aux, plan.clone(), estimator.clone());
    cfg.params = a
        .eta
        .map(|eta| TypicalityParams::new(eta, eta / 2.0, a.tau))
        .transpose()?;
    cfg.jammers = if a.jammers.is_empty() {
        let mut v: Vec<JammerStrategy> = (0..ch.nj()).map(JammerStrategy::Constant).collect();
        v.push(JammerStrategy::Iid(uniform(ch.nj())));
        v
    } else {
        a.jammers
            .iter()
            .map(|j| JammerStrategy::from_name(j, &ch, a.jam_budget))
            .collect::<Result<_>>()?
    };
    cfg.n_list = a.n.clone();
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    cfg.search_budget = a.search_budget;
    cfg.max_words = a.max_words;
    let stats = run_trials(&ch, &cfg)?;

    let mut text = format!(
        "plan     R = {:.4}  R_S = {:.4}  R~ = {:.4}  tau = {}\n",
        plan.r, plan.r_s, plan.r_s_tilde, plan.tau
    );
    let _ = writeln!(
        text,
        "{:<20} {:>3} {:>7} {:>8} {:>9} {:>9} {:>10} {:>6} {:>6} {:>6}",
        "jammer", "n", "words", "eta", "avg_err", "max_err", "distortion", "cover", "ambig", "bad"
    );
    for s in &stats {
        let _ = writeln!(
            text,
            "{:<20} {:>3} {:>7} {:>8.4} {:>9.4} {:>9.4} {:>10.4} {:>6} {:>6} {:>6}",
            s.jammer,
            s.n,
            s.messages,
            s.eta,
            s.avg_error,
            s.max_error,
            s.distortion,
            s.covering_failures,
            s.ambiguities,
            s.bad_codeword_errors
        );
    }
    let report = Report {
        json: json!({
            "schema": SCHEMA_VERSION,
            "command": "simulate",
            "channel": shape(&ch),
            "scheme": format!("{:?}", a.scheme),
            "plan": plan,
            "estimator": estimator,
            "seed": a.seed,
            "stats": stats,
        }),
        csv: stats_to_csv(&stats),
        text,
    };
    if a.io.format == Format::Csv {
        eprint!("{}", report.text);
    }
    report.emit(a.io.format, a.io.out.as_deref())?;
    Ok(OK)
}

pub fn reproduce(a: &ReproduceArgs) -> Result<u8> {
    let (report, code) = match a.which {
        Example::Example1 => example1()?,
        Example::BinaryExample => binary_example()?,
    };
    write_output(&report.render(a.format), a.out.as_deref())?;
    Ok(code)
}

fn example1() -> Result<(Report, u8)> {
    let ch = builtin::adder_example();
    let tol = DEFAULT_SYM_TOL;
    let mut rows = Vec::new();
    for v in [SymVariant::XS, SymVariant::X, SymVariant::S] {
        rows.push((v.name().to_string(), sym_margin(&ch, v, tol)?));
    }
    let aux = AuxLaw::StrictlyCausal {
        q_x: uniform(3),
        q_u_xs: builtin::adder_sum_aux(),
    };
    let induced = induce_u_channel(&ch, &aux)?;
    let zero = sym_margin_with(
        &induced.avc,
        SymVariant::UGivenX,
        tol,
        UndefinedRowPolicy::Zero,
    )?;
    let skip = sym_margin_with(
        &induced.avc,
        SymVariant::UGivenX,
        tol,
        UndefinedRowPolicy::Skip,
    )?;
    rows.push(("U|X".into(), zero));

    let mut text = String::from("adder channel Y = X + S + J, U = X + S\n");
    let _ = writeln!(text, "{:<8} {:>14}  verdict", "variant", "margin");
    let mut csv = String::from("variant,margin,symmetrizable\n");
    for (label, r) in &rows {
        sym_text(&mut text, label, r);
        let _ = writeln!(csv, "{label},{},{}", r.margin, r.symmetrizable);
    }
    let _ = writeln!(
        text,
        "U|X counting reachable (u, x) pairs only: margin {}, {}",
        fmt(skip.margin),
        verdict(skip.symmetrizable)
    );
    let _ = writeln!(
        csv,
        "U|X reachable-only,{},{}",
        skip.margin, skip.symmetrizable
    );
    let json = json!({
        "schema": SCHEMA_VERSION,
        "command": "reproduce",
        "example": "example1",
        "tol": tol,
        "results": rows.iter().map(|(label, r)| {
            let mut v = sym_json(r);
            v["label"] = json!(label);
            v
        }).collect::<Vec<_>>(),
        "u_given_x_reachable_only": sym_json(&skip),
    });
    Ok((Report { json, csv, text }, OK))
}

fn binary_example() -> Result<(Report, u8)> {
    let ch = builtin::binary_example();
    let avg = average_out_state(&ch);
    let q = [0.5, 0.5];
    let average = worst_jammer_mi(&avg, &q, JammerFamily::Iid)?;
    let maximal = worst_jammer_mi(&avg, &q, JammerFamily::PerInput)?;
    let lossless = lossless_strictly_causal_bound(&ch, &SearchConfig::default())?;
    let h1 = binary_entropy(0.1);
    let h2 = binary_entropy(0.2);
    let gap = average.value - maximal.value;
    let values = [
        ("1 - h_b(0.1)", 1.0 - h1),
        ("1 - h_b(0.2)", 1.0 - h2),
        ("h_b(0.1)", h1),
        ("average-error message term", average.value),
        ("maximal-error message term", maximal.value),
        ("gap", gap),
        ("lossless average-error bound", lossless.value),
        (
            "H(S)",
            lossless.terms.get("H(S)").copied().unwrap_or(f64::NAN),
        ),
    ];
    let mut text = String::from("binary example, uniform input\n");
    let mut csv = String::from("name,value\n");
    for (k, v) in values {
        let _ = writeln!(text, "  {k:<30} {}", fmt(v));
        let _ = writeln!(csv, "{k},{v}");
    }
    let strict = gap > 0.0;
    let _ = writeln!(
        text,
        "maximal-error term strictly below average-error term: {}",
        if strict { "yes" } else { "NO" }
    );
    let json = json!({
        "schema": SCHEMA_VERSION,
        "command": "reproduce",
        "example": "binary_example",
        "values": values.iter().map(|(k, v)| (k.to_string(), num(*v))).collect::<serde_json::Map<_, _>>(),
        "strict_gap": strict,
        "worst_iid_jammer": serde_json::to_value(&average.argmin).expect("law serializes"),
        "worst_per_input_jammer": serde_json::to_value(&maximal.argmin).expect("law serializes"),
    });
    Ok((
        Report { json, csv, text },
        if strict { OK } else { INFEASIBLE },
    ))
}
