mod common;

use avc_jsc::bounds::*;
use avc_jsc::builtin::{
    adder_example, adder_sum_aux, binary_example, describe_state, hamming, state_blind_noncausal,
    state_revealing,
};
use avc_jsc::channel::{
    average_out_state, uniform, AVChannel, AuxLaw, Estimator, JammerLaw, Kernel, StateChannel,
};
use avc_jsc::error::Error;
use avc_jsc::sym::ChannelGraph;
use common::*;

fn cfg() -> SearchConfig {
    SearchConfig::default()
}

fn law(r: &BoundResult, key: &str) -> Vec<f64> {
    r.inner_argmin[key][0].clone()
}

/// `W(y|x,s,j) = 1{y = j}`: the output ignores the input entirely.
fn jammer_echo() -> StateChannel {
    let row = |j: usize| {
        if j == 0 {
            vec![1.0, 0.0]
        } else {
            vec![0.0, 1.0]
        }
    };
    let w = vec![vec![vec![row(0), row(1)]; 2]; 2];
    StateChannel::from_nested(&w, vec![0.5, 0.5], hamming(2)).unwrap()
}

/// `Y = (X, S)` without noise and a single jammer symbol.
fn state_and_input_revealed() -> StateChannel {
    let mut w = vec![vec![vec![vec![0.0; 4]; 1]; 2]; 2];
    for (x, wx) in w.iter_mut().enumerate() {
        for (s, ws) in wx.iter_mut().enumerate() {
            ws[0][2 * x + s] = 1.0;
        }
    }
    StateChannel::from_nested(&w, vec![0.7, 0.3], hamming(2)).unwrap()
}

/// Output law independent of input and state.
fn output_ignores_everything() -> StateChannel {
    let w = vec![vec![vec![vec![0.4, 0.6], vec![0.8, 0.2]]; 2]; 2];
    StateChannel::from_nested(&w, vec![0.7, 0.3], hamming(2)).unwrap()
}

// ---- worst_jammer_mi ----

#[test]
fn iid_jammer_on_binary_example_gives_bsc_point_one() {
    let avg = average_out_state(&binary_example());
    let m = worst_jammer_mi(&avg, &[0.5, 0.5], JammerFamily::Iid).unwrap();
    assert!((m.value - (1.0 - h2(0.1))).abs() < 1e-3, "{}", m.value);
    let JammerLaw::Iid(q) = &m.argmin else {
        panic!("iid family returns an iid law")
    };
    assert!((q[0] - 0.5).abs() < 1e-2, "{q:?}");
    assert!(m.lower <= m.value + 1e-12);
    assert!(m.value - m.lower < 1e-6);
}

#[test]
fn per_input_jammer_on_binary_example_reaches_bsc_point_two() {
    let avg = average_out_state(&binary_example());
    let m = worst_jammer_mi(&avg, &[0.5, 0.5], JammerFamily::PerInput).unwrap();
    assert!(m.value <= 1.0 - h2(0.2) + 1e-3, "{}", m.value);
    // Witness: jammer sends 1 on x=0 and 0 on x=1.
    let rows: Vec<Vec<f64>> = (0..2)
        .map(|x| (0..2).map(|y| avg.q(x, 1 - x, y)).collect())
        .collect();
    assert!((mi(&[0.5, 0.5], &rows) - (1.0 - h2(0.2))).abs() < 1e-12);
}

#[test]
fn single_jammer_symbol_is_plain_mutual_information() {
    let avc = AVChannel::from_nested(&[vec![vec![0.7, 0.3]], vec![vec![0.2, 0.8]]]).unwrap();
    for family in [JammerFamily::Iid, JammerFamily::PerInput] {
        let m = worst_jammer_mi(&avc, &[0.4, 0.6], family).unwrap();
        let want = mi(&[0.4, 0.6], &[vec![0.7, 0.3], vec![0.2, 0.8]]);
        assert!((m.value - want).abs() < 1e-12);
    }
}

#[test]
fn iid_jammer_matches_grid_oracle_on_random_channels() {
    for seed in 0..10 {
        let avg = average_out_state(&random_binary_channel(seed));
        let q_in = [0.3, 0.7];
        let m = worst_jammer_mi(&avg, &q_in, JammerFamily::Iid).unwrap();
        let oracle = grid_min_binary(20_000, |q| mi(&q_in, &mix(&avg, q)));
        assert!(
            m.value <= oracle + 1e-7,
            "seed {seed}: {} vs {oracle}",
            m.value
        );
        assert!(
            m.value >= oracle - 1e-6,
            "seed {seed}: {} vs {oracle}",
            m.value
        );
    }
}

// ---- minimax_capacity ----

#[test]
fn minimax_on_binary_example() {
    let r = minimax_capacity(&average_out_state(&binary_example()), &cfg()).unwrap();
    assert!((r.value - (1.0 - h2(0.1))).abs() < 1e-3, "{}", r.value);
    assert!(r.feasible);
    let gap = r.duality_gap.unwrap();
    assert!((-1e-9..1e-3).contains(&gap), "{gap}");
}

#[test]
fn minimax_of_echo_channel_is_zero() {
    let avc = AVChannel::from_nested(&[
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
    ])
    .unwrap();
    let r = minimax_capacity(&avc, &cfg()).unwrap();
    assert_eq!(r.value, 0.0);
    assert!(!r.feasible);
    assert_eq!(r.infeasibility_reason.as_deref(), Some("symmetrizable-X"));
}

#[test]
fn minimax_with_single_jammer_is_bsc_capacity() {
    for p in [0.05, 0.1, 0.2] {
        let r = minimax_capacity(&bsc(p), &cfg()).unwrap();
        assert!((r.value - (1.0 - h2(p))).abs() < 1e-4, "p={p}: {}", r.value);
    }
}

// ---- strictly causal, average error ----

#[test]
fn constant_description_reduces_to_message_rate() {
    let ch = binary_example();
    let q_x = vec![0.3, 0.7];
    let q_u = Kernel::constant(4, &[1.0]);
    let aux = AuxLaw::StrictlyCausal {
        q_x: q_x.clone(),
        q_u_xs: q_u.clone(),
    };
    let h = optimal_estimator(&ch, &aux).unwrap();
    let r = strictly_causal_bound_at(&ch, &q_x, &q_u, &h, 1.0, &cfg()).unwrap();
    let avg = average_out_state(&ch);
    let oracle = grid_min_binary(20_000, |q| mi(&q_x, &mix(&avg, q)));
    assert!(r.terms["I(U;S|X)"].abs() < 1e-12);
    assert!(r.terms["min I(U;Y|X)"].abs() < 1e-12);
    assert!((r.terms["raw"] - oracle).abs() < 1e-6);
}

#[test]
fn lossless_description_equals_conditional_entropy_form() {
    for seed in 0..5 {
        let ch = random_binary_channel(seed);
        let q_x = vec![0.45, 0.55];
        let aux = describe_state(&ch, q_x.clone());
        let AuxLaw::StrictlyCausal { q_u_xs, .. } = &aux else {
            unreachable!()
        };
        let h = Estimator::xuy(2, 2, 2, |_, u, _| u);
        let r = strictly_causal_bound_at(&ch, &q_x, q_u_xs, &h, 0.0, &cfg()).unwrap();
        assert!(r.terms["distortion"].abs() < 1e-12);

        // Independent oracles for each term.
        let sizes = [2, 2, 2];
        let i_xy = |q: &[f64]| cond_mi(&xsy_table(&ch, &q_x, q), &sizes, &[0], &[2], &[]);
        let i_sy_x = |q: &[f64]| cond_mi(&xsy_table(&ch, &q_x, q), &sizes, &[1], &[2], &[0]);
        let h_s_given_x = entropy(ch.q_s());
        let a = grid_min_binary(20_000, i_xy);
        let b = grid_min_binary(20_000, i_sy_x);
        assert!(
            (r.terms["raw"] - (a + b - h_s_given_x)).abs() < 1e-6,
            "seed {seed}"
        );

        // At the description jammer, I(S;Y|X) - H(S|X) = -H(S|X,Y).
        let q_star = law(&r, "Q_J (description)");
        let p = xsy_table(&ch, &q_x, &q_star);
        let h_s_xy =
            marginal_entropy(&p, &sizes, &[0, 1, 2]) - marginal_entropy(&p, &sizes, &[0, 2]);
        assert!((i_sy_x(&q_star) - h_s_given_x + h_s_xy).abs() < 1e-12);
        assert!((r.terms["raw"] - (r.terms["min I(X;Y)"] - h_s_xy)).abs() < 1e-6);
    }
}

#[test]
fn adder_with_sum_description_is_feasible() {
    let ch = adder_example();
    let q_x = uniform(3);
    let q_u = adder_sum_aux();
    let aux = AuxLaw::StrictlyCausal {
        q_x: q_x.clone(),
        q_u_xs: q_u.clone(),
    };
    let h = optimal_estimator(&ch, &aux).unwrap();
    let r = strictly_causal_bound_at(&ch, &q_x, &q_u, &h, 1.0, &cfg()).unwrap();
    assert_eq!(r.terms["indicator U|X"], 1.0);
    assert!(r.feasible, "{:?}", r.infeasibility_reason);
    assert!(r.value >= 0.0);
}

// ---- bound_search ----

/// Two-state channel with a single jammer symbol.
fn gelfand_pinsker_instance() -> StateChannel {
    let w = vec![
        vec![vec![vec![0.95, 0.05]], vec![vec![0.3, 0.7]]],
        vec![vec![vec![0.05, 0.95]], vec![vec![0.9, 0.1]]],
    ];
    StateChannel::from_nested(&w, vec![0.6, 0.4], hamming(2)).unwrap()
}

/// `max I(U;Y) - I(U;S)` over `Q_{U|S}` on a grid and deterministic
/// `x = f(u, s)` with binary `U`.
fn gelfand_pinsker_oracle(ch: &StateChannel, steps: usize) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for f in 0..16usize {
        let fx = |u: usize, s: usize| (f >> (2 * u + s)) & 1;
        for a in 0..=steps {
            for b in 0..=steps {
                let pu0 = [a as f64 / steps as f64, b as f64 / steps as f64];
                // Joint table over (u, s, y).
                let mut p = vec![0.0; 8];
                for s in 0..2 {
                    for u in 0..2 {
                        let pus = ch.q_s()[s] * if u == 0 { pu0[s] } else { 1.0 - pu0[s] };
                        for y in 0..2 {
                            p[(u * 2 + s) * 2 + y] += pus * ch.w(fx(u, s), s, 0, y);
                        }
                    }
                }
                let sizes = [2, 2, 2];
                let v = cond_mi(&p, &sizes, &[0], &[2], &[]) - cond_mi(&p, &sizes, &[0], &[1], &[]);
                best = best.max(v);
            }
        }
    }
    best
}

#[test]
fn noncausal_search_approaches_gelfand_pinsker_value() {
    let ch = gelfand_pinsker_instance();
    let oracle = gelfand_pinsker_oracle(&ch, 200);
    let c = SearchConfig {
        u_card: Some(2),
        ..cfg()
    };
    let r = bound_search(BoundKind::Noncausal, &ch, 1.0, &c).unwrap();
    assert!(r.heuristic);
    assert!(r.value >= oracle - 2e-3, "{} vs {oracle}", r.value);
    assert!(r.value <= oracle + 1e-3, "{} vs {oracle}", r.value);
}

#[test]
fn search_on_echo_channel_finds_nothing() {
    for kind in [
        BoundKind::StrictlyCausal,
        BoundKind::Noncausal,
        BoundKind::StrictlyCausalMaximal,
    ] {
        match bound_search(kind, &jammer_echo(), 1.0, &cfg()) {
            Err(Error::NoFeasiblePoint(_)) => {}
            other => panic!("{kind:?}: {other:?}"),
        }
    }
}

#[test]
fn singleton_seed_matches_pointwise_evaluator() {
    for ch in [binary_example(), state_revealing()] {
        singleton_seed_case(&ch);
    }
}

fn singleton_seed_case(ch: &StateChannel) {
    let ch = ch.clone();
    let aux = describe_state(&ch, vec![0.5, 0.5]);
    let AuxLaw::StrictlyCausal { q_x, q_u_xs } = &aux else {
        unreachable!()
    };
    let h = optimal_estimator(&ch, &aux).unwrap();
    let c = SearchConfig {
        local_search: false,
        multistart_count: 0,
        ..cfg()
    };
    let at = strictly_causal_bound_at(&ch, q_x, q_u_xs, &h, 0.2, &c).unwrap();
    let found = bound_search_seeded(BoundKind::StrictlyCausal, &ch, 0.2, &c, vec![aux.clone()]);
    match found {
        Ok(r) => {
            assert!(at.feasible);
            assert!((r.terms["raw"] - at.terms["raw"]).abs() < 1e-9);
        }
        Err(Error::NoFeasiblePoint(_)) => assert!(!at.feasible),
        Err(e) => panic!("{e}"),
    }
}

// ---- lossless strictly causal ----

#[test]
fn lossless_bound_on_binary_example() {
    let r = lossless_strictly_causal_bound(&binary_example(), &cfg()).unwrap();
    assert!(r.value >= 1.0 - 2.0 * h2(0.1) - 1e-3, "{}", r.value);
    assert!((r.terms["H(S)"] - 0.4690).abs() < 5e-4);
}

#[test]
fn lossless_bound_when_output_reveals_everything() {
    let r = lossless_strictly_causal_bound(&state_and_input_revealed(), &cfg()).unwrap();
    assert!((r.value - 1.0).abs() < 1e-6, "{}", r.value);
    assert!(r.terms["max H(S|X,Y)"].abs() < 1e-9);
}

#[test]
fn lossless_bound_when_output_ignores_input() {
    let r = lossless_strictly_causal_bound(&output_ignores_everything(), &cfg()).unwrap();
    assert_eq!(r.value, 0.0);
    assert!(r.terms["raw"] < 0.0);
}

// ---- pure lossless feasibility ----

#[test]
fn pure_lossless_on_revealing_channel() {
    let ch = state_and_input_revealed();
    let f = pure_lossless_feasibility(&ch, &cfg()).unwrap();
    assert!(
        (f.rhs - (1.0 + entropy(ch.q_s()))).abs() < 1e-6,
        "{}",
        f.rhs
    );
    assert!(f.feasible && f.sym_ok);
}

#[test]
fn pure_lossless_on_useless_channel() {
    let f = pure_lossless_feasibility(&output_ignores_everything(), &cfg()).unwrap();
    assert!(f.rhs.abs() < 1e-6);
    assert!(f.lhs > 0.5);
    assert!(!f.feasible);
}

#[test]
fn pure_lossless_on_adder() {
    let f = pure_lossless_feasibility(&adder_example(), &cfg()).unwrap();
    assert!(f.sym_ok);
    assert!((f.lhs - 1.0).abs() < 1e-12);
    assert!(f.rhs.is_finite() && f.rhs >= 0.0);
    assert_eq!(f.feasible, f.lhs <= f.rhs + cfg().tolerance);
}

// ---- coupling ----

fn complete(n: usize) -> ChannelGraph {
    ChannelGraph::from_adjacency(vec![vec![true; n]; n])
}

fn edgeless(n: usize) -> ChannelGraph {
    ChannelGraph::from_adjacency((0..n).map(|a| (0..n).map(|b| a == b).collect()).collect())
}

#[test]
fn coupling_extremes() {
    let q = [0.2, 0.5, 0.3];
    assert_eq!(coupling_min_mi(&q, &complete(3)).unwrap().value, 0.0);
    let e = coupling_min_mi(&[0.5, 0.5], &edgeless(2)).unwrap();
    assert!((e.value - 1.0).abs() < 1e-6);
}

#[test]
fn coupling_with_one_sided_edge_matches_grid() {
    let g = ChannelGraph::from_adjacency(vec![vec![true, true], vec![false, true]]);
    let r = coupling_min_mi(&[0.5, 0.5], &g).unwrap();
    // Brute force over couplings supported on {(0,0),(0,1),(1,1)}.
    let mut best = f64::INFINITY;
    for a in 0..=1000 {
        for b in 0..=(1000 - a) {
            let (p00, p01) = (a as f64 / 1000.0, b as f64 / 1000.0);
            let joint = [p00, p01, 0.0, 1.0 - p00 - p01];
            let row0 = p00 + p01;
            let col0 = p00;
            if (row0 - 0.5).abs() > 1e-9 || (col0 - 0.5).abs() > 1e-9 {
                continue;
            }
            let v = marginal_entropy(&joint, &[2, 2], &[0])
                + marginal_entropy(&joint, &[2, 2], &[1])
                - entropy(&joint);
            best = best.min(v);
        }
    }
    assert!((r.value - best).abs() < 1e-3, "{} vs {best}", r.value);
    assert!((r.value - 1.0).abs() < 1e-3);
}

// ---- noncausal, maximal error ----

#[test]
fn noncausal_maximal_on_complete_graph() {
    let ch = jammer_echo();
    let aux = state_blind_noncausal(&ch);
    let AuxLaw::Noncausal { q_u_s, q_x_us } = &aux else {
        unreachable!()
    };
    let h = Estimator::uy(2, 2, |_, _| 0);
    let r = noncausal_maximal_bound_at(&ch, q_u_s, q_x_us, &h, 1.0, &cfg()).unwrap();
    assert_eq!(r.terms["D(Q_U)"], 0.0);
    assert!(r.terms["raw"] <= 0.0);
    assert!(!r.feasible);
}

#[test]
fn noncausal_maximal_with_state_as_output() {
    // Y = S without noise, U = S.
    let w = vec![vec![vec![vec![1.0, 0.0]], vec![vec![0.0, 1.0]]]; 2];
    let ch = StateChannel::from_nested(&w, vec![0.8, 0.2], hamming(2)).unwrap();
    let q_u_s = Kernel::deterministic(2, 2, |s| s);
    let q_x_us = Kernel::constant(4, &[0.5, 0.5]);
    let h = Estimator::uy(2, 2, |u, _| u);
    let r = noncausal_maximal_bound_at(&ch, &q_u_s, &q_x_us, &h, 0.0, &cfg()).unwrap();
    let hs = h2(0.2);
    assert!((r.terms["min I(U;Y) per-input"] - hs).abs() < 1e-9);
    assert!((r.terms["D(Q_U)"] - hs).abs() < 1e-6);
    assert!((r.terms["I(U;S)"] - hs).abs() < 1e-12);
    assert!(r.value.abs() < 1e-6);
}

#[test]
fn noncausal_maximal_agrees_with_binary_output_bound() {
    let ch = binary_example();
    let aux = state_blind_noncausal(&ch);
    let AuxLaw::Noncausal { q_u_s, q_x_us } = &aux else {
        unreachable!()
    };
    let h = optimal_estimator(&ch, &aux).unwrap();
    let t3 = noncausal_maximal_bound_at(&ch, q_u_s, q_x_us, &h, 1.0, &cfg()).unwrap();
    let b = binary_output_bound(&ch, &aux, &h, 1.0, &cfg()).unwrap();
    assert!(t3.terms["D(Q_U)"] >= t3.terms["min I(U;Y) per-input"]);
    assert!(
        (t3.value - b.value).abs() < 1e-6,
        "{} vs {}",
        t3.value,
        b.value
    );
    assert!((b.value - (1.0 - h2(0.2))).abs() < 1e-3);
}

// ---- strictly causal, maximal error ----

#[test]
fn strictly_causal_maximal_on_complete_graph() {
    let ch = jammer_echo();
    let q_u = Kernel::constant(4, &[1.0]);
    let h = Estimator::xuy(2, 1, 2, |_, _, _| 0);
    let r = strictly_causal_maximal_bound_at(&ch, &[0.5, 0.5], &q_u, &h, 1.0, &cfg()).unwrap();
    assert_eq!(r.value, 0.0);
    assert_eq!(r.terms["D(Q_X)"], 0.0);
    assert!(!r.feasible);
}

#[test]
fn strictly_causal_maximal_below_lossless_on_binary_example() {
    let ch = binary_example();
    let lossless = lossless_strictly_causal_bound(&ch, &cfg()).unwrap();
    let q_x = lossless.outer_argmax["Q_X"][0].clone();
    let aux = describe_state(&ch, q_x.clone());
    let AuxLaw::StrictlyCausal { q_u_xs, .. } = &aux else {
        unreachable!()
    };
    let h = Estimator::xuy(2, 2, 2, |_, u, _| u);
    let r = strictly_causal_maximal_bound_at(&ch, &q_x, q_u_xs, &h, 0.0, &cfg()).unwrap();
    assert!(r.terms["raw"] <= lossless.terms["raw"] + 1e-9);
    assert!(r.value <= lossless.value + 1e-9);
}

#[test]
fn single_jammer_maximal_equals_average() {
    let ch = gelfand_pinsker_instance();
    let q_x = vec![0.4, 0.6];
    let q_u = Kernel::constant(4, &[1.0]);
    let h = Estimator::xuy(2, 1, 2, |_, _, _| 0);
    let avg = strictly_causal_bound_at(&ch, &q_x, &q_u, &h, 1.0, &cfg()).unwrap();
    let max = strictly_causal_maximal_bound_at(&ch, &q_x, &q_u, &h, 1.0, &cfg()).unwrap();
    assert!((avg.value - max.value).abs() < 1e-9);
    assert!(max.feasible);
}

// ---- binary output ----

#[test]
fn binary_output_message_term_on_binary_example() {
    let ch = binary_example();
    let aux = describe_state(&ch, vec![0.5, 0.5]);
    let h = Estimator::xuy(2, 2, 2, |_, u, _| u);
    let r = binary_output_bound(&ch, &aux, &h, 0.0, &cfg()).unwrap();
    assert!((r.terms["message"] - (1.0 - h2(0.2))).abs() < 1e-3);
}

#[test]
fn binary_output_with_single_jammer_is_minimax() {
    let w = vec![
        vec![vec![vec![0.9, 0.1]], vec![vec![0.9, 0.1]]],
        vec![vec![vec![0.1, 0.9]], vec![vec![0.1, 0.9]]],
    ];
    let ch = StateChannel::from_nested(&w, vec![0.5, 0.5], hamming(2)).unwrap();
    let aux = AuxLaw::StrictlyCausal {
        q_x: vec![0.5, 0.5],
        q_u_xs: Kernel::constant(4, &[1.0]),
    };
    let h = Estimator::xuy(2, 1, 2, |_, _, _| 0);
    let b = binary_output_bound(&ch, &aux, &h, 1.0, &cfg()).unwrap();
    let m = minimax_capacity(&average_out_state(&ch), &cfg()).unwrap();
    assert!(
        (b.value - m.value).abs() < 1e-6,
        "{} vs {}",
        b.value,
        m.value
    );
}

#[test]
fn binary_output_with_shared_row_is_zero() {
    // Jammer 1 on x=0 and jammer 0 on x=1 produce the same row.
    let w = vec![
        vec![vec![vec![1.0, 0.0], vec![0.5, 0.5]]; 2],
        vec![vec![vec![0.5, 0.5], vec![0.0, 1.0]]; 2],
    ];
    let ch = StateChannel::from_nested(&w, vec![0.5, 0.5], hamming(2)).unwrap();
    let aux = AuxLaw::StrictlyCausal {
        q_x: vec![0.5, 0.5],
        q_u_xs: Kernel::constant(4, &[1.0]),
    };
    let h = Estimator::xuy(2, 1, 2, |_, _, _| 0);
    let r = binary_output_bound(&ch, &aux, &h, 1.0, &cfg()).unwrap();
    assert!(r.value.abs() < 1e-6, "{}", r.value);
}

#[test]
fn binary_output_rejects_wide_outputs() {
    let ch = adder_example();
    let aux = AuxLaw::StrictlyCausal {
        q_x: uniform(3),
        q_u_xs: adder_sum_aux(),
    };
    let h = Estimator::xuy(3, 4, 5, |_, _, _| 0);
    assert!(matches!(
        binary_output_bound(&ch, &aux, &h, 1.0, &cfg()),
        Err(Error::NotBinaryOutput(5))
    ));
}

// ---- rate plans ----

#[test]
fn rate_plan_for_state_description_on_binary_example() {
    let ch = binary_example();
    let aux = describe_state(&ch, vec![0.5, 0.5]);
    let tau = 0.01;
    let p = rate_plan(&ch, &aux, tau).unwrap();
    let avg = average_out_state(&ch);
    let a = grid_min_binary(20_000, |q| mi(&[0.5, 0.5], &mix(&avg, q)));
    let sizes = [2, 2, 2];
    let b = grid_min_binary(20_000, |q| {
        cond_mi(&xsy_table(&ch, &[0.5, 0.5], q), &sizes, &[1], &[2], &[0])
    });
    let c = entropy(ch.q_s());
    assert!((p.r_s_tilde - (c + 2.0 * tau)).abs() < 1e-9);
    assert!((p.r + p.r_s - (a - tau)).abs() < 1e-6);
    assert!(p.r_s_prime <= b - tau + 1e-6);
    assert!((p.r_s_prime - (p.r_s_tilde - p.r_s)).abs() < 1e-12);
    assert!(p.r > 0.0 && p.r_s >= 0.0);
}

#[test]
fn rate_plan_without_headroom() {
    let ch = binary_example();
    let aux = describe_state(&ch, vec![0.5, 0.5]);
    assert!(matches!(
        rate_plan(&ch, &aux, 0.5),
        Err(Error::InsufficientHeadroom(_))
    ));
    // The description term min I(S;Y|X) is about 0.032 bits, below 0.05.
    assert!(matches!(
        rate_plan(&ch, &aux, 0.05),
        Err(Error::InsufficientHeadroom(_))
    ));
}

#[test]
fn rate_plan_with_constant_description() {
    let ch = binary_example();
    let aux = AuxLaw::StrictlyCausal {
        q_x: vec![0.5, 0.5],
        q_u_xs: Kernel::constant(4, &[1.0]),
    };
    let tau = 0.05;
    let p = rate_plan(&ch, &aux, tau).unwrap();
    assert!((p.r_s_tilde - 2.0 * tau).abs() < 1e-12);
    assert!((p.r_s_prime - (2.0 * tau - p.r_s)).abs() < 1e-12);
    assert!(p.r > 0.0);
}
