use std::path::Path;
use std::process::{Command, Output};

use avc_jsc::bounds::{strictly_causal_bound_at, SearchConfig};
use avc_jsc::builtin::jammed_erasure;
use avc_jsc::channel::{Estimator, Kernel};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_avc-jsc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn h2(p: f64) -> f64 {
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

#[test]
fn example1_verdicts() {
    let out = run(&["reproduce", "example1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    let res = v["results"].as_array().unwrap();
    let find = |label: &str| res.iter().find(|r| r["label"] == label).unwrap().clone();
    assert_eq!(find("XS")["symmetrizable"], false);
    assert_eq!(find("X")["symmetrizable"], false);
    let s = find("S");
    assert_eq!(s["symmetrizable"], true);
    assert!(s["margin"].as_f64().unwrap() <= 1e-7);
    let u = find("U|X");
    assert_eq!(u["symmetrizable"], false);
    assert!(u["margin"].as_f64().unwrap() > 1e-3);
}

#[test]
fn binary_example_gap() {
    let out = run(&["reproduce", "binary_example", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let val = |k: &str| v["values"][k].as_f64().unwrap();
    assert!((val("average-error message term") - (1.0 - h2(0.1))).abs() < 1e-3);
    assert!(val("maximal-error message term") <= 1.0 - h2(0.2) + 1e-3);
    assert!((val("gap") - 0.253).abs() < 1e-3);
    assert!((val("h_b(0.1)") - 0.4690).abs() < 5e-4);
    assert_eq!(v["strict_gap"], true);
}

#[test]
fn unknown_example_is_a_usage_error() {
    assert_eq!(run(&["reproduce", "example7"]).status.code(), Some(2));
}

#[test]
fn malformed_channel_reports_its_location() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.json", "{\n  \"nx\": ,\n}");
    let out = run(&["check-sym", "--channel", &p]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn missing_channel_is_an_input_error() {
    assert_eq!(run(&["check-sym"]).status.code(), Some(2));
    assert_eq!(
        run(&["check-sym", "--channel", "/nonexistent/ch.json"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn degenerate_channel_has_no_pairs_to_exchange() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "one.json",
        r#"{"nx":1,"ns":1,"nj":1,"ny":1,"ns_hat":1,"W":[[[[1.0]]]],"Qs":[1.0],"distortion":[[0]]}"#,
    );
    let out = run(&["check-sym", "--channel", &p, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    for r in json(&out)["results"].as_array().unwrap() {
        assert_eq!(r["margin"], "inf");
        assert_eq!(r["pairs"], 0);
        assert_eq!(r["symmetrizable"], false);
    }
}

#[test]
fn check_sym_exits_zero_on_symmetrizable_channels() {
    let out = run(&[
        "check-sym",
        "--builtin",
        "adder",
        "--variant",
        "S",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("S,"));
    assert!(csv.contains(",true,"));
}

#[test]
fn minimax_bound_of_the_binary_example() {
    let out = run(&[
        "bound",
        "--builtin",
        "binary-example",
        "--kind",
        "minimax",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert!((v["result"]["value"].as_f64().unwrap() - (1.0 - h2(0.1))).abs() < 1e-3);
}

#[test]
fn lossless_bound_reports_value_and_failed_hypothesis() {
    let out = run(&[
        "bound",
        "--builtin",
        "binary-example",
        "--kind",
        "lossless-strictly-causal",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert!(v["result"]["value"].as_f64().unwrap() >= 1.0 - 2.0 * h2(0.1) - 1e-3);
    assert_eq!(v["feasible"], false);
}

#[test]
fn distortion_bounds_need_a_budget() {
    let out = run(&[
        "bound",
        "--builtin",
        "binary-example",
        "--kind",
        "noncausal",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["bound", "--builtin", "binary-example", "--kind", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn useless_channel_cannot_carry_the_state() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "useless.json",
        r#"{"nx":2,"ns":2,"nj":1,"ny":2,"ns_hat":2,
            "W":[[[[0.5,0.5]],[[0.5,0.5]]],[[[0.5,0.5]],[[0.5,0.5]]]],
            "Qs":[0.5,0.5],"distortion":[[0,1],[1,0]]}"#,
    );
    let out = run(&[
        "bound",
        "--channel",
        &p,
        "--kind",
        "lossless-feasibility",
        "--format",
        "text",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("H(S)") && text.contains("I(X,S;Y)") && text.contains("infeasible"));
}

#[test]
fn reported_optimizer_reproduces_the_value() {
    let out = run(&[
        "bound",
        "--builtin",
        "jammed-erasure",
        "--kind",
        "strictly-causal",
        "--D",
        "0.3",
        "--grid",
        "8",
        "--starts",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let r = &v["result"];
    let rows = |key: &str| -> Vec<Vec<f64>> {
        serde_json::from_value(r["outer_argmax"][key].clone()).unwrap()
    };
    let q_x = rows("Q_X")[0].clone();
    let q_u_xs = Kernel::from_rows(&rows("Q_U|XS")).unwrap();
    let h: Estimator = serde_json::from_value(r["estimator"].clone()).unwrap();
    let again = strictly_causal_bound_at(
        &jammed_erasure(),
        &q_x,
        &q_u_xs,
        &h,
        0.3,
        &SearchConfig::default(),
    )
    .unwrap();
    assert!((again.value - r["value"].as_f64().unwrap()).abs() < 1e-9);
}

#[test]
fn simulation_without_headroom_fails_cleanly() {
    let out = run(&["simulate", "--builtin", "binary-example", "--tau", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("headroom"));
}

#[test]
fn simulation_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = run(&[
            "simulate",
            "--builtin",
            "jammed-erasure",
            "--scheme",
            "state-blind",
            "--n",
            "8,12,16",
            "--trials",
            "20",
            "--seed",
            "5",
            "--format",
            "csv",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let text = String::from_utf8(text).unwrap();
    assert_eq!(text.lines().count(), 10);
    assert!(text.starts_with("jammer,n,trials,avg_error,max_error,distortion,covering_failures,ambiguities,bad_codeword_errors\n"));
}

#[test]
fn simulation_rejects_unknown_jammers() {
    let out = run(&[
        "simulate",
        "--builtin",
        "jammed-erasure",
        "--scheme",
        "state-blind",
        "--jammer",
        "loud",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
