use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn credal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_credal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn run_to_file(dir: &Path, file: &str, args: &[&str]) -> (Output, Value) {
    let out = dir.join(file);
    let mut full: Vec<&str> = args.to_vec();
    let out_str = out.to_str().unwrap().to_string();
    full.extend(["--out", &out_str]);
    let o = credal(&full);
    (o, read_json(&out))
}

#[test]
fn example_apriori_value_is_one_third() {
    let dir = tempfile::tempdir().unwrap();
    let (o, v) = run_to_file(dir.path(), "r.json", &["--scenario", "builtin:example_2_1", "solve-apriori"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "solve-apriori");
    assert_eq!(v["scenario"], "example_2_1");
    let value = v["result"]["value"].as_f64().unwrap();
    assert!((value - 1.0 / 3.0).abs() < 1e-6, "{value}");
}

#[test]
fn coin_dilates_at_both_observations() {
    let dir = tempfile::tempdir().unwrap();
    let (o, v) = run_to_file(dir.path(), "d.json", &["--scenario", "builtin:walley_coin", "detect-dilation"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let obs = v["result"]["observations"].as_array().unwrap();
    assert_eq!(obs.len(), 2);
    for d in obs {
        assert_eq!(d["dilation"], true, "{d}");
    }
    assert_eq!(v["result"]["any_dilation"], true);
}

#[test]
fn monty_switches_after_seeing_door_three_open() {
    let o = credal(&["--scenario", "builtin:monty_hall", "solve-game", "--observe", "G3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("agent plays door 2\n"), "{}", stdout(&o));

    let o = credal(&["--scenario", "builtin:monty_hall", "--format", "json", "solve-game", "--observe", "G3"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["agent"]["action"], "door 2");
    assert!((v["result"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-6);
}

#[test]
fn monty_apriori_rule_is_switch() {
    let o = credal(&["--scenario", "builtin:monty_hall", "--format", "json", "solve-apriori"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v["result"]["rule"]["rows"].as_array().unwrap();
    assert_eq!(rows[0]["probabilities"], serde_json::json!([0.0, 0.0, 1.0]));
    assert_eq!(rows[1]["probabilities"], serde_json::json!([0.0, 1.0, 0.0]));
}

#[test]
fn p_game_certificate_is_reported() {
    let o = credal(&["--scenario", "builtin:example_2_1", "--format", "json", "solve-game"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let cert = &v["result"]["certificate"];
    assert!(cert["max_residual"].as_f64().unwrap() <= 1e-6);
    assert_eq!(cert["equality_chain_residuals"].as_array().unwrap().len(), 4);
    assert_eq!(cert["chain_values"].as_array().unwrap().len(), 5);
}

#[test]
fn time_inconsistency_flagged_on_example() {
    let o = credal(&["--scenario", "builtin:example_2_1", "--format", "json", "time-inconsistency"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["inconsistent"], true);
}

#[test]
fn every_command_runs_on_every_builtin() {
    let commands: &[&[&str]] = &[
        &["solve-apriori"],
        &["solve-aposteriori"],
        &["solve-game"],
        &["hull"],
        &["check-conditioning"],
        &["check-ignoring"],
        &["detect-dilation"],
        &["check-calibration"],
        &["sharp-search"],
        &["time-inconsistency"],
        &["compare-rules"],
        &["compare-rules", "--rules", "uniform", "apriori"],
    ];
    for s in ["example_2_1", "monty_hall", "walley_coin"] {
        let scenario = format!("builtin:{s}");
        for cmd in commands {
            let mut args = vec!["--scenario", scenario.as_str(), "--format", "json"];
            args.extend_from_slice(cmd);
            let o = credal(&args);
            assert!(o.status.success(), "{s} {cmd:?}: {}", stderr(&o));
            let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
            assert_eq!(v["command"], cmd[0]);
        }
    }
}

#[test]
fn condition_and_c_condition_take_labels() {
    let o = credal(&["--scenario", "builtin:monty_hall", "condition", "--on", "X=G3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = credal(&["--scenario", "builtin:monty_hall", "--format", "json", "c-condition", "--partition", "G2,G3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    // Conditioning on the whole space ignores X: worst case 2/3.
    assert!((v["result"]["rule_worst_case"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-6);
}

#[test]
fn compare_rules_orders_mappings() {
    let o = credal(&[
        "--scenario",
        "builtin:monty_hall",
        "--format",
        "json",
        "compare-rules",
        "--rules",
        "G2=door 3,G3=door 2",
        "G2=door 1,G3=door 1",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["order"], "better");
}

#[test]
fn validation_errors_exit_two() {
    let o = credal(&["--scenario", "builtin:nope", "hull"]);
    assert_eq!(o.status.code(), Some(2));
    let o = credal(&["--scenario", "builtin:monty_hall", "solve-game", "--observe", "G9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("G9"));
    let o = credal(&["--scenario", "builtin:monty_hall", "--tolerance=0", "hull"]);
    assert_eq!(o.status.code(), Some(2));
    let o = credal(&["hull"]);
    assert_eq!(o.status.code(), Some(2));
    let o = credal(&["--scenario", "builtin:monty_hall", "condition", "--on", "Z=1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn impossible_event_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    fs::write(
        &path,
        r#"{"name": "z", "space": {"x": ["a", "b"], "y": ["p", "q"], "a": ["p", "q"]},
  "loss": [[0, 1], [1, 0]],
  "credal": {"vertices": [[0.5, 0.5, 0, 0]]}}"#,
    )
    .unwrap();
    let o = credal(&["--scenario", path.to_str().unwrap(), "condition", "--on", "X=b"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn malformed_file_names_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(
        &path,
        "{\"name\": \"bad\",\n \"space\": {\"x\": [\"a\"], \"y\": [\"p\", \"q\"], \"a\": [\"p\", \"q\"]},\n \"loss\": [[0, 1]],\n \"credal\": {\"vertices\": [[0.5, 0.5]]}}\n",
    )
    .unwrap();
    let o = credal(&["--scenario", path.to_str().unwrap(), "hull"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("bad.json:3"), "{err}");
    assert!(err.contains("loss"), "{err}");
}

#[test]
fn unknown_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("extra.json");
    fs::write(
        &path,
        r#"{"name": "e", "space": {"x": ["a"], "y": ["p", "q"], "a": ["p", "q"]},
  "loss": [[0, 1], [1, 0]], "priors": 3,
  "credal": {"vertices": [[0.5, 0.5]]}}"#,
    )
    .unwrap();
    let o = credal(&["--scenario", path.to_str().unwrap(), "hull"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("priors"), "{}", stderr(&o));
}

#[test]
fn sharp_search_over_seven_observations_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.json");
    let xs: Vec<String> = (0..7).map(|i| format!("\"x{i}\"")).collect();
    let mut vertex = vec!["0".to_string(); 14];
    vertex[0] = "1".into();
    let body = format!(
        r#"{{"name": "big", "space": {{"x": [{}], "y": ["p", "q"], "a": ["p", "q"]}},
  "loss": [[0, 1], [1, 0]],
  "credal": {{"vertices": [[{}]]}}}}"#,
        xs.join(", "),
        vertex.join(", ")
    );
    fs::write(&path, body).unwrap();
    let o = credal(&["--scenario", path.to_str().unwrap(), "sharp-search"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn certificate_failure_exits_three_and_reports_residuals() {
    // Below machine precision some residual is nonzero on at least one builtin.
    let dir = tempfile::tempdir().unwrap();
    let mut failures = 0;
    for s in ["example_2_1", "monty_hall", "walley_coin"] {
        let scenario = format!("builtin:{s}");
        let (o, v) = run_to_file(
            dir.path(),
            &format!("{s}.json"),
            &["--scenario", &scenario, "--tolerance", "1e-300", "solve-game"],
        );
        match o.status.code() {
            Some(0) => assert!(v["result"]["certificate"]["max_residual"].as_f64().unwrap() <= 1e-300),
            Some(3) => {
                failures += 1;
                let cert = &v["error"]["certificate"];
                assert_eq!(v["error"]["kind"], "certificate_failure");
                assert!(cert["max_residual"].as_f64().unwrap() > 1e-300);
                assert_eq!(cert["equality_chain_residuals"].as_array().unwrap().len(), 4);
                assert!(stderr(&o).contains("certificate"));
            }
            other => panic!("{s}: unexpected exit {other:?}: {}", stderr(&o)),
        }
    }
    assert!(failures > 0);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["solve-game", "time-inconsistency", "check-ignoring", "sharp-search"] {
        let a = dir.path().join("a.json");
        let b = dir.path().join("b.json");
        for p in [&a, &b] {
            let o = credal(&["--scenario", "builtin:monty_hall", cmd, "--out", p.to_str().unwrap()]);
            assert!(o.status.success());
        }
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "{cmd}");
    }
}

#[test]
fn printed_example_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = credal(&["examples", "monty_hall"]);
    assert!(o.status.success());
    let path = dir.path().join("copy.json");
    fs::write(&path, stdout(&o)).unwrap();
    let a = credal(&["--scenario", path.to_str().unwrap(), "--format", "json", "solve-apriori"]);
    let b = credal(&["--scenario", "builtin:monty_hall", "--format", "json", "solve-apriori"]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn examples_lists_builtins() {
    let o = credal(&["examples"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for s in ["example_2_1", "monty_hall", "walley_coin"] {
        assert!(text.contains(s));
    }
}

#[test]
fn ge_constraints_bound_from_below() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ge.json");
    fs::write(
        &path,
        r#"{"name": "ge", "space": {"x": ["a"], "y": ["p", "q"], "a": ["p", "q"]},
  "loss": [[0, 1], [1, 0]],
  "credal": {"constraints": [{"coeffs": [1, 0], "relation": "ge", "rhs": "3/4"}]}}"#,
    )
    .unwrap();
    let o = credal(&["--scenario", path.to_str().unwrap(), "--format", "json", "solve-apriori"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    // Pr(p) >= 3/4: guessing p loses at most 1/4.
    assert!((v["result"]["value"].as_f64().unwrap() - 0.25).abs() < 1e-6);
}
