use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, Value) {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_apolar")).args(args).envs(env.iter().copied()).output().expect("binary runs");
    let report = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad report for {args:?}: {e}"));
    (out.status.code().expect("exit code"), report)
}

fn without_timings(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn perp_dimensions_of_general_systems() {
    for (gen, degree, expect) in [("2,3,3", "2", "0"), ("2,4,3", "3", "1"), ("3,3,2", "2", "2")] {
        let (code, r) = run(&["perp", "--gen", gen, "--seed", "7", "--degree", degree, "--expect", expect]);
        assert_eq!(code, 0, "{gen}");
        assert_eq!(r["result"]["dims"][0]["dim"].to_string(), expect);
        assert_eq!(r["passed"], true);
    }
}

#[test]
fn perp_mismatch_exits_one() {
    let (code, r) = run(&["perp", "--gen", "2,3,3", "--seed", "7", "--degree", "2", "--expect", "1"]);
    assert_eq!(code, 1);
    assert_eq!(r["passed"], false);
}

#[test]
fn malformed_json_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"n\": 2, \"d\":").unwrap();
    let (code, r) = run(&["perp", "--input", path.to_str().unwrap(), "--degree", "1"]);
    assert_eq!(code, 2);
    assert!(r["error"].as_str().unwrap().contains("parse"));
}

#[test]
fn bad_tolerance_is_an_input_error() {
    let (code, _) = run_env(&["grove-check", "--seed", "1"], &[("APOLAR_TOL", "nope")]);
    assert_eq!(code, 2);
}

#[test]
fn tolerance_override_is_recorded_and_applied() {
    let (code, r) = run_env(&["diagonalize", "--gen", "2,2,2", "--seed", "3"], &[("APOLAR_TOL", "1e-30")]);
    assert!((r["tolerance"].as_f64().unwrap() / 1e-30 - 1.0).abs() < 1e-12);
    assert_eq!(code, 1);
    let (code, r) = run(&["diagonalize", "--gen", "2,2,2", "--seed", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r["tolerance"], 1e-8);
}

#[test]
fn elliptic_count() {
    let (code, r) = run(&["count", "--quadruple", "2,4,3,9", "--curve-degree", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["count"], 4);
    assert_eq!(r["result"]["params"]["m"], 9);
    assert_eq!(r["result"]["trace"]["newton"][0], "3");
}

#[test]
fn unsupported_count_is_an_input_error() {
    let (code, _) = run(&["count", "--quadruple", "2,3,8,8", "--curve-degree", "3"]);
    assert_eq!(code, 2);
}

#[test]
fn nine_polyhedra_in_a_pencil_of_cubics() {
    let (code, r) = run(&["construct", "--quadruple", "2,3,8,8", "--seed", "11"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["count"], 9);
    assert_eq!(r["seed"], 11);
}

#[test]
fn constructions_report_rerunnable_inputs() {
    let (code, r) = run(&["construct", "--quadruple", "2,4,2,8", "--seed", "5"]);
    assert_eq!(code, 0);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pencil.json");
    std::fs::write(&path, serde_json::to_string(&r["inputs"]["system"]).unwrap()).unwrap();
    let point: Vec<&str> = r["inputs"]["point"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    let (code2, r2) = run(&[
        "construct",
        "--quadruple",
        "2,4,2,8",
        "--seed",
        "5",
        "--input",
        path.to_str().unwrap(),
        "--point",
        &point.join(":"),
    ]);
    assert_eq!(code2, 0);
    assert_eq!(r["result"], r2["result"]);
}

#[test]
fn counted_quadruples_are_not_constructed() {
    let (code, r) = run(&["construct", "--quadruple", "2,4,3,9"]);
    assert_eq!(code, 2);
    assert!(r["error"].as_str().unwrap().contains("count"));
}

#[test]
fn london_net_has_two_hexahedra() {
    let (code, r) = run(&["london", "--gen", "--seed", "3", "--prime", "32003"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["hexahedra"], 2);
    assert_eq!(r["result"]["count"]["common"], 72);
}

#[test]
fn london_rejects_other_shapes() {
    let (code, _) = run(&["london", "--gen", "2,3,4", "--seed", "3"]);
    assert_eq!(code, 2);
}

#[test]
fn grove_control_fails() {
    let (code, r) = run(&["grove-check", "--points", "1:1,1:1,1:1,1:1,1:1,1:1,1:1,1:1"]);
    assert_eq!(code, 1);
    assert!(r["result"]["rank"].as_u64().unwrap() < 16);
    let (code, r) = run(&["grove-check", "--seed", "2"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["rank"], 16);
}

#[test]
fn betti_of_seven_points() {
    let (code, r) = run(&["betti", "--gen", "2,7", "--seed", "1"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["general"], true);
    let out = Command::new(env!("CARGO_BIN_EXE_apolar")).args(["betti", "--gen", "2,7", "--text"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("total:"));
}

#[test]
fn reports_are_deterministic() {
    for args in [
        &["construct", "--quadruple", "3,2,7,7", "--seed", "4"][..],
        &["diagonalize", "--gen", "3,2,2", "--seed", "9"][..],
        &["london", "--gen", "--seed", "1", "--exhibit"][..],
    ] {
        let (c1, a) = run(args);
        let (c2, b) = run(args);
        assert_eq!(c1, c2);
        assert_eq!(serde_json::to_string(&without_timings(a)).unwrap(), serde_json::to_string(&without_timings(b)).unwrap());
    }
}

#[test]
fn report_header() {
    let (_, r) = run(&["grove-check", "--seed", "0"]);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["command"], "grove-check");
    assert!(r["version"].is_string());
    assert!(r["argv"].is_array());
}
