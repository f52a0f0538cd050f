//! Black-box tests of the command-line interface: output text, JSON shape,
//! spec-file handling, and exit codes.

use assert_cmd::Command;
use predicates::prelude::*;
use serde_json::json;

fn bin() -> Command {
    Command::cargo_bin("weylcalc").unwrap()
}

fn stdout_of(args: &[&str]) -> String {
    let out = bin().args(args).assert().success();
    String::from_utf8_lossy(&out.get_output().stdout).into_owned()
}

#[test]
fn basic_algebra_commands() {
    assert_eq!(stdout_of(&["bracket", "d1", "x1"]), "1\n");
    assert_eq!(stdout_of(&["compose", "d1", "x1"]), "1 + x1*d1\n");
    assert_eq!(stdout_of(&["apply", "d1^2", "x1^3"]), "6*x1\n");
    assert_eq!(stdout_of(&["symbol", "x2*d1^2 + d2"]), "x2*xi1^2\n");
    assert_eq!(stdout_of(&["poisson", "xi1^2", "x1*xi2"]), "2*xi1*xi2\n");
    assert_eq!(stdout_of(&["adjoint", "d1"]), "-d1\n");
    assert_eq!(stdout_of(&["conj", "x1"]), "-x1\n");
}

#[test]
fn dim_flag_embeds_in_larger_space() {
    // x3 only exists once --dim raises the ambient dimension
    assert_eq!(stdout_of(&["--dim", "3", "poisson", "xi3", "x3"]), "1\n");
    bin().args(["--dim", "1", "apply", "d2", "x1"])
        .assert()
        .failure()
        .code(2);
}

#[test]
fn expomega_pads_missing_components() {
    assert_eq!(stdout_of(&["expomega", "--omega", "x2,x1", "d1"]), "x2 + d1\n");
    assert_eq!(
        stdout_of(&["--dim", "2", "expomega", "--omega", "0", "d1 + d2"]),
        "d2 + d1\n"
    );
    // not closed: d(x2 dx1) != 0
    bin().args(["expomega", "--omega", "x2,0", "d1"])
        .assert()
        .failure()
        .code(2);
}

#[test]
fn push_reads_diffeo_files() {
    let dir = tempdir();
    let path = dir.join("phi.json");
    std::fs::write(
        &path,
        json!({"forward": ["x1 + x2^2", "x2"], "inverse": ["x1 - x2^2", "x2"]})
            .to_string(),
    )
    .unwrap();
    let out = stdout_of(&["push", "--phi", path.to_str().unwrap(), "d2"]);
    assert_eq!(out, "d2 + 2*x2*d1\n");

    // a pair that is not mutually inverse is a usage error
    std::fs::write(
        &path,
        json!({"forward": ["x1 + 1"], "inverse": ["x1 + 1"]}).to_string(),
    )
    .unwrap();
    bin().args(["push", "--phi", path.to_str().unwrap(), "d1"])
        .assert()
        .failure()
        .code(2);
}

#[test]
fn aut_and_recover_use_spec_files() {
    let dir = tempdir();
    let spec = dir.join("spec.json");
    std::fs::write(
        &spec,
        json!({
            "family": "D1",
            "dim": 1,
            "kappa": "2",
            "lambda": "1/3",
            "omega": ["x1"],
            "phi": {"forward": ["x1 + 1"], "inverse": ["x1 - 1"]}
        })
        .to_string(),
    )
    .unwrap();
    let path = spec.to_str().unwrap();

    assert_eq!(stdout_of(&["aut", "--spec", path, "x1"]), "-2 + 2*x1\n");

    let out = stdout_of(&["recover", "--family", "D1", "--spec", path]);
    assert!(out.contains("kappa: 2"), "{}", out);
    assert!(out.contains("lambda: 1/3"), "{}", out);
    assert!(out.contains("phi_inverse: [-1 + x1]"), "{}", out);

    bin().args(["recover", "--family", "S", "--spec", path])
        .assert()
        .failure()
        .code(2);
}

#[test]
fn aut_rejects_inconsistent_d_spec() {
    let dir = tempdir();
    let spec = dir.join("bad.json");
    std::fs::write(
        &spec,
        json!({"family": "D", "dim": 1, "a": 0, "kappa": "-1"}).to_string(),
    )
    .unwrap();
    bin().args(["aut", "--spec", spec.to_str().unwrap(), "d1"])
        .assert()
        .failure()
        .code(2);
}

#[test]
fn verify_reports_and_exit_codes() {
    let out = stdout_of(&["verify", "--suite", "nilpotency", "--trials", "3"]);
    assert!(out.starts_with("suite nilpotency: 3 trials"), "{}", out);
    assert!(out.trim_end().ends_with("PASS"), "{}", out);

    bin().args(["verify", "--suite", "no-such-suite"])
        .assert()
        .failure()
        .code(2)
        .stderr(predicate::str::contains("unknown suite"));

    let out = stdout_of(&["--json", "verify", "--suite", "lemma-C", "--trials", "2"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["suite"], "lemma-C");
    assert_eq!(v["passed"], true);
}

#[test]
fn classify_emits_the_solution_set() {
    let out = stdout_of(&["--dim", "1", "classify", "--coeff-deg", "2"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["n"], 1);
    assert_eq!(v["coeff_degree"], 2);
    let tuples: Vec<(String, String, String, String)> = v["admissible"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| {
            (
                t["kappa"].as_str().unwrap().to_string(),
                t["lambda"].as_str().unwrap().to_string(),
                t["c1"].as_str().unwrap().to_string(),
                t["c2"].as_str().unwrap().to_string(),
            )
        })
        .collect();
    assert!(tuples.contains(&("1".into(), "0".into(), "0".into(), "0".into())));
    assert!(tuples.contains(&("-1".into(), "1".into(), "1".into(), "-1".into())));
    assert_eq!(tuples.len(), 2);

    bin().args(["classify"]).assert().failure().code(2);
}

#[test]
fn syntax_errors_are_usage_errors() {
    bin().args(["bracket", "d1", "x1 +"])
        .assert()
        .failure()
        .code(2)
        .stderr(predicate::str::contains("syntax error"));
    bin().args(["symbol", "0"]).assert().failure().code(2);
    bin().args(["poisson", "d1", "x1"]).assert().failure().code(2);
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("weylcalc-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
