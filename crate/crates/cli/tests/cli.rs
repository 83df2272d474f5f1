//! End-to-end tests against the compiled binary: the documented examples,
//! JSON shapes, exit codes, and seed determinism.

use serde_json::Value;
use std::process::{Command, Output};

fn annular(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_annular"))
        .args(args)
        .env_remove("ANNULAR_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> Value {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let text = String::from_utf8_lossy(&output.stdout);
    serde_json::from_str(text.lines().next().expect("one line")).expect("valid JSON")
}

#[test]
fn check_reports_membership_and_connectivity() {
    let out = annular(&["check", "--shape", "5,3", "--perm", "(1,8)(3,4,7)(5,6)"]);
    let json = stdout_json(&out);
    assert_eq!(json["member"], Value::Bool(true));
    assert_eq!(json["connected"], Value::Bool(true));
    assert_eq!(json["witness"], Value::Null);
}

#[test]
fn check_reports_witness_for_non_members() {
    let out = annular(&[
        "check",
        "--shape",
        "5,3",
        "--perm",
        "(1,3)(2,4)",
        "--method",
        "patterns",
    ]);
    let json = stdout_json(&out);
    assert_eq!(json["member"], Value::Bool(false));
    assert_eq!(json["witness"]["kind"], "AC1");
    assert_eq!(json["witness"]["elements"], serde_json::json!([1, 2, 3, 4]));
}

#[test]
fn complement_reproduces_the_known_instance() {
    let out = annular(&["complement", "--shape", "5,3", "--perm", "(1,8)(3,4,7)(5,6)"]);
    assert_eq!(stdout_json(&out)["kreweras"], "(1,2,7)(4,6)(5,8)");
}

#[test]
fn count_closed_form_and_enumeration_agree() {
    let closed = annular(&["count", "--shape", "2,2", "--connected"]);
    let json = stdout_json(&closed);
    assert_eq!(json["count"], "18");
    assert_eq!(json["method"], "closed_form");

    let enumerated = annular(&[
        "count",
        "--shape",
        "2,2",
        "--connected",
        "--method",
        "enumerate",
    ]);
    assert_eq!(stdout_json(&enumerated)["count"], "18");
}

#[test]
fn enumerate_streams_members_as_json_lines() {
    let out = annular(&["enumerate", "--shape", "1,1"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).expect("valid JSON"))
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["perm"], "");
    assert_eq!(lines[0]["connected"], Value::Bool(false));
    assert_eq!(lines[1]["perm"], "(1,2)");
    assert_eq!(lines[1]["connected"], Value::Bool(true));
}

#[test]
fn fiber_respects_the_trichotomy() {
    let out = annular(&["fiber", "--shape", "2,2", "--blocks", "1,2,3,4"]);
    assert_eq!(stdout_json(&out)["size"], 4);
    let out = annular(&["fiber", "--shape", "2,2", "--blocks", "1,3|2,4"]);
    let json = stdout_json(&out);
    assert_eq!(json["size"], 1);
    assert_eq!(json["fiber"][0], "(1,3)(2,4)");
}

#[test]
fn moment_exact_and_limit() {
    let out = annular(&["moment", "--words", "1,1", "-m", "3", "-n", "5"]);
    let json = stdout_json(&out);
    assert_eq!(json["value"]["num"], "24");
    assert_eq!(json["value"]["den"], "25");

    let out = annular(&["moment", "--words", "1,1,1", "--limit", "--c", "1"]);
    let json = stdout_json(&out);
    assert_eq!(json["poly_c"], serde_json::json!(["0", "1", "3", "1"]));
    assert_eq!(json["at_c"]["num"], "5");

    let out = annular(&["moment", "--ensemble", "gue", "--words", "1,1,1", "-n", "8"]);
    assert_eq!(stdout_json(&out)["value"]["num"], "0");
}

#[test]
fn covariance_identity_is_exact() {
    let out = annular(&["covariance", "--words", "1,1;1", "-m", "2", "-n", "3"]);
    let json = stdout_json(&out);
    assert_eq!(json["equal"], Value::Bool(true));
    assert_eq!(json["lhs"], json["rhs"]);
}

#[test]
fn cumulant_both_methods_agree() {
    let out = annular(&["cumulant", "--words", "1;1;1", "-m", "2", "-n", "2"]);
    let json = stdout_json(&out);
    assert_eq!(json["equal"], Value::Bool(true));
}

#[test]
fn simulate_is_seed_deterministic_and_calibrated() {
    let args = [
        "simulate", "--words", "1,1", "-m", "4", "-n", "4", "--trials", "3000", "--seed", "11",
    ];
    let a = stdout_json(&annular(&args));
    let b = stdout_json(&annular(&args));
    assert_eq!(a, b);
    let z = a["z_score"].as_f64().expect("z present");
    assert!(z <= 5.0, "z = {z}");
    assert_eq!(a["exact"]["num"], "2");
}

#[test]
fn defect_handles_many_circles() {
    let out = annular(&["defect", "--shape", "3,2,2", "--perm", "(1,4)(2,6)"]);
    let json = stdout_json(&out);
    assert_eq!(json["defect"], 0);
    assert_eq!(json["connected"], Value::Bool(true));
    assert_eq!(json["circle_partition"], serde_json::json!([[1, 2, 3]]));
}

#[test]
fn exit_codes_separate_domain_and_usage_errors() {
    let domain = annular(&["complement", "--shape", "2,2", "--perm", "(1,3,2,4)"]);
    assert_eq!(domain.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&domain.stderr).contains("error"));

    let usage = annular(&["no-such-command"]);
    assert_eq!(usage.status.code(), Some(2));

    let parse = annular(&["check", "--shape", "2,2", "--perm", "(1,2,2)"]);
    assert_eq!(parse.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&parse.stderr).contains("appears more than once"));
}

#[test]
fn env_var_supplies_the_default_seed() {
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_annular"))
            .args(["simulate", "--words", "1", "-m", "4", "-n", "4", "--trials", "200"])
            .env("ANNULAR_SEED", "31337")
            .output()
            .expect("binary runs");
        stdout_json(&out)
    };
    let a = run();
    let b = run();
    assert_eq!(a, b);
    assert_eq!(a["seed"], 31337);
}

#[test]
fn parity_bijection_outputs_doubled_member() {
    let out = annular(&["parity-bijection", "--shape", "1,1", "--perm", "(1,2)"]);
    let json = stdout_json(&out);
    assert_eq!(json["image"], "(1,4)(2,3)");
    assert_eq!(json["doubled_shape"], "2,2");
}
