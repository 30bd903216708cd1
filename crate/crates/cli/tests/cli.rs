//! End-to-end runs of the `ballgen` binary: exit codes, report contents
//! and reproducibility.

use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn ballgen(args: &[&str]) -> (i32, Option<Value>, String) {
    ballgen_with_env(args, &[])
}

fn ballgen_with_env(args: &[&str], env: &[(&str, &str)]) -> (i32, Option<Value>, String) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ballgen"));
    cmd.args(args).arg("--output").arg(&out);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let result = cmd.output().unwrap();
    let report = std::fs::read_to_string(&out).ok().map(|s| serde_json::from_str(&s).unwrap());
    (result.status.code().unwrap(), report, String::from_utf8_lossy(&result.stderr).into_owned())
}

fn without_clock(mut report: Value) -> Value {
    report.as_object_mut().unwrap().remove("wall_clock_seconds");
    report
}

#[test]
fn exit_code_matrix_over_the_corpus() {
    let cases: &[(&[&str], i32)] = &[
        (&["certify", "-e", "example-6.1", "--beta", "0", "--samples", "20000", "--seed", "7"], 0),
        (&["certify", "-e", "example-6.2", "--beta", "0"], 0),
        (&["certify", "-e", "example-6.2-quad", "--beta", "0"], 0),
        (&["certify", "-e", "example-4.2", "--beta", "0"], 0),
        (&["certify", "-e", "h-beta:1", "--beta", "-1", "--mode", "group"], 0),
        (&["certify", "-e", "h-beta:1", "--beta", "-1.1", "--mode", "poisson"], 1),
        (&["certify", "-e", "zero:3", "--mode", "group"], 0),
        (&["dilation", "-e", "example-4.2"], 0),
        (&["dilation", "-e", "h-beta:2", "--beta", "-2"], 0),
        (&["dilation", "-e", "h-beta:2", "--beta", "-3"], 1),
        (&["slice", "-e", "example-6.1", "--beta", "0", "--samples", "4000"], 0),
        // the positive region lies on the slice through (1/sqrt2, -1/sqrt2), which the grid misses
        (&["slice", "-e", "example-6.1-quad", "--beta", "0", "--alpha", "0.3826834323650898"], 1),
        (&["slice", "-e", "example-4.2", "--alpha", "0.5", "--beta", "-3"], 0),
        (&["flow", "-e", "h-beta:1", "--beta", "-1", "--time", "1"], 0),
        (&["flow", "-e", "example-6.1", "--beta", "-1"], 0),
        (&["flow", "-e", "example-6.1", "--beta", "-1.5"], 1),
        (&["jets", "-e", "h-beta:1", "--beta", "-1"], 0),
        (&["jets", "-e", "h-beta:1", "--beta", "-1", "--exact"], 0),
        (&["jets", "-e", "example-6.1", "--beta", "-1"], 1),
        (&["jwc", "-e", "example-6.1"], 0),
        (&["jwc", "-e", "example-4.2"], 0),
        (&["lft-test", "-e", "h-beta:1", "--time", "1"], 0),
        (&["lft-test", "-e", "example-6.2-quad", "--time", "1"], 1),
        (&["examples"], 0),
        (&["examples", "-e", "example-6.1-quad"], 0),
    ];
    for (args, expected) in cases {
        let (code, report, stderr) = ballgen(args);
        assert_eq!(code, *expected, "{args:?}: {stderr}");
        let report = report.unwrap_or_else(|| panic!("{args:?} wrote no report"));
        assert_eq!(report["passed"], Value::Bool(*expected == 0), "{args:?}");
        assert_eq!(report["command"], args[0]);
    }
}

#[test]
fn usage_errors_exit_2_without_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\"dimension\": 2,\n \"components\": [ }").unwrap();
    let negative = dir.path().join("negative.json");
    std::fs::write(&negative, r#"{"dimension": 1, "components": [{"numerator": [{"coeff": [1, 0], "exponents": [-1]}]}]}"#).unwrap();
    let broken = broken.to_str().unwrap();
    let negative = negative.to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["bogus"],
        vec!["certify"],
        vec!["certify", "-e", "example-9.9"],
        vec!["certify", "-e", "h-beta:1", "-f", negative],
        vec!["certify", "-f", broken],
        vec!["certify", "-f", negative],
        vec!["certify", "-e", "h-beta:1", "--tol", "-1"],
        vec!["certify", "-e", "h-beta:1", "--samples", "0"],
        vec!["certify", "-e", "h-beta:1", "--mode", "sideways"],
        vec!["flow", "-e", "h-beta:1", "--start", "0.1,0.2"],
        vec!["flow", "-e", "h-beta:1", "--start", "0.9,0,0.9,0"],
    ];
    for args in cases {
        let (code, report, stderr) = ballgen(&args);
        assert_eq!(code, 2, "{args:?}: {stderr}");
        assert!(report.is_none(), "{args:?}");
    }
    let (_, _, stderr) = ballgen(&["certify", "-f", broken]);
    assert!(stderr.contains("line 2"), "{stderr}");
}

#[test]
fn truncation_witness_is_recorded() {
    let (code, report, _) = ballgen(&["certify", "-e", "example-6.1-quad", "--beta", "0", "--samples", "20000", "--seed", "7"]);
    assert_eq!(code, 1);
    let cert = &report.unwrap()["payloads"][0];
    assert_eq!(cert["kind"], "cert");
    assert_eq!(cert["verdict"], "fail");
    assert!(cert["max_violation"].as_f64().unwrap() >= 4e-3);
    let w = cert["witness"].as_array().unwrap();
    let (re1, re2) = (w[0][0].as_f64().unwrap(), w[1][0].as_f64().unwrap());
    assert!(re1 > 0.5 && re2 < -0.5, "{w:?}");
}

#[test]
fn jets_report_group_verdict() {
    let (_, report, _) = ballgen(&["jets", "-e", "h-beta:1", "--beta", "-1"]);
    let jet = &report.unwrap()["payloads"][0];
    assert_eq!(jet["kind"], "jet");
    assert_eq!(jet["group_verdict"], "group");
    let (_, report, _) = ballgen(&["jets", "-e", "example-6.1", "--beta", "-1"]);
    let jet = &report.unwrap()["payloads"][0];
    assert_eq!(jet["group_verdict"], "not_group");
    assert!((jet["residuals"]["cond1"].as_f64().unwrap().abs() - 0.125).abs() < 1e-10);
}

#[test]
fn field_files_round_trip_through_the_cli() {
    let (_, report, _) = ballgen(&["examples", "-e", "h-beta:1"]);
    let description = report.unwrap()["payloads"][1].clone();
    let mut description = description.as_object().unwrap().clone();
    assert_eq!(description.remove("kind").unwrap(), "field");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h1.json");
    std::fs::write(&path, serde_json::to_string_pretty(&description).unwrap()).unwrap();
    let path = path.to_str().unwrap();
    let (from_file, file_report, _) = ballgen(&["certify", "-f", path, "--beta", "-1", "--mode", "group"]);
    let (builtin, builtin_report, _) = ballgen(&["certify", "-e", "h-beta:1", "--beta", "-1", "--mode", "group"]);
    assert_eq!((from_file, builtin), (0, 0));
    assert_eq!(file_report.unwrap()["payloads"], builtin_report.unwrap()["payloads"]);
    let (code, _, _) = ballgen(&["jets", "-f", path, "--exact"]);
    assert_eq!(code, 0);
}

#[test]
fn flow_writes_a_trajectory_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let (code, report, _) = ballgen(&["flow", "-e", "h-beta:1", "--start", "0.2,0.1,-0.3,0", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,re_z1,im_z1,re_z2,im_z2,step_error");
    let last: Vec<f64> = lines.last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((last[0] - 2.0).abs() < 1e-12);
    let summary = &report.unwrap()["payloads"][0];
    assert_eq!(summary["kind"], "flow");
    assert!(summary["semigroup_residual"].as_f64().unwrap() < 1e-6);
    assert!(summary["group_inverse"]["residual"].as_f64().unwrap() < 1e-6);
}

#[test]
fn reports_are_reproducible_across_runs_and_thread_counts() {
    let runs: &[&[&str]] = &[
        &["certify", "-e", "example-6.1-quad", "--beta", "0", "--samples", "5000"],
        &["slice", "-e", "example-6.2", "--samples", "3000"],
        &["jwc", "-e", "h-beta:1", "--seed", "3"],
        &["lft-test", "-e", "example-6.2-quad", "--time", "1"],
    ];
    for args in runs {
        let (_, a, _) = ballgen(args);
        let (_, b, _) = ballgen(args);
        let (_, c, _) = ballgen_with_env(args, &[("BALLGEN_THREADS", "1")]);
        let a = without_clock(a.unwrap());
        assert_eq!(a, without_clock(b.unwrap()), "{args:?}");
        assert_eq!(a, without_clock(c.unwrap()), "{args:?}");
    }
    let (code, _, _) = ballgen_with_env(&["examples"], &[("BALLGEN_THREADS", "zero")]);
    assert_eq!(code, 2);
}

#[test]
fn verify_paper_passes() {
    let (code, report, stderr) = ballgen(&["verify-paper"]);
    assert_eq!(code, 0, "{stderr}");
    let payloads = report.unwrap()["payloads"].as_array().unwrap().clone();
    assert_eq!(payloads.len(), 11);
    assert!(payloads.iter().all(|p| p["passed"] == Value::Bool(true)));
    assert!(stderr.contains("11/11 criteria passed"));
}

#[test]
fn report_goes_to_stdout_without_output_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_ballgen")).args(["examples"]).output().unwrap();
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["tool_version"], env!("CARGO_PKG_VERSION"));
    assert!(Path::new(env!("CARGO_BIN_EXE_ballgen")).exists());
}
