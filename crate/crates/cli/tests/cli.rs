//! End-to-end tests of the `sirnc` binary: exit codes, file shapes, config
//! diagnostics, and reproducibility of the written artifacts.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

const BASE_CONFIG: &str = r#"{
    "params": {"b": 0.01, "delta": 0.01, "beta": 0.4, "gamma": 0.2,
               "eta_bar": 0.1, "xi": 0.0, "mu_bar": 0.1, "nu_bar": 0.1},
    "weights": {"c1": 1.0, "c2": 0.1, "c3": 1.0, "c4": 1.0, "c5": 1.0, "c6": 1.0},
    "x0": {"S": 0.69, "I": 0.01, "R": 0.0, "S_star": 0.29, "I_star": 0.01, "R_star": 0.0}
}"#;

const CSV_HEADER: &str = "t,S,I,R,S_star,I_star,R_star,alpha,eta,mu,nu,\
                          p_S,p_I,p_R,p_Sstar,p_Istar,p_Rstar,r0_regime";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sirnc"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn help_and_version_exit_zero() {
    for args in [
        &["--help"][..],
        &["--version"][..],
        &["simulate", "--help"][..],
        &["optimize", "--help"][..],
        &["analyze", "--help"][..],
        &["scenario", "--help"][..],
        &["sweep", "--help"][..],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(0), "{args:?} exited nonzero");
    }
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", BASE_CONFIG);
    let out_csv = dir.path().join("out.csv");
    let out_csv = out_csv.to_str().unwrap();
    let outdir = dir.path().join("runs");
    let outdir = outdir.to_str().unwrap();

    let cases: Vec<Vec<&str>> = vec![
        vec![],                                                   // no subcommand
        vec!["frobnicate"],                                       // unknown subcommand
        vec!["simulate", "--config", &cfg],                       // missing --output
        vec!["simulate", "--config", &cfg, "--output", out_csv, "--warp", "9"],
        vec!["scenario", "S9", "--outdir", outdir],               // unknown scenario
        vec!["sweep", "S1", "c9", "1,2", "--outdir", outdir],     // unknown knob
        vec!["sweep", "S1", "c1", "1,spam", "--outdir", outdir],  // bad value list
        vec!["analyze", "--config", &cfg, "--dfe", "bogus"],      // bad filter
    ];
    for args in cases {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", stderr_of(&out));
    }
}

#[test]
fn config_errors_exit_one_and_name_the_field() {
    let dir = tempdir().unwrap();
    let out_csv = dir.path().join("out.csv");
    let out_csv = out_csv.to_str().unwrap();

    let missing = dir.path().join("nope.json");
    let out = run(&["simulate", "--config", missing.to_str().unwrap(), "--output", out_csv]);
    assert_eq!(out.status.code(), Some(1));

    let bad = BASE_CONFIG.replace("\"beta\": 0.4", "\"beta\": \"fast\"");
    let cfg = write_config(dir.path(), "bad.json", &bad);
    let out = run(&["simulate", "--config", &cfg, "--output", out_csv]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr_of(&out).contains("params.beta"),
        "diagnostic lacks the field path: {}",
        stderr_of(&out)
    );
}

#[test]
fn simulate_writes_one_row_per_node_with_blank_adjoint_columns() {
    let dir = tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", BASE_CONFIG);
    let out_csv = dir.path().join("traj.csv");

    let out = run(&["simulate", "--config", &cfg, "--output", out_csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));

    let text = fs::read_to_string(&out_csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER.replace(char::is_whitespace, ""));
    assert_eq!(lines.len(), 1 + 1001, "header plus one row per grid node");
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 18);
        for adjoint in &fields[11..17] {
            assert!(adjoint.is_empty(), "simulate should leave adjoints blank: {line}");
        }
    }
}

#[test]
fn simulate_started_at_an_equilibrium_stays_constant() {
    let dir = tempdir().unwrap();
    // b/delta = 1 and everyone compliant: the all-compliant equilibrium.
    let cfg_body = BASE_CONFIG.replace(
        r#""x0": {"S": 0.69, "I": 0.01, "R": 0.0, "S_star": 0.29, "I_star": 0.01, "R_star": 0.0}"#,
        r#""x0": {"S": 1.0, "I": 0.0, "R": 0.0, "S_star": 0.0, "I_star": 0.0, "R_star": 0.0}"#,
    );
    let cfg = write_config(dir.path(), "dfe.json", &cfg_body);
    let out_csv = dir.path().join("traj.csv");

    let out = run(&["simulate", "--config", &cfg, "--output", out_csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));

    let text = fs::read_to_string(&out_csv).unwrap();
    let mut rows = text.lines().skip(1).map(|l| l.split_once(',').unwrap().1);
    let first = rows.next().unwrap();
    for (k, row) in rows.enumerate() {
        assert_eq!(row, first, "state drifted from the equilibrium at row {k}");
    }
}

#[test]
fn control_overrides_land_in_the_dumped_config() {
    let dir = tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", BASE_CONFIG);
    let out_csv = dir.path().join("traj.csv");
    let dump1 = dir.path().join("effective1.json");
    let dump2 = dir.path().join("effective2.json");

    let out = run(&[
        "simulate",
        "--config", &cfg,
        "--output", out_csv.to_str().unwrap(),
        "--alpha", "0.5",
        "--nu", "0.025",
        "--dump-config", dump1.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));

    let dumped: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&dump1).unwrap()).unwrap();
    assert_eq!(dumped["control"]["alpha"], 0.5);
    assert_eq!(dumped["control"]["nu"], 0.025);
    assert_eq!(dumped["grid"]["t_final"], 100.0);

    // The dumped file must itself be a loadable config that round-trips.
    let out = run(&[
        "analyze",
        "--config", dump1.to_str().unwrap(),
        "--dump-config", dump2.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    assert_eq!(fs::read(&dump1).unwrap(), fs::read(&dump2).unwrap());
}

#[test]
fn analyze_reports_both_equilibria_for_the_baseline_parameters() {
    let dir = tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", BASE_CONFIG);
    let report_path = dir.path().join("report.json");

    let out = run(&["analyze", "--config", &cfg, "--output", report_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));

    let reports: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 2);

    let kind_of = |r: &serde_json::Value| r["dfe"]["kind"].as_str().unwrap().to_string();
    assert_eq!(kind_of(&reports[0]), "ComplianceOnly");
    assert_eq!(kind_of(&reports[1]), "MixedXiZero");
    for r in reports {
        let r0 = r["r0"].as_f64().unwrap();
        assert!((r0 - 40.0 / 21.0).abs() < 1e-12, "r0 = {r0}");
    }
    // The mixed point's verdict is covered by the theorem; the all-compliant
    // point is outside its hypotheses once the mixed equilibrium exists.
    assert!(reports[0]["stability"].is_null());
    assert_eq!(reports[1]["stability"]["classification"], "Unstable");

    // Filtering to one kind yields a singleton report.
    let out = run(&["analyze", "--config", &cfg, "--dfe", "mixed"]);
    assert_eq!(out.status.code(), Some(0));
    let filtered: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert_eq!(filtered.as_array().unwrap().len(), 1);
}

#[test]
fn strict_mode_turns_an_iteration_cap_hit_into_exit_two() {
    let dir = tempdir().unwrap();
    let capped = BASE_CONFIG.replace(
        "\"x0\":",
        "\"fbs\": {\"kappa\": 0.8, \"tol\": 1e-12, \"max_iter\": 2},\n    \"x0\":",
    );
    let cfg = write_config(dir.path(), "capped.json", &capped);
    let out_csv = dir.path().join("traj.csv");
    let summary = dir.path().join("summary.json");

    let strict = run(&[
        "optimize",
        "--config", &cfg,
        "--output", out_csv.to_str().unwrap(),
        "--summary", summary.to_str().unwrap(),
        "--strict",
    ]);
    assert_eq!(strict.status.code(), Some(2), "{}", stderr_of(&strict));

    // Outputs are still written for inspection, and the lenient run agrees.
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(report["converged"], false);
    assert_eq!(report["iterations"], 2);

    let lenient = run(&[
        "optimize",
        "--config", &cfg,
        "--output", out_csv.to_str().unwrap(),
        "--summary", summary.to_str().unwrap(),
    ]);
    assert_eq!(lenient.status.code(), Some(0), "{}", stderr_of(&lenient));
}

#[test]
fn integration_blowup_exits_two() {
    let dir = tempdir().unwrap();
    // A 1e7 Euler step drives compartments far negative immediately.
    let wild = BASE_CONFIG.replace(
        "\"x0\":",
        "\"grid\": {\"t_final\": 1e8, \"dt\": 1e7},\n    \"x0\":",
    );
    let cfg = write_config(dir.path(), "wild.json", &wild);
    let out_csv = dir.path().join("traj.csv");

    let out = run(&["simulate", "--config", &cfg, "--output", out_csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr_of(&out));
}

#[test]
fn optimize_fills_adjoint_columns_and_reports_a_cost_drop() {
    let dir = tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", BASE_CONFIG);
    let out_csv = dir.path().join("traj.csv");
    let summary = dir.path().join("summary.json");

    let out = run(&[
        "optimize",
        "--config", &cfg,
        "--output", out_csv.to_str().unwrap(),
        "--summary", summary.to_str().unwrap(),
        "--strict",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(report["converged"], true);
    let j0 = report["cost_uncontrolled"].as_f64().unwrap();
    let j = report["cost_optimal"].as_f64().unwrap();
    assert!(j < j0, "optimal cost {j} not below uncontrolled {j0}");

    let text = fs::read_to_string(&out_csv).unwrap();
    let last = text.lines().last().unwrap();
    let fields: Vec<&str> = last.split(',').collect();
    // Terminal adjoint values are exactly zero by the boundary condition.
    for adjoint in &fields[11..17] {
        assert_eq!(adjoint.parse::<f64>().unwrap(), 0.0, "terminal adjoint row: {last}");
    }
    // Interior rows carry nonblank adjoints.
    let mid = text.lines().nth(500).unwrap();
    assert!(mid.split(',').nth(12).unwrap().parse::<f64>().unwrap() != 0.0);
}

#[test]
fn masked_channels_stay_silent_in_the_output() {
    let dir = tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", BASE_CONFIG);
    let out_csv = dir.path().join("traj.csv");
    let summary = dir.path().join("summary.json");

    let out = run(&[
        "optimize",
        "--config", &cfg,
        "--output", out_csv.to_str().unwrap(),
        "--summary", summary.to_str().unwrap(),
        "--mask-eta",
        "--mask-nu",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));

    let text = fs::read_to_string(&out_csv).unwrap();
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[8].parse::<f64>().unwrap(), 0.0, "eta not pinned: {line}");
        assert_eq!(fields[10].parse::<f64>().unwrap(), 0.0, "nu not pinned: {line}");
    }
}

#[test]
fn scenario_writes_trajectory_and_summary_files() {
    let dir = tempdir().unwrap();
    let outdir = dir.path().join("runs");

    let out = run(&["scenario", "S1", "--outdir", outdir.to_str().unwrap(), "--strict"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));

    let csv = fs::read_to_string(outdir.join("S1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 1001);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(outdir.join("S1.json")).unwrap()).unwrap();
    assert_eq!(summary["label"], "S1");
    assert_eq!(summary["converged"], true);
}

#[test]
fn sweep_writes_per_value_files_and_an_aggregate() {
    let dir = tempdir().unwrap();
    let outdir = dir.path().join("runs");

    let out = run(&[
        "sweep", "S1", "c1", "0.5,1",
        "--outdir", outdir.to_str().unwrap(),
        "--jobs", "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));

    assert!(outdir.join("S1_c1_00.csv").exists());
    assert!(outdir.join("S1_c1_01.csv").exists());
    let agg: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(outdir.join("S1_c1_sweep.json")).unwrap())
            .unwrap();
    assert_eq!(agg["knob"], "c1");
    assert_eq!(agg["values"].as_array().unwrap().len(), 2);
    assert_eq!(agg["runs"].as_array().unwrap().len(), 2);
    assert_eq!(agg["runs"][1]["label"], "S1 c1=1");
}
