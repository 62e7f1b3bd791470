//! End-to-end tests of the binary: exit codes, file outputs, determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_delayfield");

fn hopf_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("hopf.json");
    fs::write(
        &path,
        r#"{
  "alpha": 1.0,
  "tau0": 1.0,
  "r": 4.220214885988226,
  "terms": [
    {"c_hat": [3.0], "mu": [0.5]},
    {"c_hat": [-5.5], "mu": [1.0]}
  ]
}"#,
    )
    .unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

#[test]
fn malformed_config_exits_2_and_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"tau0": 1.0, "r": 4.0, "terms": []}"#).unwrap();
    let out = run(&[
        "spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("alpha"), "diagnostic should name the missing key: {err}");
}

#[test]
fn unknown_flag_exits_2() {
    let out = run(&["spectrum", "--does-not-exist"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spectrum_finds_critical_pair_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = hopf_config(dir.path());
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let res = run(&[
            "spectrum",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--region",
            "-0.5,0.5,-3,3",
            "--seeds",
            "10,10",
            "--grid",
            "2001",
        ]);
        assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    }
    let csv_a = fs::read_to_string(out_a.join("spectrum.csv")).unwrap();
    let csv_b = fs::read_to_string(out_b.join("spectrum.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "re-runs must be byte-identical");
    let sum_a = fs::read_to_string(out_a.join("spectrum_summary.json")).unwrap();
    let sum_b = fs::read_to_string(out_b.join("spectrum_summary.json")).unwrap();
    assert_eq!(sum_a, sum_b);
    assert!(csv_a.contains("1.6440031020468")); // the critical pair
    assert!(csv_a.lines().any(|l| l.contains("ACCEPTED")));
    // config echo written and reparseable
    let echo: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_a.join("config_echo.json")).unwrap()).unwrap();
    assert_eq!(echo["command"], "spectrum");
    assert_eq!(echo["model"]["alpha"], 1.0);
}

#[test]
fn hopf_with_injected_gamma_reports_supercritical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = hopf_config(dir.path());
    let res = run(&[
        "hopf",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--grid",
        "2001",
        "--gamma",
        "-0.191821747840362,-0.172140605861736;-0.080160108888561,0",
    ]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("SUPERCRITICAL"), "{stdout}");
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("hopf.json")).unwrap()).unwrap();
    assert!(doc["l1"].as_f64().unwrap() < 0.0);
    assert_eq!(doc["verdict"], "SUPERCRITICAL");
    assert!(doc["fit_residual"].as_f64().unwrap() < 1e-4);
}

#[test]
fn resolvent_check_at_eigenvalue_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = hopf_config(dir.path());
    let ok = run(&[
        "resolvent-check",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--grid",
        "801",
        "--z",
        "1.0,0.0",
    ]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let csv = fs::read_to_string(dir.path().join("resolvent_residual.csv")).unwrap();
    assert!(csv.starts_with("x,re_residual,im_residual\n"));

    let at_eig = run(&[
        "resolvent-check",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--grid",
        "801",
        "--z",
        "0.0,1.644003102046893",
    ]);
    assert_eq!(at_eig.status.code(), Some(4), "resolvent at an eigenvalue must be rejected");
}

#[test]
fn simulate_writes_trajectory_and_rejects_step_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = hopf_config(dir.path());
    let res = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--m",
        "10",
        "--t-end",
        "30",
        "--history",
        "const:0.01",
        "--window",
        "8",
    ]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,V0,V1"));
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("trajectory_meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["m"], 10);
    assert_eq!(meta["history"], "const:0.01");

    // tau0 = 0.07 cannot be hit by dt = delta / dt_div
    let bad = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--tau0",
        "0.07",
        "--m",
        "10",
        "--t-end",
        "5",
    ]);
    assert_eq!(bad.status.code(), Some(4));

    // odd mesh is a precondition rejection
    let odd = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--m",
        "11",
        "--t-end",
        "5",
    ]);
    assert_eq!(odd.status.code(), Some(4));
}

#[test]
fn eigfun_emits_profile() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = hopf_config(dir.path());
    let res = run(&[
        "eigfun",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--grid",
        "401",
        "--lambda",
        "0.0,1.6",
    ]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = fs::read_to_string(dir.path().join("eigfun.csv")).unwrap();
    assert!(csv.starts_with("x,re_q,im_q,abs_q,arg_q\n"));
    assert_eq!(csv.trim().lines().count(), 402);
}

#[test]
fn discrete_spectrum_emits_roots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = hopf_config(dir.path());
    let res = run(&[
        "discrete-spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--m",
        "20",
        "--region",
        "-0.5,0.3,0.5,3",
        "--seeds",
        "5,6",
    ]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = fs::read_to_string(dir.path().join("discrete_spectrum.csv")).unwrap();
    assert!(csv.starts_with("re_lambda,im_lambda\n"));
    assert!(csv.trim().lines().count() > 1);
}

#[test]
fn parameter_overrides_shadow_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = hopf_config(dir.path());
    // with r = 6 the critical pair moves off the imaginary axis, so the
    // hopf command must reject the precondition (no axis pair)
    let res = run(&[
        "hopf",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--grid",
        "801",
        "--r",
        "6.0",
    ]);
    assert_eq!(res.status.code(), Some(4), "{}", String::from_utf8_lossy(&res.stderr));
    // and the echo records the override
    let echo: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("config_echo.json")).unwrap())
            .unwrap();
    assert_eq!(echo["model"]["r"], 6.0);
}
