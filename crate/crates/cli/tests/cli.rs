//! End-to-end tests of the binary: determinism, config precedence, exit
//! codes and artifact shapes.

use std::path::PathBuf;
use std::process::Command;
use std::sync::atomic::{AtomicU32, Ordering};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symoverlap"))
}

fn scratch_dir(tag: &str) -> PathBuf {
    static COUNTER: AtomicU32 = AtomicU32::new(0);
    let dir = std::env::temp_dir().join(format!(
        "symoverlap-test-{}-{}-{}",
        std::process::id(),
        tag,
        COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn ho_demo_is_deterministic_and_well_formed() {
    let dir = scratch_dir("hodemo");
    let out1 = dir.join("a.csv");
    let out2 = dir.join("b.csv");
    for out in [&out1, &out2] {
        let status = bin()
            .args(["ho-demo", "--theta-steps", "16", "--r", "0.5"])
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "reruns must be byte-identical");
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "theta,e_n,d_sym,d_c,d_t,verdict");
    assert_eq!(lines.count(), 16);
    // theta endpoints excluded: first point is pi/17
    let first = text.lines().nth(1).unwrap();
    let theta: f64 = first.split(',').next().unwrap().parse().unwrap();
    assert!((theta - std::f64::consts::PI / 17.0).abs() < 1e-15);
    // the verdict column is consistent with the negativity column
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let e_n: f64 = cols[1].parse().unwrap();
        match cols[5] {
            "entangled" => assert!(e_n > 0.0),
            "separable" | "not_applicable" => assert_eq!(e_n, 0.0),
            other => panic!("unexpected verdict {other}"),
        }
    }
}

#[test]
fn config_file_flags_and_env_precedence() {
    let dir = scratch_dir("config");
    let cfg = dir.join("run.toml");
    std::fs::write(
        &cfg,
        "[ho-demo]\nr = 1.0\ntheta-steps = 5\n\n[quad]\nrel-tol = 1e-9\n",
    )
    .unwrap();
    // config file alone drives the grid
    let out = dir.join("from-config.csv");
    let status = bin()
        .arg("--config")
        .arg(&cfg)
        .args(["ho-demo", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let rows = std::fs::read_to_string(&out).unwrap().lines().count() - 1;
    assert_eq!(rows, 5);
    // an environment variable overrides the file
    let out_env = dir.join("from-env.csv");
    let status = bin()
        .arg("--config")
        .arg(&cfg)
        .env("SYMOVERLAP_THETA_STEPS", "4")
        .args(["ho-demo", "--out"])
        .arg(&out_env)
        .status()
        .unwrap();
    assert!(status.success());
    let rows = std::fs::read_to_string(&out_env).unwrap().lines().count() - 1;
    assert_eq!(rows, 4);
    // a flag beats both
    let out_flag = dir.join("from-flag.csv");
    let status = bin()
        .arg("--config")
        .arg(&cfg)
        .env("SYMOVERLAP_THETA_STEPS", "4")
        .args(["ho-demo", "--theta-steps", "3", "--out"])
        .arg(&out_flag)
        .status()
        .unwrap();
    assert!(status.success());
    let rows = std::fs::read_to_string(&out_flag).unwrap().lines().count() - 1;
    assert_eq!(rows, 3);
}

#[test]
fn random_check_writes_deterministic_report() {
    let dir = scratch_dir("randomcheck");
    let out1 = dir.join("r1.json");
    let out2 = dir.join("r2.json");
    for out in [&out1, &out2] {
        let status = bin()
            .args([
                "random-check",
                "--n-trials",
                "3000",
                "--seed",
                "11",
                "--jobs",
                "2",
            ])
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success(), "zero disagreements expected");
    }
    assert_eq!(std::fs::read(&out1).unwrap(), std::fs::read(&out2).unwrap());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out1).unwrap()).unwrap();
    assert_eq!(report["n_trials"], 3000);
    assert_eq!(report["n_disagreements"], 0);
    let total = report["n_entangled"].as_u64().unwrap()
        + report["n_separable"].as_u64().unwrap()
        + report["n_boundary"].as_u64().unwrap()
        + report["n_not_applicable"].as_u64().unwrap();
    assert_eq!(total, 3000);
}

#[test]
fn scan_writes_csv_and_diagnostics_sidecar() {
    let dir = scratch_dir("scan");
    let out = dir.join("sep.csv");
    let status = bin()
        .args([
            "ball-shell",
            "scan-separation",
            "--steps",
            "4",
            "--from",
            "0.0",
            "--to",
            "0.03",
            "--jobs",
            "2",
        ])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("rb_minus_ra,d_sym,d_c,d_t,w_delta,w_dt,log_negativity,verdict\n"));
    assert_eq!(text.lines().count(), 5);
    let diag: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("sep.json")).unwrap()).unwrap();
    assert!(diag["k_max"].as_f64().unwrap() > 100.0);
    assert_eq!(diag["point_failures"].as_array().unwrap().len(), 0);
}

#[test]
fn invalid_geometry_exits_nonzero() {
    let dir = scratch_dir("invalid");
    let status = bin()
        .args([
            "ball-shell",
            "scan-width",
            "--from",
            "0.0",
            "--to",
            "1.0",
            "--steps",
            "3",
        ])
        .arg("--out")
        .arg(dir.join("w.csv"))
        .status()
        .unwrap();
    assert!(!status.success());
}
