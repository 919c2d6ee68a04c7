//! End-to-end runs of the `vwp` binary: simulate, fit, summarize.

use std::path::Path;
use std::process::{Command, Output};

fn vwp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vwp"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn tiny_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(
        &path,
        r#"{
  "dgp": {"n": 50, "d": 6, "theta0_grid": [0.0, 0.5], "seed": 7, "reps": 2,
           "beta0": [[0, -0.4], [1, 0.8]], "gamma0": [[0, 0.3], [1, -0.5]]},
  "chain": {"iterations": 60, "burn_in": 10, "thin": 1, "seed": 7},
  "methods": ["cb", "oracle"],
  "output": {"format": "both"}
}"#,
    )
    .unwrap();
    path
}

/// Strip the wall-clock column; everything else must be bit-identical
/// between runs with the same seed.
fn strip_wall(report: &str) -> String {
    report
        .lines()
        .map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            let mut kept: Vec<&str> = fields[..10.min(fields.len())].to_vec();
            if fields.len() == 12 {
                kept.push(fields[11]);
            }
            kept.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn simulate_writes_reports_and_manifest_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny_config(dir.path());
    let out1 = dir.path().join("run1");
    let out2 = dir.path().join("run2");
    run_ok(vwp().args([
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out1.to_str().unwrap(),
    ]));
    run_ok(vwp().args([
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out2.to_str().unwrap(),
    ]));

    let report1 = std::fs::read_to_string(out1.join("report.csv")).unwrap();
    let report2 = std::fs::read_to_string(out2.join("report.csv")).unwrap();
    assert_eq!(strip_wall(&report1), strip_wall(&report2));

    // 2 theta0 values x 2 methods = 4 data rows
    assert_eq!(report1.lines().count(), 5);
    assert!(report1.starts_with("method,theta0,n,d,coverage,mc_se,length,bias,reps,failures,wall_ms"));
    assert!(out1.join("report.jsonl").exists());

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out1.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["seed"], 7);
    assert!(manifest["config_digest"].as_str().unwrap().len() == 64);
}

#[test]
fn simulate_rejects_unknown_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(
        &config,
        r#"{"dgp": {"n": 50, "d": 6, "mystery": 1}}"#,
    )
    .unwrap();
    let out = vwp()
        .args([
            "simulate",
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.path().join("out").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("mystery"), "stderr: {stderr}");
}

fn synthetic_csv(path: &Path, n: usize) -> std::io::Result<()> {
    // deterministic pseudo-data: binary outcome/treatment plus two numeric
    // and one categorical nuisance column
    let mut text = String::from("outcome,treat,age,bp,site\n");
    for i in 0..n {
        let age = (i % 37) as f64 / 3.0;
        let bp = ((i * 13) % 29) as f64 - 14.0;
        let site = ["a", "b", "c"][i % 3];
        let treat = ((i * 7) % 10 < 5) as u8;
        let outcome = ((i * 11 + treat as usize * 3) % 10 < 5) as u8;
        text.push_str(&format!("{outcome},{treat},{age},{bp},{site}\n"));
    }
    std::fs::write(path, text)
}

#[test]
fn fit_then_summarize_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    synthetic_csv(&data, 80).unwrap();
    let out = dir.path().join("fit_out");
    let fit_out = run_ok(vwp().args([
        "fit",
        "--data",
        data.to_str().unwrap(),
        "--treatment",
        "treat",
        "--outcome",
        "outcome",
        "--categorical",
        "site",
        "--iterations",
        "200",
        "--burn-in",
        "50",
        "--seed",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]));
    let stdout = String::from_utf8_lossy(&fit_out.stdout);
    assert!(stdout.contains("theta[0]"), "stdout: {stdout}");
    assert!(out.join("draws.bin").exists());
    assert!(out.join("fit.json").exists());
    assert!(out.join("manifest.json").exists());

    // the summarize subcommand recovers the same interval from the file
    let fit_record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("fit.json")).unwrap()).unwrap();
    let sum_out = run_ok(vwp().args([
        "summarize",
        "--draws",
        out.join("draws.bin").to_str().unwrap(),
    ]));
    let text = String::from_utf8_lossy(&sum_out.stdout);
    let point = fit_record[0]["point"].as_f64().unwrap();
    assert!(
        text.contains(&format!("point={point:.4}")),
        "summarize output {text} vs fit point {point}"
    );
}

#[test]
fn fit_reports_parse_location_on_bad_data() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    std::fs::write(&data, "outcome,treat,a\n1,0,xyz\n0,1,2.0\n").unwrap();
    let out = vwp()
        .args([
            "fit",
            "--data",
            data.to_str().unwrap(),
            "--treatment",
            "treat",
            "--outcome",
            "outcome",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("row 2") && stderr.contains("'a'"), "stderr: {stderr}");
}
