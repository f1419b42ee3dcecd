//! End-to-end CLI tests: file handling, exit codes, output schemas and
//! rerun determinism.

use std::path::Path;
use std::process::Command;

fn udn() -> Command {
    Command::new(env!("CARGO_BIN_EXE_udn"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

fn scenario_small(dir: &Path) -> std::path::PathBuf {
    let p = dir.join("scenario.json");
    write(
        &p,
        r#"{
  "tiers": [
    { "density_per_km2": 200.0 },
    { "density_per_km2": 800.0 }
  ],
  "comp": { "scheme": "rrlp", "eta_db": -4.0 },
  "sim": { "window_radius_m": 300.0, "trials": 3000, "seed": 9 }
}"#,
    );
    p
}

#[test]
fn coverage_produces_csv_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = scenario_small(tmp.path());
    let out = tmp.path().join("out");
    let status = udn()
        .args(["coverage", "--scenario"])
        .arg(&scenario)
        .args(["--gammas-db", "-5,0,5", "--workers", "2", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(out.join("coverage.csv")).unwrap();
    assert!(text.starts_with("axis_value,scheme,path,value,ci_lo,ci_hi\n"));
    assert_eq!(text.lines().count(), 4, "{text}");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 9);
    assert!(manifest["code_version"].is_string());
}

#[test]
fn rerun_is_byte_identical_across_worker_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = scenario_small(tmp.path());
    let mut outputs = Vec::new();
    for (i, workers) in ["1", "4", "16"].iter().enumerate() {
        let out = tmp.path().join(format!("out{i}"));
        let status = udn()
            .args(["ase", "--scenario"])
            .arg(&scenario)
            .args(["--gammas-db", "0", "--workers", workers, "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(out.join("tx_ase.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    // malformed JSON
    let bad = tmp.path().join("bad.json");
    write(&bad, "{\"tiers\": [");
    let status = udn()
        .args(["coverage", "--scenario"])
        .arg(&bad)
        .args(["--out"])
        .arg(tmp.path().join("o1"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    // invariant violation: m_los < m_nlos
    let invalid = tmp.path().join("invalid.json");
    write(
        &invalid,
        r#"{"tiers":[{"density_per_km2":100.0}],
            "channel":{"alpha_los":2.5,"alpha_nlos":3.5,"m_los":1,"m_nlos":5}}"#,
    );
    let status = udn()
        .args(["coverage", "--scenario"])
        .arg(&invalid)
        .args(["--out"])
        .arg(tmp.path().join("o2"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    // missing file
    let status = udn()
        .args(["coverage", "--scenario"])
        .arg(tmp.path().join("nope.json"))
        .args(["--out"])
        .arg(tmp.path().join("o3"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn dump_realization_schema() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = scenario_small(tmp.path());
    let out = tmp.path().join("points.csv");
    let status = udn()
        .args(["dump-realization", "--scenario"])
        .arg(&scenario)
        .args(["--radius-m", "200", "--trial", "3", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("tier,y_m,x_m,link_class"));
    let first = lines.next().expect("at least one point at this density");
    let fields: Vec<&str> = first.split(',').collect();
    assert_eq!(fields.len(), 4);
    assert!(fields[3] == "los" || fields[3] == "nlos");
    // link distance exceeds horizontal distance
    let y: f64 = fields[1].parse().unwrap();
    let x: f64 = fields[2].parse().unwrap();
    assert!(x >= y);
}

#[test]
fn calibrate_eta_emits_table() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = scenario_small(tmp.path());
    let out = tmp.path().join("cal");
    let status = udn()
        .args(["calibrate-eta", "--scenario"])
        .arg(&scenario)
        .args(["--densities-per-km2", "100,1000", "--targets", "2", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(out.join("eta_table.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lambda_b,target_N,eta_db"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 3);
    let lam: f64 = row[0].parse().unwrap();
    assert!((lam - 1e-4).abs() < 1e-12, "density emitted per m2");
    let eta_db: f64 = row[2].parse().unwrap();
    assert!(eta_db < 0.0);
}

#[test]
fn sweep_runs_grid_and_records_status() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = scenario_small(tmp.path());
    let sweep = tmp.path().join("sweep.json");
    write(
        &sweep,
        r#"{
  "axis": "total_density",
  "grid": [500.0, 1000.0],
  "schemes": [
    { "scheme": "rrlp", "target_n_avg": 2.0 },
    { "scheme": "no_comp" }
  ],
  "paths": "mc",
  "gammas_db": [0.0]
}"#,
    );
    let out = tmp.path().join("sweep_out");
    let status = udn()
        .args(["sweep", "--scenario"])
        .arg(&scenario)
        .args(["--trials", "2000", "--workers", "2", "--sweep"])
        .arg(&sweep)
        .args(["--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    for metric in ["coverage", "tx_ase", "rx_ase", "tx_nee", "rx_nee", "mean_comp_size"] {
        let text = std::fs::read_to_string(out.join(format!("{metric}.csv"))).unwrap();
        // 2 grid points x 2 schemes (+ header)
        assert_eq!(text.lines().count(), 5, "{metric}: {text}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let status_arr = manifest["per_point_status"].as_array().unwrap();
    assert_eq!(status_arr.len(), 2);
    assert!(status_arr.iter().all(|s| s["status"] == "ok"));
    // the no-comp scheme pins mean size to one
    let text = std::fs::read_to_string(out.join("mean_comp_size.csv")).unwrap();
    for line in text.lines().skip(1).filter(|l| l.contains("no_comp")) {
        let v: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(v, 1.0);
    }
}

#[test]
fn validate_reports_config_rejection_as_content() {
    let tmp = tempfile::tempdir().unwrap();
    let invalid = tmp.path().join("invalid.json");
    write(
        &invalid,
        r#"{"tiers":[{"density_per_km2":100.0}],
            "channel":{"alpha_los":2.5,"alpha_nlos":3.5,"m_los":1,"m_nlos":5}}"#,
    );
    let out = tmp.path().join("v");
    let output = udn()
        .args(["validate", "--scenario"])
        .arg(&invalid)
        .args(["--level", "fast", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    // failures are report content with the acceptance exit code
    assert_eq!(output.status.code(), Some(4));
    let verdicts: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("verdicts.json")).unwrap()).unwrap();
    let arr = verdicts.as_array().unwrap();
    assert_eq!(arr.len(), 1);
    assert_eq!(arr[0]["passed"], false);
    let detail = arr[0]["details"][0].as_str().unwrap();
    assert!(detail.contains("config rejection"), "{detail}");
}
