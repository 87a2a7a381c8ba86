//! End-to-end tests of the `pcfec` binary: exit codes, config merging,
//! resolved-config echoes, and byte-identical reruns.

use std::path::Path;
use std::process::{Command, Output};

fn pcfec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcfec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name))
        .unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[test]
fn simulate_is_byte_identical_across_reruns_and_worker_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (label, workers) in [("a", "1"), ("b", "4"), ("c", "16"), ("d", "4")] {
        let out = tmp.path().join(label);
        let status = pcfec(&[
            "simulate",
            "--v",
            "5",
            "--t",
            "2",
            "--s",
            "0",
            "--ebn0",
            "3.0",
            "--min-errors",
            "10",
            "--max-frames",
            "32",
            "--seed",
            "7",
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(
            status.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&status.stderr)
        );
        outputs.push((
            read(&out, "sim.csv"),
            read(&out, "manifest.json"),
            read(&out, "resolved_config.json"),
        ));
    }
    // Worker count and rerun must not change a single output byte.
    for other in &outputs[1..] {
        assert_eq!(outputs[0], *other);
    }
    // The CSV header carries the digest of the resolved config echo.
    let (csv, manifest, resolved) = &outputs[0];
    let sha = sha256_hex(resolved.as_bytes());
    let header = csv.lines().next().unwrap();
    assert_eq!(header, format!("# pcfec-sim/v1 config_sha256={sha}"));
    assert!(csv.lines().nth(1).unwrap().starts_with("ebn0_db,sigma,decoder,"));
    let m: serde_json::Value = serde_json::from_str(manifest).unwrap();
    assert_eq!(m["config_sha256"], serde_json::json!(sha));
    assert_eq!(m["rng"], serde_json::json!("splitmix64-counter/v1"));
    assert_eq!(m["points"][0]["frames"], serde_json::json!(32));
}

#[test]
fn flag_overrides_match_equivalent_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let by_flags = tmp.path().join("flags");
    let by_file = tmp.path().join("file");
    let config = tmp.path().join("floor.json");
    std::fs::write(
        &config,
        r#"{"v": 4, "t": 1, "s": 0, "p_grid": [0.01, 0.005]}"#,
    )
    .unwrap();
    assert!(pcfec(&[
        "floor",
        "--v",
        "4",
        "--t",
        "1",
        "--p",
        "0.01,0.005",
        "--out",
        by_flags.to_str().unwrap(),
    ])
    .status
    .success());
    assert!(pcfec(&[
        "floor",
        "--config",
        config.to_str().unwrap(),
        "--out",
        by_file.to_str().unwrap(),
    ])
    .status
    .success());
    assert_eq!(
        read(&by_flags, "resolved_config.json"),
        read(&by_file, "resolved_config.json")
    );
    let csv = read(&by_flags, "floor.csv");
    assert_eq!(csv, read(&by_file, "floor.csv"));
    // (15, 11) with t = 1: the floor is 196 p^4 exactly.
    assert!(csv.starts_with("# pcfec-floor/v1 config_sha256="));
    let mut rows = csv.lines().skip(2);
    for (p, expect) in [(0.01f64, 196e-8), (0.005f64, 196.0 * 0.005f64.powi(4))] {
        let row = rows.next().unwrap();
        let mut fields = row.split(',');
        assert_eq!(fields.next().unwrap().parse::<f64>().unwrap(), p);
        let floor: f64 = fields.next().unwrap().parse().unwrap();
        assert!((floor / expect - 1.0).abs() < 1e-9, "{row}");
    }
}

#[test]
fn threshold_reports_calibrated_values() {
    let tmp = tempfile::tempdir().unwrap();
    let out = pcfec(&[
        "threshold",
        "--v",
        "9",
        "--t",
        "3",
        "--s",
        "0",
        "--decoders",
        "ibdd-sr,ibdd",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "threshold.json")).unwrap();
    assert_eq!(v["format"], serde_json::json!("pcfec-threshold/v1"));
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    let sr = &results[0];
    let ibdd = &results[1];
    assert_eq!(sr["decoder"], serde_json::json!("ibdd-sr"));
    assert!((sr["threshold_p"].as_f64().unwrap() - 1.3039e-2).abs() < 2e-4);
    assert!((sr["threshold_ebn0_db"].as_f64().unwrap() - 4.408).abs() < 0.03);
    assert!((ibdd["threshold_p"].as_f64().unwrap() - 8.9629e-3).abs() < 2e-4);
    assert!((ibdd["threshold_ebn0_db"].as_f64().unwrap() - 4.946).abs() < 0.03);
}

#[test]
fn reach_gain_reports_published_value() {
    let tmp = tempfile::tempdir().unwrap();
    let out = pcfec(&[
        "reach",
        "--delta-db",
        "0.24",
        "--baseline-km",
        "9680",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&read(tmp.path(), "reach.json")).unwrap();
    assert_eq!(v["gain"]["gain_km"], serde_json::json!(560.0));
    assert_eq!(v["gain"]["new_spans"], serde_json::json!(128));
    assert_eq!(v["reach"], serde_json::Value::Null);
    let resolved = read(tmp.path(), "resolved_config.json");
    assert_eq!(
        v["config_sha256"],
        serde_json::json!(sha256_hex(resolved.as_bytes()))
    );
}

#[test]
fn transfer_estimate_writes_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("cfg.json");
    std::fs::write(&config, r#"{"x_grid": [0.01, 0.02, 0.05]}"#).unwrap();
    let out = pcfec(&[
        "transfer-estimate",
        "--v",
        "4",
        "--t",
        "1",
        "--trials",
        "10000",
        "--seed",
        "3",
        "--config",
        config.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "transfer.json")).unwrap();
    assert_eq!(v["format"], serde_json::json!("pcfec-transfer/v1"));
    assert_eq!(v["transfer"]["model"], serde_json::json!("mc-estimated"));
    let tables = &v["transfer"]["tables"];
    assert_eq!(tables["x_grid"].as_array().unwrap().len(), 3);
    // Miscorrection probability of a t = 1 decoder is substantial.
    assert!(tables["p_mc"][2].as_f64().unwrap() > 0.1);
}

#[test]
fn validation_failures_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().to_str().unwrap().to_string();

    // Empty overhead-target list.
    let config = tmp.path().join("empty.json");
    std::fs::write(&config, r#"{"oh_targets": []}"#).unwrap();
    let out = pcfec(&[
        "optimize",
        "--config",
        config.to_str().unwrap(),
        "--out",
        &out_dir,
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Unsupported field order.
    let out = pcfec(&["threshold", "--v", "40", "--t", "3", "--out", &out_dir]);
    assert_eq!(out.status.code(), Some(2));

    // SR schedule without weights and without auto-fill.
    let config = tmp.path().join("sr.json");
    std::fs::write(
        &config,
        r#"{
            "v": 5, "t": 2, "s": 0,
            "schedules": [
                {"kind": "ibdd-sr", "sr_iterations": 5, "final_ibdd_iterations": 2}
            ],
            "ebn0_grid_db": [3.0],
            "stop": {"min_bit_errors": 1, "max_frames": 8}
        }"#,
    )
    .unwrap();
    let out = pcfec(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        &out_dir,
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Unknown config keys are typos, not silent no-ops.
    let config = tmp.path().join("typo.json");
    std::fs::write(&config, r#"{"ebn0_grid": [3.0]}"#).unwrap();
    let out = pcfec(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        &out_dir,
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Unknown decoder / model names die in flag parsing.
    let out = pcfec(&["threshold", "--decoders", "turbo", "--out", &out_dir]);
    assert_eq!(out.status.code(), Some(2));
    let out = pcfec(&["optimize", "--model", "fancy", "--out", &out_dir]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_convergent_de_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("cfg.json");
    // One half-iteration cannot reach a 1e-30 residual anywhere, so the
    // threshold bisection has no bracket.
    std::fs::write(
        &config,
        r#"{"optimizer": {"de": {"max_half_iters": 1, "convergence_target": 1e-30}}}"#,
    )
    .unwrap();
    let out = pcfec(&[
        "threshold",
        "--v",
        "9",
        "--t",
        "3",
        "--decoders",
        "ibdd",
        "--config",
        config.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no convergence"));
}
