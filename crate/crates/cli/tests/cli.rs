//! Behavioral tests of the `direx` binary: flag/config resolution, report
//! contents, exit codes, and the verify subcommand's judgments.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn direx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_direx")).args(args).output().expect("running direx")
}

fn read_json(path: &Path) -> Value {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{path:?}: {e}"));
    serde_json::from_str(&text).unwrap()
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

#[test]
fn chsh_stats_honest_close_to_quantum_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = direx(&[
        "chsh-stats", "--seed", "41", "--rounds", "40000", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("chsh_stats.json"));
    let rows = report["per_input_pair"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let estimate = row["estimate"].as_f64().unwrap();
        let closed = row["closed_form"].as_f64().unwrap();
        assert!((closed - 0.8535533905932737).abs() < 1e-12);
        assert!((estimate - 0.85355).abs() < 0.01, "estimate {estimate}");
    }
    assert_eq!(report["classical_optimum"]["value"].as_f64().unwrap(), 0.75);
    assert_eq!(report["tool"]["name"], "direx");
    assert_eq!(report["config"]["seed"].as_u64().unwrap(), 41);
}

#[test]
fn chsh_stats_all_zeros_exact_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = direx(&[
        "chsh-stats", "--pair", "all-zeros", "--seed", "1", "--rounds", "200", "--format", "csv",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let report = read_json(&dir.path().join("chsh_stats.json"));
    let rows = report["per_input_pair"].as_array().unwrap();
    let expected = [1.0, 1.0, 1.0, 0.0];
    for (row, want) in rows.iter().zip(expected) {
        assert_eq!(row["closed_form"].as_f64().unwrap(), want);
        assert_eq!(row["estimate"].as_f64().unwrap(), want);
    }
    assert_eq!(report["overall_closed_form"].as_f64().unwrap(), 0.75);
    // csv table appears alongside the JSON report
    let csv = std::fs::read_to_string(dir.path().join("chsh_stats.csv")).unwrap();
    assert!(csv.starts_with("x,y,rounds,wins,estimate"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn run_protocol_a_honest_accepts_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let out = direx(&[
        "run", "--protocol", "a", "--seed", "2024", "--ell", "25", "--delta", "3",
        "--k-override", "10000", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["transcript.json", "blocks.csv", "stats.json"] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    let stats = read_json(&dir.path().join("stats.json"));
    assert_eq!(stats["stats"]["accepted"], Value::Bool(true));
    assert_eq!(stats["stats"]["total_blocks"].as_u64().unwrap(), 75);
    let blocks = std::fs::read_to_string(dir.path().join("blocks.csv")).unwrap();
    assert_eq!(blocks.lines().count(), 76); // header + one row per block

    let transcript = dir.path().join("transcript.json");
    let verify = direx(&["verify", transcript.to_str().unwrap()]);
    assert_eq!(code(&verify), 0);
    assert!(String::from_utf8_lossy(&verify.stdout).contains("transcript ok"));
}

#[test]
fn run_all_zeros_rejects_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = direx(&[
        "run", "--protocol", "a", "--pair", "all-zeros", "--seed", "8", "--ell", "100",
        "--delta", "40", "--k-override", "100", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stdout).contains("rejected"));
    // the rejected run still leaves a verifiable transcript
    let verify = direx(&["verify", dir.path().join("transcript.json").to_str().unwrap()]);
    assert_eq!(code(&verify), 0);
}

#[test]
fn run_invalid_window_errors_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("results");
    let out = direx(&[
        "run", "--protocol", "b", "--seed", "1", "--window-low", "0.6", "--window-high", "0.5",
        "--out", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("window"));
    assert!(!out_dir.exists(), "rejected config must not produce output files");
}

#[test]
fn verify_flags_tampered_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let out = direx(&[
        "run", "--protocol", "a", "--seed", "5", "--ell", "25", "--delta", "2",
        "--k-override", "300", "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(code(&out) == 0 || code(&out) == 2);
    let path = dir.path().join("transcript.json");
    let mut transcript: Value = read_json(&path);
    let flipped = !transcript["accepted"].as_bool().unwrap();
    transcript["accepted"] = Value::Bool(flipped);
    std::fs::write(&path, serde_json::to_string_pretty(&transcript).unwrap()).unwrap();
    let verify = direx(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&verify), 2);
    assert!(String::from_utf8_lossy(&verify.stdout).contains("invalid"));
}

#[test]
fn design_output_passes_verify_and_tampering_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = direx(&[
        "design", "--r", "16", "--set-size", "8", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let path = dir.path().join("design.json");
    let verify = direx(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&verify), 0, "{}", String::from_utf8_lossy(&verify.stdout));

    // enlarging one set's overlap breaks the invariant on re-check
    let mut report: Value = read_json(&path);
    let sets = report["design"]["sets"].as_array().unwrap().clone();
    let first = sets[0].clone();
    report["design"]["sets"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .skip(1)
        .for_each(|s| *s = first.clone());
    std::fs::write(&path, serde_json::to_string(&report).unwrap()).unwrap();
    let verify = direx(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&verify), 2);
}

#[test]
fn guess_honest_ci_straddles_half() {
    let dir = tempfile::tempdir().unwrap();
    let out = direx(&[
        "guess", "--seed", "77", "--k", "16", "--trials", "20000",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("guess.json"));
    let ci_low = report["result"]["wilson_ci"][0].as_f64().unwrap();
    let ci_high = report["result"]["wilson_ci"][1].as_f64().unwrap();
    assert!(ci_low <= 0.5 && 0.5 <= ci_high, "CI [{ci_low}, {ci_high}] misses 1/2");
    assert!(report["result"]["bound"].is_null());
}

#[test]
fn guess_cheating_pair_reports_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = direx(&[
        "guess", "--pair", "cheating", "--gamma", "0.05", "--k", "40", "--trials", "4000",
        "--b0-mode", "known", "--seed", "13", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("guess.json"));
    let estimate = report["result"]["estimate"].as_f64().unwrap();
    let bound = report["result"]["bound"].as_f64().unwrap();
    assert!((bound - 0.70).abs() < 1e-12);
    assert!(estimate >= bound, "estimate {estimate} below lemma bound {bound}");
}

#[test]
fn entropy_reports_exact_values_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("dist.json");
    std::fs::write(&input, r#"{"outcomes": ["00", "01", "10"], "probs": [0.5, 0.3, 0.2]}"#)
        .unwrap();
    let out = direx(&[
        "entropy", "--input", input.to_str().unwrap(), "--epsilon", "0.1", "--alpha", "1.4",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("entropy.json"));
    assert_eq!(report["min_entropy"].as_f64().unwrap(), 1.0);
    let smooth = report["smooth_min_entropy"].as_f64().unwrap();
    assert!((smooth - 0.4f64.log2().abs()).abs() < 1e-12, "smooth {smooth}");
    let witness = &report["witness"];
    assert_eq!(witness["outcomes"], serde_json::json!(["00"]));
    assert_eq!(witness["mass"].as_f64().unwrap(), 0.5);
}

#[test]
fn extract_all_zero_input_gives_all_zero_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = direx(&[
        "extract", "--m", "16", "--t", "2", "--r", "4", "--budget", "40",
        "--input-hex", "0000", "--seed-hex", "00deadbeef", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("extract.json"));
    assert_eq!(report["output_hex"].as_str().unwrap(), "0");
    assert_eq!(report["output"]["len"].as_u64().unwrap(), 4);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("direx.json");
    std::fs::write(
        &config,
        r#"{"seed": 5, "run": {"protocol": "a", "ell": 25, "delta": 2, "k_override": 400}}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("results");
    let out = direx(&[
        "run", "--config", config.to_str().unwrap(), "--seed", "2024", "--k-override", "10000",
        "--delta", "3", "--out", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let transcript = read_json(&out_dir.join("transcript.json"));
    // flags won where both were given; the config filled the rest
    assert_eq!(transcript["params"]["params"]["master_seed"].as_u64().unwrap(), 2024);
    assert_eq!(transcript["params"]["params"]["k_override"].as_u64().unwrap(), 10000);
    assert_eq!(transcript["params"]["params"]["delta"].as_u64().unwrap(), 3);
    assert_eq!(transcript["params"]["params"]["ell"].as_u64().unwrap(), 25);
}

#[test]
fn config_file_with_unknown_keys_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("direx.json");
    std::fs::write(&config, r#"{"sede": 5}"#).unwrap();
    let out = direx(&["run", "--config", config.to_str().unwrap(), "--protocol", "a"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("sede"));
}

#[test]
fn missing_seed_is_an_error() {
    let out = direx(&["chsh-stats"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn unknown_pair_name_is_an_error() {
    let out = direx(&["chsh-stats", "--seed", "1", "--pair", "telepathic"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("telepathic"));
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    let out = direx(&["frobnicate"]);
    assert_eq!(code(&out), 1);
    let help = direx(&["--help"]);
    assert_eq!(code(&help), 0);
    assert!(String::from_utf8_lossy(&help.stdout).contains("chsh-stats"));
}
