use std::path::PathBuf;
use std::process::{Command, Output};

use oplab_cli::config::{ConfigFile, OperatorSpec};
use oplab_cli::presets::PRESETS;
use oplab_core::shift::{library, WeightSequence};

fn oplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oplab"))
        .args(args)
        .env_remove("LAB_LOG")
        .output()
        .expect("binary runs")
}

fn write_config(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("oplab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const BATCH: &str = r#"{
  "version": 1,
  "cells": [
    {"label": "dense", "operator": {"random": {"family": "hyperbolic", "dim": 5}}, "params": {"delta": 0.001, "steps": 200}},
    {"label": "shift", "operator": {"library": "paper-sh"}, "params": {"delta": 0.01, "vector": {"basis": 2}}},
    {"label": "second-dense", "operator": {"random": {"family": "hyperbolic", "dim": 4}}, "seed": 99}
  ]
}"#;

#[test]
fn identical_config_and_seed_give_identical_bytes() {
    let cfg = write_config("batch.json", BATCH);
    let path = cfg.to_str().unwrap();
    for format in ["csv", "json"] {
        let a = oplab(&["shadow", "--config", path, "--seed", "7", "--format", format]);
        let b = oplab(&["shadow", "--config", path, "--seed", "7", "--format", format]);
        assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout);
    }
    let other = oplab(&["shadow", "--config", path, "--seed", "8"]);
    let base = oplab(&["shadow", "--config", path, "--seed", "7"]);
    assert_ne!(other.stdout, base.stdout);
}

#[test]
fn presets_are_deterministic_and_pass() {
    for name in PRESETS {
        let a = oplab(&["preset", name, "--format", "csv"]);
        assert!(a.status.success(), "{name}: {}", String::from_utf8_lossy(&a.stderr));
        let b = oplab(&["preset", name, "--format", "csv"]);
        assert_eq!(a.stdout, b.stdout, "{name}");
        assert!(!String::from_utf8_lossy(&a.stdout).contains("FAIL"));
    }
}

#[test]
fn batch_output_keeps_cell_order() {
    let cfg = write_config("order.json", BATCH);
    let out = oplab(&["shadow", "--config", cfg.to_str().unwrap(), "--seed", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let labels: Vec<&str> = v["cells"].as_array().unwrap().iter().map(|c| c["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["dense", "shift", "second-dense"]);
}

#[test]
fn hyp_divergence_certificate_has_exact_tail_bound() {
    let out = oplab(&["preset", "paper-hyp-divergence"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["cells"][0]["document"]["certificate"]["tailLowerBound"], 0.5);
}

#[test]
fn classify_library_reports_dense_homoclinic_witness() {
    let out = oplab(&["preset", "paper-classify-library"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v["cells"][0]["rows"].as_array().unwrap();
    let sh = rows.iter().find(|r| r[0] == "paper-sh").unwrap();
    assert_eq!(sh[1], "ShiftedHyperbolic");
    assert_eq!(sh[7], "all basis vectors homoclinic");
    assert_eq!(rows.len(), library().len());
}

#[test]
fn classify_constant_half() {
    let op = r#"{"weights": {"coreStart": 0, "core": [], "leftTail": 0.5, "rightTail": 0.5}}"#;
    let out = oplab(&["classify", "--operator", op, "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("UniformContraction,")));
}

#[test]
fn csv_floats_round_trip_losslessly() {
    let out = oplab(&["certificate", "--operator", "paper-sh", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = rows.next().unwrap().split(',').collect();
    let values: Vec<&str> = rows.next().unwrap().split(',').collect();
    let gap: f64 = values[header.iter().position(|h| *h == "gap").unwrap()].parse().unwrap();
    let json = oplab(&["certificate", "--operator", "paper-sh"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(gap, v["cells"][0]["document"]["gap"].as_f64().unwrap());
}

#[test]
fn unknown_fields_are_rejected_with_path() {
    let cfg = write_config(
        "typo.json",
        r#"{"version": 1, "cells": [{"operator": {"library": "paper-sh"}, "params": {"lamda": 0.5}}]}"#,
    );
    let out = oplab(&["aluthge", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("cells[0].params") && err.contains("lamda"), "{err}");
}

#[test]
fn invalid_values_are_rejected_with_path() {
    let cases = [
        (r#"{"operator": {"library": "paper-sh"}, "params": {"delta": -1}}"#, "cells[0].params.delta"),
        (r#"{"operator": {"library": "paper-sh"}, "params": {"lambda": 1.5}}"#, "cells[0].params.lambda"),
        (r#"{"operator": {"library": "nope"}}"#, "cells[0].operator.library"),
        (r#"{"operator": {"random": {"family": "ginibre", "dim": 3}}}"#, "cells[0].seed"),
        (r#"{"kind": "orbit", "operator": {"library": "paper-sh"}}"#, "cells[0].kind"),
    ];
    for (i, (cell, path)) in cases.iter().enumerate() {
        let cfg = write_config(&format!("bad{i}.json"), &format!(r#"{{"version": 1, "cells": [{cell}]}}"#));
        let out = oplab(&["aluthge", "--config", cfg.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{cell}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains(path), "{err} lacks {path}");
    }
}

#[test]
fn failing_check_exits_nonzero() {
    // a dense spectrum audit with an impossible tolerance
    let cfg = write_config(
        "strict.json",
        r#"{"version": 1, "cells": [{"operator": {"random": {"family": "ginibre", "dim": 4}}, "seed": 1,
            "params": {"maxIters": 5, "tol": 1e-300}}]}"#,
    );
    let out = oplab(&["aluthge", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("spectrum-preserved"));
}

#[test]
fn errors_name_the_operation() {
    let op = r#"{"weights": {"coreStart": 0, "core": [], "leftTail": 0.5, "rightTail": 2.0}}"#;
    let out = oplab(&["shadow", "--operator", op]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: shadow:"));
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("oplab-out-{}.csv", std::process::id()));
    let out = oplab(&["spectrum", "--operator", "paper-hyp", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("innerRadius,outerRadius,meetsUnitCircle"));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn timing_is_opt_in() {
    let plain = String::from_utf8(oplab(&["preset", "paper-sh-divergence"]).stdout).unwrap();
    assert!(!plain.contains("wallTimeSeconds"));
    let timed = String::from_utf8(oplab(&["preset", "paper-sh-divergence", "--timing"]).stdout).unwrap();
    assert!(timed.contains("wallTimeSeconds"));
}

#[test]
fn config_echo_round_trips() {
    let cfg = write_config("echo.json", BATCH);
    let out = oplab(&["shadow", "--config", cfg.to_str().unwrap(), "--seed", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let echoed: ConfigFile = serde_json::from_value(v["metadata"]["config"].clone()).unwrap();
    let again = serde_json::to_value(&echoed).unwrap();
    assert_eq!(again, v["metadata"]["config"]);
    assert_eq!(echoed.cells[0].seed, Some(3));
    assert_eq!(echoed.cells[2].seed, Some(99));
}

#[test]
fn serialized_operators_reparse_to_equal_values() {
    for e in library() {
        let spec = OperatorSpec::Weights(e.weights.clone());
        let back: OperatorSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }
    // non-canonical input is canonicalized on parse
    let raw = r#"{"coreStart": -3, "core": [2.0, 2.0, 1.5, 0.5], "leftTail": 2.0, "rightTail": 0.5}"#;
    let w: WeightSequence = serde_json::from_str(raw).unwrap();
    assert_eq!((w.core_start(), w.core()), (-1, &[1.5][..]));
    let again: WeightSequence = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
    assert_eq!(again, w);
}

#[test]
fn schema_lists_every_kind_and_preset() {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../schema/config.v1.json")).unwrap();
    let cell = &schema["$defs"]["cell"]["properties"];
    let kinds: Vec<&str> = cell["kind"]["enum"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(kinds, ["classify", "aluthge", "orbit", "shadow", "spectrum", "certificate", "preset"]);
    let presets: Vec<&str> = cell["preset"]["enum"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(presets, PRESETS);
}
