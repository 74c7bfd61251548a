//! End-to-end checks of the command-line interface: exit codes, report
//! schema and determinism.

use std::path::PathBuf;
use std::process::Command;

use sweepout_forge::decomp::build_decomposition;
use sweepout_forge::lattice::json::write_complex;
use sweepout_forge::rat::rat;
use sweepout_forge::sweepout::input::{two_cube_filling, unit_cube_filling};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sweepout-forge"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sweepout-forge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn validate_reports_pseudomanifold() {
    let ds = build_decomposition(2, 1, rat(1, 2)).unwrap();
    let path = tmp("y2.json");
    write_complex(&path, &ds.y, Some(rat(1, 2))).unwrap();
    let out = bin().args(["validate", "--input"]).arg(&path).output().unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schema"], "report.v1");
    assert_eq!(doc["results"]["pseudomanifold"]["is_pseudomanifold"], true);
}

#[test]
fn sweep_strict_rejects_coarse_charts_with_input_error() {
    // the unsubdivided cube has cells with several boundary faces
    let path = tmp("coarse.json");
    std::fs::write(&path, unit_cube_filling(2).to_json_string().unwrap()).unwrap();
    let out = bin()
        .args(["sweep", "--mode", "strict", "--input"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("subdivi"), "stderr was: {msg}");
}

#[test]
fn usage_errors_exit_1_and_missing_files_exit_1() {
    let out = bin().args(["no-such-subcommand"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin()
        .args(["sweep", "--input", "/definitely/not/here.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_report_is_deterministic_modulo_timing() {
    let path = tmp("two-cube.json");
    std::fs::write(&path, two_cube_filling(2).to_json_string().unwrap()).unwrap();
    let run = || {
        let out = bin()
            .args(["sweep", "--input"])
            .arg(&path)
            .env("SWEEPOUT_FORGE_THREADS", "2")
            .output()
            .unwrap();
        assert!(out.status.success());
        let mut doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        doc.as_object_mut().unwrap().remove("timing_ms");
        doc
    };
    assert_eq!(run(), run());
}

#[test]
fn starfish_audit_passes() {
    let out = bin().args(["starfish"]).output().unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["results"]["hexapod_ok"], true);
    assert_eq!(doc["results"]["audit"]["all_passed"], true);
}

#[test]
fn fiber_export_writes_off_files() {
    let path = tmp("cube.json");
    std::fs::write(&path, unit_cube_filling(2).to_json_string().unwrap()).unwrap();
    let dir = tmp("fibers");
    let out = bin()
        .args(["sweep", "--input"])
        .arg(&path)
        .arg("--export-fibers")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let mut names: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert!(names.contains(&"hypersurface.off".to_string()));
    assert!(names.iter().any(|n| n.starts_with("fiber_")));
    let first = std::fs::read_to_string(dir.join(&names[0])).unwrap();
    assert!(first.starts_with("OFF\n"));
}
