use std::path::{Path, PathBuf};
use std::process::Command;

use orbitforge_cli::commands::COMMANDS;
use orbitforge_cli::scenarios::SCENARIOS;
use orbitforge_cli::Report;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orbitforge"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(format!("{name}.json"))
}

fn scratch(name: &str) -> PathBuf {
    let d = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn read(dir: &Path, file: &str) -> String {
    std::fs::read_to_string(dir.join(file)).unwrap()
}

/// Parsing into the published type and writing back reproduces the file.
fn assert_schema_roundtrip(dir: &Path) -> Report {
    let text = read(dir, "report.json");
    let r: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(r.schema, orbitforge_cli::report::SCHEMA);
    assert_eq!(serde_json::to_string_pretty(&r).unwrap() + "\n", text);
    r
}

#[test]
fn every_command_runs_on_its_fixture() {
    for &cmd in COMMANDS {
        let out = scratch(&format!("cmd_{cmd}"));
        let st = bin().args([cmd, "--config"]).arg(fixture(cmd)).arg("--out").arg(&out).output().unwrap();
        assert!(st.status.success(), "{cmd}: {}", String::from_utf8_lossy(&st.stderr));
        let r = assert_schema_roundtrip(&out);
        assert_eq!(r.command, cmd);
        assert!(read(&out, "report.md").contains("all checks passed"));
        assert!(!read(&out, "report.csv").is_empty());
    }
}

#[test]
fn scenario_list_names_everything() {
    let st = bin().args(["scenario", "list"]).output().unwrap();
    assert!(st.status.success());
    let text = String::from_utf8(st.stdout).unwrap();
    for s in SCENARIOS {
        assert!(text.contains(s.name));
    }
}

#[test]
fn reports_are_identical_across_runs_and_worker_counts() {
    let a = scratch("repro_a");
    let b = scratch("repro_b");
    for (dir, jobs) in [(&a, "1"), (&b, "3")] {
        let st = bin().args(["scenario", "run", "simple_example", "--seed", "7", "--jobs", jobs, "--out"]).arg(dir).output().unwrap();
        assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stdout));
    }
    assert_eq!(read(&a, "report.json"), read(&b, "report.json"));
    assert_eq!(read(&a, "report.csv"), read(&b, "report.csv"));
    let r = assert_schema_roundtrip(&a);
    assert_eq!(r.scenario.as_deref(), Some("simple_example"));
    assert!(r.checks.iter().all(|c| c.passed));

    let c = scratch("repro_env");
    let st = bin().env("ORBITFORGE_JOBS", "2").args(["scenario", "run", "simple_example", "--seed", "7", "--out"]).arg(&c).output().unwrap();
    assert!(st.status.success());
    assert_eq!(read(&a, "report.json"), read(&c, "report.json"));
}

#[test]
fn scenario_from_config_file() {
    let dir = scratch("from_config");
    let cfg = dir.with_extension("json");
    std::fs::write(&cfg, format!(r#"{{"scenario": "monotonicity_random", "seed": 3, "input": {{"pairs": 2, "points": 11}}, "out": {:?}}}"#, dir)).unwrap();
    let st = bin().args(["scenario", "run", "--config"]).arg(&cfg).output().unwrap();
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let r = assert_schema_roundtrip(&dir);
    assert_eq!(r.seed, 3);
    assert_eq!(r.result["pairs"], 2);
    assert_eq!(read(&dir, "report.csv").lines().count(), 1 + 2 * 11);
}

#[test]
fn exit_codes() {
    let dir = scratch("exit");
    // missing config
    assert_eq!(bin().args(["chow", "--out"]).arg(&dir).status().unwrap().code(), Some(2));
    // unknown scenario
    assert_eq!(bin().args(["scenario", "run", "nope"]).status().unwrap().code(), Some(2));
    // malformed payload
    let bad = dir.with_extension("bad.json");
    std::fs::write(&bad, r#"{"cycle": {"components": []}, "A": {"diag": [1, -1]}, "extra": 1}"#).unwrap();
    assert_eq!(bin().args(["chow", "--config"]).arg(&bad).arg("--out").arg(&dir).status().unwrap().code(), Some(2));
    // a failing invariant: demand a forward difference of at least 1
    let strict = dir.with_extension("strict.json");
    std::fs::write(&strict, r#"{"cycle": {"components": [{"param": ["1", "u", "u^2"]}]}, "A": {"diag": [1, 0, -1]}, "points": 5, "slack": -1.0}"#).unwrap();
    let st = bin().args(["monotone", "--config"]).arg(&strict).arg("--out").arg(&dir).output().unwrap();
    assert_eq!(st.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&st.stdout).contains("FAIL monotone"));
    assert!(read(&dir, "report.md").contains("FAILED"));
}

#[test]
fn quick_scenarios_match_their_goldens() {
    for name in ["sextic_concurrent", "futaki_concurrent_lines", "chow_oracles", "factorization_random", "binary_grid", "pole_order_pairing", "web_prefix_example"] {
        let dir = scratch(&format!("golden_{name}"));
        let st = bin().args(["scenario", "run", name, "--out"]).arg(&dir).output().unwrap();
        assert!(st.status.success(), "{name}: {}", String::from_utf8_lossy(&st.stdout));
        let r = assert_schema_roundtrip(&dir);
        assert!(r.checks.iter().all(|c| c.passed));
    }
}

#[test]
fn monotone_scan_csv_has_the_scan_columns() {
    let dir = scratch("scan_csv");
    let st = bin().args(["monotone", "--config"]).arg(fixture("monotone")).arg("--out").arg(&dir).output().unwrap();
    assert!(st.status.success());
    let csv = read(&dir, "report.csv");
    assert_eq!(csv.lines().next(), Some("s,Ch,error_estimate"));
    assert_eq!(csv.lines().count(), 10);
}

#[test]
fn charts_flag_splits_the_volume() {
    let dir = scratch("charts");
    let st = bin().args(["chow", "--charts", "--config"]).arg(fixture("chow")).arg("--out").arg(&dir).output().unwrap();
    assert!(st.status.success());
    let r = assert_schema_roundtrip(&dir);
    let charts = r.result["charts"].as_array().unwrap();
    assert_eq!(charts.len(), 2);
    let mass: f64 = charts.iter().map(|c| c["mass"].as_f64().unwrap()).sum();
    assert!((mass - r.result["volume"].as_f64().unwrap()).abs() < 1e-12);
    assert_eq!(read(&dir, "report.csv").lines().next(), Some("component,chart,mass,h_integral,error"));
}
