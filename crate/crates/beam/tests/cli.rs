//! End-to-end tests of the `beamcli` binary: config handling, CSV and
//! record emission, determinism, exit codes, and the catalog golden files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use beam::cli::{scenario_to_config, RunRecord, ScenarioConfig};
use beam::scenario::BeamScenario;

fn beamcli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_beamcli"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn exit_code(cmd: &mut Command) -> i32 {
    cmd.output()
        .expect("binary runs")
        .status
        .code()
        .unwrap_or(-1)
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.toml"))
}

/// A small scenario that exercises the full pipeline in milliseconds.
const MINI_CONFIG: &str = r#"
name = "mini"

[coefficients]
c = [
    { kind = "constant", value = 1.0 },
    { kind = "dirac", x0 = 0.5, weight = 1.0 },
]
b = [{ kind = "constant", value = 1.0 }]
g_space = [{ kind = "constant", value = 1.0 }]
g_time = [{ kind = "constant", value = 1.0 }]

[discretization]
n = 16
m = 8

[sweep]
eps = [0.2, 0.1]
"#;

#[test]
fn golden_catalog_configs_match_builtins() {
    for name in ["regular", "logC", "deltaC", "deltaB", "deltaTG"] {
        let text = fs::read_to_string(golden_path(name)).expect("golden file exists");
        let golden: ScenarioConfig = toml::from_str(&text).expect("golden file parses");
        let built = scenario_to_config(&BeamScenario::by_name(name).expect("catalog entry"));
        assert_eq!(
            golden, built,
            "catalog entry {name} drifted from its golden config"
        );
    }
}

#[test]
fn run_regular_degenerate_sizes_does_not_crash() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(
        beamcli()
            .args(["run", "regular", "--n", "2", "--m", "2", "--eps", "0.2"])
            .args(["--out", dir.path().to_str().unwrap()]),
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("w_norm"));
    // The error against the closed form is reported and, at n = m = 2, large.
    let e_line = stdout
        .lines()
        .find(|l| l.contains("e_l2"))
        .expect("closed-form error reported");
    assert!(dir.path().join("regular_eps0.2_surface.csv").exists());
    assert!(dir.path().join("regular_eps0.2_xsection.csv").exists());
    assert!(dir.path().join("regular_eps0.2_record.toml").exists());
    let _ = e_line;
}

#[test]
fn identical_configs_produce_byte_identical_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("mini.toml");
    fs::write(&cfg_path, MINI_CONFIG).unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        run_ok(
            beamcli()
                .args(["run", "--config", cfg_path.to_str().unwrap()])
                .args(["--eps", "0.2", "--out", out.to_str().unwrap()]),
        );
    }
    for file in ["mini_eps0.2_surface.csv", "mini_eps0.2_xsection.csv"] {
        let a = fs::read(out_a.join(file)).unwrap();
        let b = fs::read(out_b.join(file)).unwrap();
        assert_eq!(a, b, "{file} must be byte-identical across reruns");
    }
}

#[test]
fn rerunning_a_record_snapshot_reproduces_the_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("mini.toml");
    fs::write(&cfg_path, MINI_CONFIG).unwrap();
    let out_a = dir.path().join("a");
    run_ok(
        beamcli()
            .args(["run", "--config", cfg_path.to_str().unwrap()])
            .args(["--eps", "0.1", "--out", out_a.to_str().unwrap()]),
    );
    // Extract the snapshot from the record and run it as a config.
    let record_text = fs::read_to_string(out_a.join("mini_eps0.1_record.toml")).unwrap();
    let record: RunRecord = toml::from_str(&record_text).unwrap();
    let snap_path = dir.path().join("snapshot.toml");
    fs::write(&snap_path, toml::to_string(&record.snapshot).unwrap()).unwrap();
    let out_b = dir.path().join("b");
    run_ok(
        beamcli()
            .args(["run", "--config", snap_path.to_str().unwrap()])
            .args(["--out", out_b.to_str().unwrap()]),
    );
    for file in ["mini_eps0.1_surface.csv", "mini_eps0.1_xsection.csv"] {
        let a = fs::read(out_a.join(file)).unwrap();
        let b = fs::read(out_b.join(file)).unwrap();
        assert_eq!(a, b, "{file} must be reproduced by the snapshot");
    }
}

#[test]
fn sweep_writes_records_and_report_aggregates_them() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("mini.toml");
    fs::write(&cfg_path, MINI_CONFIG).unwrap();
    let out_dir = dir.path().join("runs");
    let out = run_ok(
        beamcli()
            .args(["sweep", "--config", cfg_path.to_str().unwrap()])
            .args(["--out", out_dir.to_str().unwrap()])
            .env("BEAMCLI_WORKERS", "1"),
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("verdict:"));

    let sweep_csv = fs::read_to_string(out_dir.join("mini_sweep.csv")).unwrap();
    let lines: Vec<&str> = sweep_csv.lines().collect();
    assert_eq!(lines[0], "eps,w_norm,e_l2,margin");
    assert_eq!(lines.len(), 3, "one row per swept ε: {sweep_csv}");
    // The mini scenario has a constant-coefficient companion, so the
    // irregularity-error cell is populated.
    for line in &lines[1..] {
        let cells: Vec<&str> = line.split(',').collect();
        assert!(!cells[2].is_empty(), "expected e_l2 cell in {line}");
    }
    for eps in ["0.2", "0.1"] {
        assert!(out_dir.join(format!("mini_eps{eps}_record.toml")).exists());
        assert!(out_dir.join(format!("mini_eps{eps}_surface.csv")).exists());
    }

    // Aggregate the records.
    let rep = run_ok(beamcli().arg("report").arg(out_dir.to_str().unwrap()));
    let rep_out = String::from_utf8_lossy(&rep.stdout);
    let mini_rows: Vec<&str> = rep_out.lines().filter(|l| l.starts_with("mini")).collect();
    assert_eq!(mini_rows.len(), 2, "two swept runs reported:\n{rep_out}");
}

#[test]
fn single_eps_sweep_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("mini.toml");
    fs::write(&cfg_path, MINI_CONFIG).unwrap();
    let out = run_ok(
        beamcli()
            .args(["sweep", "--config", cfg_path.to_str().unwrap()])
            .args(["--eps-list", "0.2"])
            .args(["--out", dir.path().join("runs").to_str().unwrap()]),
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("inconclusive"),
        "single-ε sweep must be inconclusive:\n{stdout}"
    );
}

#[test]
fn report_on_empty_directory_prints_empty_table_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(beamcli().arg("report").arg(dir.path().to_str().unwrap()));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("scenario"),
        "header row expected:\n{stdout}"
    );
    assert_eq!(stdout.lines().count(), 1, "no data rows:\n{stdout}");
}

#[test]
fn report_lists_corrupt_records_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("broken_record.toml"), "this is { not toml").unwrap();
    let out = run_ok(beamcli().arg("report").arg(dir.path().to_str().unwrap()));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("skipped broken_record.toml"),
        "corrupt record must be listed:\n{stderr}"
    );
}

#[test]
fn unknown_scenario_is_a_config_error() {
    let code = exit_code(beamcli().args(["run", "nosuch", "--eps", "0.2"]));
    assert_eq!(code, 2);
}

#[test]
fn malformed_config_reports_location_and_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.toml");
    fs::write(&cfg_path, "name = \"x\"\n[coefficients]\nc = 5\n").unwrap();
    let out = beamcli()
        .args(["run", "--config", cfg_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("line") || stderr.contains("c = 5") || stderr.contains("invalid type"),
        "diagnostics expected:\n{stderr}"
    );
}

#[test]
fn unknown_term_kind_exits_two_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad_term.toml");
    fs::write(
        &cfg_path,
        r#"
name = "x"
[coefficients]
c = [{ kind = "delta", x0 = 0.5 }]
b = [{ kind = "constant", value = 1.0 }]
[discretization]
n = 8
m = 4
"#,
    )
    .unwrap();
    let out = beamcli()
        .args(["run", "--config", cfg_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("coefficients.c[0]"),
        "field path:\n{stderr}"
    );
}

#[test]
fn nonpositive_stiffness_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("neg.toml");
    fs::write(
        &cfg_path,
        r#"
name = "x"
[coefficients]
c = [{ kind = "constant", value = -1.0 }]
b = [{ kind = "constant", value = 1.0 }]
[discretization]
n = 8
m = 4
"#,
    )
    .unwrap();
    let code = exit_code(beamcli().args(["run", "--config", cfg_path.to_str().unwrap()]));
    assert_eq!(code, 2);
}

#[test]
fn convergence_two_sizes_is_flagged_low_confidence() {
    let out = run_ok(beamcli().args(["convergence", "--sizes", "8,16"]));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("fitted rate"));
    assert!(stdout.contains("low-confidence"), "{stdout}");
}

#[test]
fn convergence_writes_csv_when_out_given() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        beamcli()
            .args(["convergence", "--sizes", "8,16,32"])
            .args(["--out", dir.path().to_str().unwrap()]),
    );
    let csv = fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    assert!(csv.starts_with("n,m,e_l2\n"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn reparam_flag_is_recorded_and_applied() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("mini.toml");
    fs::write(&cfg_path, MINI_CONFIG).unwrap();
    run_ok(
        beamcli()
            .args(["run", "--config", cfg_path.to_str().unwrap()])
            .args(["--eps", "0.1", "--reparam", "log"])
            .args(["--out", dir.path().join("r").to_str().unwrap()]),
    );
    let record_text =
        fs::read_to_string(dir.path().join("r").join("mini_eps0.1_record.toml")).unwrap();
    let record: RunRecord = toml::from_str(&record_text).unwrap();
    assert_eq!(record.snapshot.discretization.reparam, "log");
    // λ(0.1) = 1/log(10) ≈ 0.4343: the effective scale differs from ε.
    let expected = 1.0 / (10.0f64).ln();
    assert!((record.eps_eff - expected).abs() <= 1e-12 * expected);
    assert!(record.eps_eff != record.epsilon);
}
