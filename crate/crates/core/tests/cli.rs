use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_irs-isac");

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("IRS_ISAC_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.ini");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn power_run_writes_csv_and_meta() {
    let out = TempDir::new().unwrap();
    let cfg = config("power_vs_snr.ini");
    let status = run(&["run", cfg.to_str().unwrap(), "--output-dir", out.path().to_str().unwrap()]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));

    let csv = fs::read_to_string(out.path().join("power_vs_snr.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("snr_db,M,echo_power_watts"));
    assert_eq!(lines.count(), 7 * 4);

    let meta = fs::read_to_string(out.path().join("power_vs_snr.meta")).unwrap();
    assert!(meta.lines().any(|l| l == "experiment=power_vs_snr"));
    assert!(meta.lines().any(|l| l == "seed=2022"));
    assert!(meta.lines().all(|l| l.contains('=')));
    assert!(!out.path().join("power_vs_snr.svg").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "experiment = snr_vs_m\n[irs]\nm_grid = 1..12\nrandom_draws = 200\n",
    );
    for out in [&a, &b] {
        let status = run(&["run", cfg.to_str().unwrap(), "--output-dir", out.path().to_str().unwrap(), "--seed", "5"]);
        assert!(status.status.success());
    }
    let first = fs::read(a.path().join("snr_vs_m.csv")).unwrap();
    assert_eq!(first, fs::read(b.path().join("snr_vs_m.csv")).unwrap());
    assert_eq!(String::from_utf8(first).unwrap().lines().count(), 1 + 12 * 3);
    let meta = fs::read_to_string(a.path().join("snr_vs_m.meta")).unwrap();
    assert!(meta.contains("seed=5\n"));
}

#[test]
fn plots_flag_writes_svg() {
    let out = TempDir::new().unwrap();
    let cfg = config("pd_vs_m.ini");
    let status = run(&["run", cfg.to_str().unwrap(), "--output-dir", out.path().to_str().unwrap(), "--plots"]);
    assert!(status.status.success());
    let svg = fs::read_to_string(out.path().join("pd_vs_m.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    let rows = fs::read_to_string(out.path().join("pd_vs_m.csv")).unwrap().lines().count();
    assert_eq!(rows, 1 + 64 * 3);
}

#[test]
fn env_var_sets_output_dir() {
    let out = TempDir::new().unwrap();
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "experiment = power_vs_snr\n[power]\nm_list = 1, 2\nsnr_grid_db = 0, 10\n");
    let status = Command::new(BIN)
        .args(["run", cfg.to_str().unwrap()])
        .env("IRS_ISAC_OUTPUT_DIR", out.path())
        .output()
        .unwrap();
    assert!(status.status.success());
    let csv = fs::read_to_string(out.path().join("power_vs_snr.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4);
}

#[test]
fn flag_beats_env_var() {
    let flag = TempDir::new().unwrap();
    let env = TempDir::new().unwrap();
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "experiment = power_vs_snr\n");
    let status = Command::new(BIN)
        .args(["run", cfg.to_str().unwrap(), "--output-dir", flag.path().to_str().unwrap()])
        .env("IRS_ISAC_OUTPUT_DIR", env.path())
        .output()
        .unwrap();
    assert!(status.status.success());
    assert!(flag.path().join("power_vs_snr.csv").exists());
    assert!(!env.path().join("power_vs_snr.csv").exists());
}

#[test]
fn parse_error_exits_2_with_line_and_key() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "experiment = pd_vs_m\n[detection]\nn_ref = sixteen\n");
    let status = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(status.status.code(), Some(2));
    let err = String::from_utf8_lossy(&status.stderr);
    assert!(err.contains("line 3") && err.contains("detection.n_ref"), "{err}");

    let missing = run(&["run", dir.path().join("nope.ini").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn invalid_value_exits_3_naming_key() {
    let dir = TempDir::new().unwrap();
    let out = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "experiment = pd_vs_m\n[irs]\nm_grid = 0, 4\n");
    let status = run(&["run", cfg.to_str().unwrap(), "--output-dir", out.path().to_str().unwrap()]);
    assert_eq!(status.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&status.stderr).contains("irs.m_grid"));

    let cfg = write_config(dir.path(), "experiment = pd_vs_m\n[frame]\nsymbol_duration = 1e-3\n");
    let status = run(&["run", cfg.to_str().unwrap(), "--output-dir", out.path().to_str().unwrap()]);
    assert_eq!(status.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&status.stderr).contains("frame."));
}

#[test]
fn unwritable_output_exits_4() {
    let dir = TempDir::new().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "not a directory").unwrap();
    let cfg = write_config(dir.path(), "experiment = power_vs_snr\n");
    let status = run(&["run", cfg.to_str().unwrap(), "--output-dir", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(status.status.code(), Some(4));
}

#[test]
fn quick_validate_passes() {
    let status = run(&["validate", "--quick"]);
    assert!(status.status.success());
    let stdout = String::from_utf8_lossy(&status.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 7, "{stdout}");
}
