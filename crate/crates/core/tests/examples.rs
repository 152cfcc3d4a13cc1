//! Every example must run to completion. `cargo test` builds examples next
//! to the test binaries, so they are run from there.

use std::path::PathBuf;
use std::process::Command;

const EXAMPLES: [&str; 8] = [
    "qam_frame",
    "echo_channel",
    "link_budget",
    "range_doppler",
    "cfar_detection",
    "bounds",
    "phase_optimization",
    "run_experiment",
];

fn example_path(name: &str) -> Option<PathBuf> {
    let deps = std::env::current_exe().ok()?.parent()?.to_path_buf();
    let path = deps.parent()?.join("examples").join(format!("{name}{}", std::env::consts::EXE_SUFFIX));
    path.exists().then_some(path)
}

#[test]
fn examples_run() {
    let out = tempfile::TempDir::new().unwrap();
    for name in EXAMPLES {
        let Some(path) = example_path(name) else {
            // only present when the whole test suite was built
            eprintln!("skipping {name}: not built");
            continue;
        };
        let mut cmd = Command::new(path);
        if name == "run_experiment" {
            let cfg = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/power_vs_snr.ini");
            cmd.arg(cfg).arg(out.path());
        }
        let output = cmd.output().unwrap();
        assert!(output.status.success(), "{name}: {}", String::from_utf8_lossy(&output.stderr));
        assert!(!output.stdout.is_empty(), "{name} printed nothing");
    }
    assert!(out.path().join("power_vs_snr.csv").exists() || example_path("run_experiment").is_none());
}
