//! Runs a shipped config through the experiment pipeline.
//!
//! cargo run --example run_experiment -- configs/pd_vs_m.ini /tmp/irs-out

use std::path::PathBuf;

use irs_isac::experiments::{self, RunOptions};

fn main() {
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/power_vs_snr.ini"));
    let output_dir = args.next().map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let options = RunOptions {
        output_dir: Some(output_dir),
        plots: true,
        ..RunOptions::default()
    };
    match experiments::run(&config, &options) {
        Ok((table, artifacts)) => {
            println!("{}", table.header.join(", "));
            for row in table.rows.iter().take(8) {
                println!("{}", row.join(", "));
            }
            println!("... {} rows written to {}", table.rows.len(), artifacts.csv.display());
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
