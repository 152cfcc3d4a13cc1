use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use irs_isac::experiments::{self, validation_suite, RunOptions, ValidationOptions};

#[derive(Parser)]
#[command(name = "irs-isac", about = "IRS-assisted OFDM ISAC experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Also write an SVG chart.
        #[arg(long)]
        plots: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the oracle checks.
    Validate {
        #[arg(long)]
        quick: bool,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            config,
            output_dir,
            plots,
            seed,
        } => {
            let options = RunOptions {
                output_dir,
                seed,
                plots,
            };
            match experiments::run(&config, &options) {
                Ok((table, artifacts)) => {
                    println!("{}: {} rows -> {}", table.name, table.rows.len(), artifacts.csv.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Command::Validate { quick } => {
            let outcomes = validation_suite(&ValidationOptions {
                quick,
                ..ValidationOptions::default()
            });
            for o in &outcomes {
                println!("{} {:<22} {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
            }
            if outcomes.iter().all(|o| o.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
