//! Config-driven experiments and the validation suite.
//!
//! Each experiment produces one [`Table`] that is written as
//! `<name>.csv` next to a `<name>.meta` sidecar holding the resolved
//! configuration. Randomness flows from the single config seed, so reruns are
//! byte-identical.

pub mod config;
pub mod plot;
pub mod run;
pub mod validate;

pub use config::{CoefficientMode, ExperimentConfig, ExperimentKind, ParseError};
pub use run::{run_experiment, write_outputs, Artifacts, Table};
pub use validate::{validation_suite, CheckOutcome, ValidationOptions};

use std::path::{Path, PathBuf};

use thiserror::Error;

/// Environment variable naming the output directory when `--output-dir` is
/// absent.
pub const OUTPUT_DIR_ENV: &str = "IRS_ISAC_OUTPUT_DIR";

#[derive(Debug, Error)]
pub enum RunError {
    #[error("cannot read config {path}: {source}")]
    ReadConfig {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Invalid(#[from] crate::Error),
    #[error("cannot write output to {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl RunError {
    /// Process exit status: 2 unparseable config, 3 invariant violation,
    /// 4 unwritable output.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::ReadConfig { .. } | RunError::Parse(_) => 2,
            RunError::Invalid(_) => 3,
            RunError::Write { .. } => 4,
        }
    }
}

/// Overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub plots: bool,
}

/// Loads, validates and runs the experiment in `config_path`.
pub fn run(config_path: &Path, options: &RunOptions) -> Result<(Table, Artifacts), RunError> {
    let text = std::fs::read_to_string(config_path).map_err(|source| RunError::ReadConfig {
        path: config_path.to_path_buf(),
        source,
    })?;
    let mut config = ExperimentConfig::parse(&text)?;
    if let Some(seed) = options.seed {
        config.seed = seed;
    }
    if let Some(dir) = options
        .output_dir
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
    {
        config.output_dir = dir;
    }
    let table = run_experiment(&config)?;
    let artifacts = write_outputs(&table, &config, &config.output_dir, options.plots).map_err(|source| {
        RunError::Write {
            path: config.output_dir.clone(),
            source,
        }
    })?;
    Ok((table, artifacts))
}
