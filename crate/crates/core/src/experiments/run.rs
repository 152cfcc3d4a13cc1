use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{CoefficientMode, ExperimentConfig, ExperimentKind};
use super::plot;
use super::validate::{validation_suite, ValidationOptions};
use crate::crlb::crlb_range;
use crate::detection::pd_vs_m_curve;
use crate::error::Result;
use crate::estimator::{mse_sweep, SweepSettings};
use crate::irs_channel::{sensing_channel, IrsProfile, Scenario};
use crate::link_budget::{from_db, link_factor, received_power, receiver_snr, to_db};
use crate::phase_optimizer::{optimize, random_phase_snr, OptimizerConfig};
use crate::rng::child_seed;

/// One experiment's output, ready for CSV emission.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: Vec<&'static str>) -> Self {
        Self {
            name: name.to_string(),
            header,
            rows: Vec::new(),
        }
    }

    /// Numeric column `index` (non-numeric cells become NaN).
    pub fn column(&self, index: usize) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r[index].parse().unwrap_or(f64::NAN))
            .collect()
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            writer.write_record(row).expect("in-memory write");
        }
        writer.into_inner().expect("in-memory flush")
    }
}

/// Shortest round-trip decimal form.
fn num(v: f64) -> String {
    format!("{v}")
}

/// SNR versus number of sub-surfaces for each coefficient mode.
pub fn snr_vs_m(config: &ExperimentConfig) -> Result<Table> {
    let scenario = &config.scenario;
    let baseline = receiver_snr(scenario, &IrsProfile::aligned_unit(1));
    let per_m: Vec<Vec<(CoefficientMode, f64)>> = config
        .irs
        .m_grid
        .par_iter()
        .map(|&m| {
            let seed = child_seed(config.seed, m as u64);
            let profile = IrsProfile::random_propagation(m, config.irs.beta_min, child_seed(seed, 0));
            config
                .irs
                .coefficient_modes
                .iter()
                .map(|&mode| {
                    let snr = match mode {
                        CoefficientMode::Optimal => {
                            let opt = OptimizerConfig {
                                seed: child_seed(seed, 1),
                                ..config.optimizer
                            };
                            optimize(&profile, scenario, &opt)?.final_objective()
                        }
                        CoefficientMode::Random => {
                            random_phase_snr(&profile, scenario, config.irs.random_draws, child_seed(seed, 2))
                        }
                        CoefficientMode::None => baseline,
                    };
                    Ok((mode, snr))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new("snr_vs_m", vec!["M", "mode", "snr_db"]);
    for (&m, values) in config.irs.m_grid.iter().zip(per_m) {
        for (mode, snr) in values {
            table.rows.push(vec![m.to_string(), mode.name().to_string(), num(to_db(snr))]);
        }
    }
    Ok(table)
}

/// Echo power versus SNR. The SNR axis is the no-IRS receiver SNR, swept by
/// scaling the transmit power at fixed noise power; echo power is reported
/// for phase-aligned unit IRS profiles.
pub fn power_vs_snr(config: &ExperimentConfig) -> Result<Table> {
    let unit = Scenario {
        transmit_power: 1.0,
        ..config.scenario
    };
    let per_watt = link_factor(&unit) / unit.noise_power;
    let mut table = Table::new("power_vs_snr", vec!["snr_db", "M", "echo_power_watts"]);
    for &snr_db in &config.power.snr_grid_db {
        let scenario = Scenario {
            transmit_power: from_db(snr_db) / per_watt,
            ..config.scenario
        };
        for &m in &config.power.m_list {
            let p = received_power(&scenario, &IrsProfile::aligned_unit(m));
            table.rows.push(vec![num(snr_db), m.to_string(), num(p)]);
        }
    }
    Ok(table)
}

/// Detection probability versus number of sub-surfaces, one curve per false
/// alarm probability.
pub fn pd_vs_m(config: &ExperimentConfig) -> Result<Table> {
    let mut table = Table::new("pd_vs_m", vec!["M", "pfa", "pd"]);
    for &pfa in &config.detection.pfa_list {
        let curve = pd_vs_m_curve(&config.scenario, &config.irs.m_grid, pfa, config.detection.processing_gain)?;
        for (&m, pd) in config.irs.m_grid.iter().zip(&curve.pd_values) {
            table.rows.push(vec![m.to_string(), num(pfa), num(*pd)]);
        }
    }
    Ok(table)
}

/// Empirical range MSE and range CRLB versus per-sample SNR (no IRS gain),
/// for phase-aligned unit IRS profiles of each size in `estimator.m_list`.
pub fn mmse_vs_snr(config: &ExperimentConfig) -> Result<Table> {
    let est = &config.estimator;
    let frame = &config.frame;
    let mut table = Table::new("mmse_vs_snr", vec!["snr_db", "M", "mse_m2", "crlb_m2"]);
    for &m in &est.m_list {
        let h = sensing_channel(&IrsProfile::aligned_unit(m));
        let settings = SweepSettings {
            snr_grid_db: est.snr_grid_db.clone(),
            padding_factor: est.padding_factor,
            trials: est.trials,
            seed: child_seed(config.seed, m as u64),
        };
        let mse = mse_sweep(frame, &config.scenario, h, &settings)?;
        for (&snr_db, mse) in est.snr_grid_db.iter().zip(mse) {
            let crlb = crlb_range(
                from_db(snr_db).sqrt(),
                h.norm(),
                frame.n_subcarriers,
                frame.n_symbols,
                frame.subcarrier_spacing,
            )?;
            table.rows.push(vec![num(snr_db), m.to_string(), num(mse), num(crlb)]);
        }
    }
    Ok(table)
}

/// Runs the validation suite and tabulates its outcome.
pub fn validation_table(config: &ExperimentConfig, quick: bool) -> Table {
    let outcomes = validation_suite(&ValidationOptions {
        quick,
        seed: config.seed,
        ..ValidationOptions::default()
    });
    let mut table = Table::new("validate", vec!["check", "passed", "detail"]);
    for o in outcomes {
        table.rows.push(vec![o.name.to_string(), o.passed.to_string(), o.detail]);
    }
    table
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Table> {
    config.validate()?;
    match config.experiment {
        ExperimentKind::SnrVsM => snr_vs_m(config),
        ExperimentKind::PowerVsSnr => power_vs_snr(config),
        ExperimentKind::PdVsM => pd_vs_m(config),
        ExperimentKind::MmseVsSnr => mmse_vs_snr(config),
        ExperimentKind::Validate => Ok(validation_table(config, false)),
    }
}

/// Files written by [`write_outputs`].
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub csv: PathBuf,
    pub meta: PathBuf,
    pub plot: Option<PathBuf>,
}

/// Writes `<name>.csv`, the `<name>.meta` sidecar and optionally `<name>.svg`.
pub fn write_outputs(
    table: &Table,
    config: &ExperimentConfig,
    dir: &Path,
    plots: bool,
) -> io::Result<Artifacts> {
    fs::create_dir_all(dir)?;
    let csv = dir.join(format!("{}.csv", table.name));
    fs::write(&csv, table.to_csv())?;
    let meta = dir.join(format!("{}.meta", table.name));
    let text: String = config
        .key_values()
        .into_iter()
        .map(|(k, v)| format!("{k}={v}\n"))
        .collect();
    fs::write(&meta, text)?;
    let plot = if plots {
        match plot::render(table) {
            Some(svg) => {
                let path = dir.join(format!("{}.svg", table.name));
                fs::write(&path, svg)?;
                Some(path)
            }
            None => None,
        }
    } else {
        None
    };
    Ok(Artifacts { csv, meta, plot })
}
