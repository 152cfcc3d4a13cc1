//! Sectioned key-value experiment configuration.
//!
//! ```text
//! experiment = pd_vs_m
//! seed = 7
//!
//! [frame]
//! n_subcarriers = 512
//!
//! [irs]
//! m_grid = 1..64          # inclusive range or comma list
//! ```
//!
//! Keys outside any section are `experiment`, `seed` and `output_dir`. Unknown
//! sections or keys are rejected with their line number.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::error::{Error, Result};
use crate::irs_channel::Scenario;
use crate::ofdm_frame::FrameConfig;
use crate::phase_optimizer::OptimizerConfig;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: `{key}`: {message}")]
pub struct ParseError {
    pub line: usize,
    pub key: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    SnrVsM,
    PowerVsSnr,
    PdVsM,
    MmseVsSnr,
    Validate,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::SnrVsM => "snr_vs_m",
            ExperimentKind::PowerVsSnr => "power_vs_snr",
            ExperimentKind::PdVsM => "pd_vs_m",
            ExperimentKind::MmseVsSnr => "mmse_vs_snr",
            ExperimentKind::Validate => "validate",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "snr_vs_m" => ExperimentKind::SnrVsM,
            "power_vs_snr" => ExperimentKind::PowerVsSnr,
            "pd_vs_m" => ExperimentKind::PdVsM,
            "mmse_vs_snr" => ExperimentKind::MmseVsSnr,
            "validate" => ExperimentKind::Validate,
            other => return Err(format!("unknown experiment `{other}`")),
        })
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How the IRS reflection coefficients are set in the SNR-versus-M sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CoefficientMode {
    /// Phases found by the stochastic gradient optimizer.
    Optimal,
    /// Uniformly random phases, SNR averaged over many draws.
    Random,
    /// No IRS: a single unit reflector.
    None,
}

impl CoefficientMode {
    pub fn name(&self) -> &'static str {
        match self {
            CoefficientMode::Optimal => "optimal",
            CoefficientMode::Random => "random",
            CoefficientMode::None => "none",
        }
    }
}

impl FromStr for CoefficientMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "optimal" => CoefficientMode::Optimal,
            "random" => CoefficientMode::Random,
            "none" => CoefficientMode::None,
            other => return Err(format!("unknown coefficient mode `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrsSettings {
    pub m_grid: Vec<usize>,
    pub coefficient_modes: Vec<CoefficientMode>,
    /// Lower bound of the uniform propagation amplitude draw (1 means `beta = 1`).
    pub beta_min: f64,
    pub random_draws: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionSettings {
    pub pfa_list: Vec<f64>,
    pub n_ref: usize,
    pub trials: usize,
    /// Multiplier on the receiver SNR before detection (1 = none).
    pub processing_gain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSettings {
    pub padding_factor: usize,
    pub snr_grid_db: Vec<f64>,
    pub trials: usize,
    pub m_list: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSettings {
    pub snr_grid_db: Vec<f64>,
    pub m_list: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub frame: FrameConfig,
    pub scenario: Scenario,
    pub irs: IrsSettings,
    pub detection: DetectionSettings,
    pub estimator: EstimatorSettings,
    pub power: PowerSettings,
    pub optimizer: OptimizerConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let frame = FrameConfig::reference();
        Self {
            experiment: ExperimentKind::SnrVsM,
            seed: 2022,
            output_dir: PathBuf::from("results"),
            frame,
            scenario: Scenario {
                range: 10.0,
                velocity: 20.0,
                transmit_power: 20.0,
                antenna_gain: 1000.0,
                rcs: 10.0,
                carrier_frequency: frame.carrier_frequency,
                path_loss_factor: 1.0,
                noise_power: 0.8,
            },
            irs: IrsSettings {
                m_grid: (1..=64).collect(),
                coefficient_modes: vec![CoefficientMode::Optimal, CoefficientMode::Random, CoefficientMode::None],
                beta_min: 1.0,
                random_draws: 1000,
            },
            detection: DetectionSettings {
                pfa_list: vec![1e-2, 1e-4, 1e-6],
                n_ref: 16,
                trials: 100_000,
                processing_gain: 1.0,
            },
            estimator: EstimatorSettings {
                padding_factor: 8,
                snr_grid_db: vec![-36.0, -31.0, -26.0, -21.0, -16.0, -11.0],
                trials: 1000,
                m_list: vec![1, 4, 16],
            },
            power: PowerSettings {
                snr_grid_db: (0..=6).map(|i| 5.0 * i as f64).collect(),
                m_list: vec![1, 4, 16, 64],
            },
            optimizer: OptimizerConfig::default(),
        }
    }
}

fn join<T: fmt::Display>(values: &[T]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        let mut config = Self::default();
        let mut section = String::new();
        let mut seen = BTreeSet::new();
        for (index, raw) in text.lines().enumerate() {
            let line_no = index + 1;
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| ParseError {
                    line: line_no,
                    key: line.to_string(),
                    message: "unterminated section header".into(),
                })?;
                section = name.trim().to_string();
                if !["frame", "scenario", "irs", "detection", "estimator", "power", "optimizer"]
                    .contains(&section.as_str())
                {
                    return Err(ParseError {
                        line: line_no,
                        key: section,
                        message: "unknown section".into(),
                    });
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ParseError {
                line: line_no,
                key: line.to_string(),
                message: "expected `key = value`".into(),
            })?;
            let key = key.trim();
            let full_key = if section.is_empty() {
                key.to_string()
            } else {
                format!("{section}.{key}")
            };
            if !seen.insert(full_key.clone()) {
                return Err(ParseError {
                    line: line_no,
                    key: full_key,
                    message: "duplicate key".into(),
                });
            }
            config
                .assign(&full_key, value.trim())
                .map_err(|message| ParseError {
                    line: line_no,
                    key: full_key.clone(),
                    message,
                })?;
        }
        config.scenario.carrier_frequency = config.frame.carrier_frequency;
        Ok(config)
    }

    fn assign(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "experiment" => self.experiment = value.parse()?,
            "seed" => self.seed = scalar(value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),

            "frame.n_subcarriers" => self.frame.n_subcarriers = scalar(value)?,
            "frame.n_symbols" => self.frame.n_symbols = scalar(value)?,
            "frame.subcarrier_spacing" => self.frame.subcarrier_spacing = scalar(value)?,
            "frame.symbol_duration" => self.frame.symbol_duration = scalar(value)?,
            "frame.carrier_frequency" => self.frame.carrier_frequency = scalar(value)?,

            "scenario.range" => self.scenario.range = scalar(value)?,
            "scenario.velocity" => self.scenario.velocity = scalar(value)?,
            "scenario.transmit_power" => self.scenario.transmit_power = scalar(value)?,
            "scenario.antenna_gain" => self.scenario.antenna_gain = scalar(value)?,
            "scenario.rcs" => self.scenario.rcs = scalar(value)?,
            "scenario.path_loss_factor" => self.scenario.path_loss_factor = scalar(value)?,
            "scenario.noise_power" => self.scenario.noise_power = scalar(value)?,

            "irs.m_grid" => self.irs.m_grid = int_grid(value)?,
            "irs.coefficient_mode" => self.irs.coefficient_modes = list(value)?,
            "irs.beta_min" => self.irs.beta_min = scalar(value)?,
            "irs.random_draws" => self.irs.random_draws = scalar(value)?,

            "detection.pfa_list" => self.detection.pfa_list = list(value)?,
            "detection.n_ref" => self.detection.n_ref = scalar(value)?,
            "detection.trials" => self.detection.trials = scalar(value)?,
            "detection.processing_gain" => self.detection.processing_gain = scalar(value)?,

            "estimator.padding_factor" => self.estimator.padding_factor = scalar(value)?,
            "estimator.snr_grid_db" => self.estimator.snr_grid_db = list(value)?,
            "estimator.trials" => self.estimator.trials = scalar(value)?,
            "estimator.m_list" => self.estimator.m_list = int_grid(value)?,

            "power.snr_grid_db" => self.power.snr_grid_db = list(value)?,
            "power.m_list" => self.power.m_list = int_grid(value)?,

            "optimizer.learning_rate" => self.optimizer.learning_rate = scalar(value)?,
            "optimizer.max_iterations" => self.optimizer.max_iterations = scalar(value)?,
            "optimizer.minibatch_size" => {
                self.optimizer.minibatch_size = if value == "auto" { None } else { Some(scalar(value)?) }
            }
            "optimizer.tolerance_db" => self.optimizer.tolerance_db = scalar(value)?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Checks every sub-configuration; the error names the offending key.
    pub fn validate(&self) -> Result<()> {
        self.frame.validate().map_err(|e| prefix(e, "frame."))?;
        self.scenario.validate()?;
        self.optimizer.validate()?;
        check_grid("irs.m_grid", &self.irs.m_grid)?;
        check_grid("estimator.m_list", &self.estimator.m_list)?;
        check_grid("power.m_list", &self.power.m_list)?;
        if self.irs.coefficient_modes.is_empty() {
            return Err(Error::config("irs.coefficient_mode", "must list at least one mode"));
        }
        if !(self.irs.beta_min > 0.0 && self.irs.beta_min <= 1.0) {
            return Err(Error::config("irs.beta_min", "must lie in (0, 1]"));
        }
        if self.irs.random_draws < 1 {
            return Err(Error::config("irs.random_draws", "must be positive"));
        }
        if self.detection.pfa_list.is_empty() || self.detection.pfa_list.iter().any(|p| !(*p > 0.0 && *p < 1.0)) {
            return Err(Error::config("detection.pfa_list", "needs probabilities in (0, 1)"));
        }
        if self.detection.n_ref < 1 {
            return Err(Error::config("detection.n_ref", "must be positive"));
        }
        if self.detection.trials < 1000 {
            return Err(Error::config("detection.trials", "must be at least 1000"));
        }
        if !(self.detection.processing_gain >= 1.0) {
            return Err(Error::config("detection.processing_gain", "must be >= 1"));
        }
        if self.estimator.padding_factor < 1 {
            return Err(Error::config("estimator.padding_factor", "must be positive"));
        }
        if self.estimator.trials < 1 {
            return Err(Error::config("estimator.trials", "must be positive"));
        }
        if self.estimator.snr_grid_db.is_empty() || self.estimator.snr_grid_db.iter().any(|v| v.is_nan()) {
            return Err(Error::config("estimator.snr_grid_db", "needs at least one SNR value"));
        }
        if self.power.snr_grid_db.is_empty() || self.power.snr_grid_db.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("power.snr_grid_db", "needs finite SNR values"));
        }
        Ok(())
    }

    /// Resolved configuration as `key = value` pairs, in a fixed order.
    pub fn key_values(&self) -> Vec<(String, String)> {
        let modes: Vec<&str> = self.irs.coefficient_modes.iter().map(|m| m.name()).collect();
        let f = &self.frame;
        let s = &self.scenario;
        let o = &self.optimizer;
        let kv = |k: &str, v: String| (k.to_string(), v);
        vec![
            kv("experiment", self.experiment.to_string()),
            kv("seed", self.seed.to_string()),
            kv("output_dir", self.output_dir.display().to_string()),
            kv("frame.n_subcarriers", f.n_subcarriers.to_string()),
            kv("frame.n_symbols", f.n_symbols.to_string()),
            kv("frame.subcarrier_spacing", f.subcarrier_spacing.to_string()),
            kv("frame.symbol_duration", f.symbol_duration.to_string()),
            kv("frame.carrier_frequency", f.carrier_frequency.to_string()),
            kv("scenario.range", s.range.to_string()),
            kv("scenario.velocity", s.velocity.to_string()),
            kv("scenario.transmit_power", s.transmit_power.to_string()),
            kv("scenario.antenna_gain", s.antenna_gain.to_string()),
            kv("scenario.rcs", s.rcs.to_string()),
            kv("scenario.path_loss_factor", s.path_loss_factor.to_string()),
            kv("scenario.noise_power", s.noise_power.to_string()),
            kv("irs.m_grid", join(&self.irs.m_grid)),
            kv("irs.coefficient_mode", modes.join(", ")),
            kv("irs.beta_min", self.irs.beta_min.to_string()),
            kv("irs.random_draws", self.irs.random_draws.to_string()),
            kv("detection.pfa_list", join(&self.detection.pfa_list)),
            kv("detection.n_ref", self.detection.n_ref.to_string()),
            kv("detection.trials", self.detection.trials.to_string()),
            kv("detection.processing_gain", self.detection.processing_gain.to_string()),
            kv("estimator.padding_factor", self.estimator.padding_factor.to_string()),
            kv("estimator.snr_grid_db", join(&self.estimator.snr_grid_db)),
            kv("estimator.trials", self.estimator.trials.to_string()),
            kv("estimator.m_list", join(&self.estimator.m_list)),
            kv("power.snr_grid_db", join(&self.power.snr_grid_db)),
            kv("power.m_list", join(&self.power.m_list)),
            kv("optimizer.learning_rate", o.learning_rate.to_string()),
            kv("optimizer.max_iterations", o.max_iterations.to_string()),
            kv(
                "optimizer.minibatch_size",
                o.minibatch_size.map_or("auto".to_string(), |b| b.to_string()),
            ),
            kv("optimizer.tolerance_db", o.tolerance_db.to_string()),
        ]
    }
}

fn prefix(error: Error, p: &str) -> Error {
    match error {
        Error::InvalidConfig { key, reason } => Error::InvalidConfig {
            key: format!("{p}{key}"),
            reason,
        },
        other => other,
    }
}

fn check_grid(key: &str, grid: &[usize]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::config(key, "must not be empty"));
    }
    if grid.contains(&0) {
        return Err(Error::config(key, "entries must be >= 1"));
    }
    Ok(())
}

fn scalar<T: FromStr>(value: &str) -> std::result::Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("cannot parse `{value}` as {}", std::any::type_name::<T>()))
}

fn list<T: FromStr>(value: &str) -> std::result::Result<Vec<T>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(scalar)
        .collect()
}

/// Comma list of integers and inclusive `a..b` ranges.
fn int_grid(value: &str) -> std::result::Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for item in value.split(',').map(str::trim).filter(|v| !v.is_empty()) {
        match item.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi): (usize, usize) = (scalar(lo.trim())?, scalar(hi.trim().trim_start_matches('='))?);
                if lo > hi {
                    return Err(format!("empty range `{item}`"));
                }
                out.extend(lo..=hi);
            }
            None => out.push(scalar(item)?),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(ExperimentConfig::parse("").unwrap(), ExperimentConfig::default());
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn parses_sections_lists_and_ranges() {
        let text = "experiment = pd_vs_m\nseed = 9 # comment\n\n[irs]\nm_grid = 1..4, 8\ncoefficient_mode = optimal, none\n[detection]\npfa_list = 0.1, 1e-3\n";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.experiment, ExperimentKind::PdVsM);
        assert_eq!(c.seed, 9);
        assert_eq!(c.irs.m_grid, vec![1, 2, 3, 4, 8]);
        assert_eq!(c.irs.coefficient_modes, vec![CoefficientMode::Optimal, CoefficientMode::None]);
        assert_eq!(c.detection.pfa_list, vec![0.1, 1e-3]);
    }

    #[test]
    fn errors_carry_line_and_key() {
        let e = ExperimentConfig::parse("seed = 1\n[frame]\nn_symbols = twelve\n").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (3, "frame.n_symbols"));
        let e = ExperimentConfig::parse("[frame]\nbogus = 1\n").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (2, "frame.bogus"));
        let e = ExperimentConfig::parse("[nope]\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = ExperimentConfig::parse("seed = 1\nseed = 2\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(ExperimentConfig::parse("just words\n").is_err());
    }

    #[test]
    fn invariant_violations_name_key() {
        let c = ExperimentConfig::parse("[frame]\nn_subcarriers = 1\n").unwrap();
        match c.validate().unwrap_err() {
            Error::InvalidConfig { key, .. } => assert_eq!(key, "frame.n_subcarriers"),
            other => panic!("{other:?}"),
        }
        let c = ExperimentConfig::parse("[irs]\nm_grid = 0, 1\n").unwrap();
        assert!(matches!(c.validate(), Err(Error::InvalidConfig { key, .. }) if key == "irs.m_grid"));
    }

    #[test]
    fn key_values_round_trip() {
        let c = ExperimentConfig::parse("experiment = mmse_vs_snr\n[optimizer]\nminibatch_size = 3\n").unwrap();
        let text: String = c.key_values().iter().fold(String::new(), |mut acc, (k, v)| {
            let (section, key) = k.split_once('.').map_or(("", k.as_str()), |(s, k)| (s, k));
            acc.push_str(&format!("[{section}]\n{key} = {v}\n").replace("[]\n", ""));
            acc
        });
        // repeated section headers are fine for the parser
        let back = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(back, c);
    }
}
