//! Range/velocity recovery from the received symbol matrix.
//!
//! The transmitted symbols are divided out element-wise, leaving a pure delay
//! ramp along subcarriers and a Doppler ramp along symbols. A zero-padded
//! inverse DFT over each symbol column gives the range profile, a zero-padded
//! DFT over each subcarrier row the velocity profile. Profiles of all columns
//! (rows) are averaged in power and the peak index is converted to physical
//! units.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::irs_channel::{add_noise, apply_echo, Scenario};
use crate::link_budget::from_db;
use crate::ofdm_frame::{build_frame, FrameConfig, ModulationWeight, SymbolMatrix};
use crate::rng::child_seed;
use crate::SPEED_OF_LIGHT;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationResult {
    pub range_estimate: f64,
    pub velocity_estimate: f64,
    pub range_bin: usize,
    /// Raw index into the velocity profile (before sign folding).
    pub velocity_bin: usize,
    /// Square root of the peak of the range power profile.
    pub peak_magnitude: f64,
    pub padding_factor: usize,
}

/// Element-wise `d_rx / d_tx`.
pub fn divide(d_rx: &SymbolMatrix, d_tx: &SymbolMatrix) -> Result<SymbolMatrix> {
    d_rx.check_dims(d_tx.n_subcarriers(), d_tx.n_symbols())?;
    if let Some((subcarrier, symbol, _)) = d_tx.indexed().find(|(_, _, v)| v.norm_sqr() == 0.0) {
        return Err(Error::ZeroTransmitSymbol { subcarrier, symbol });
    }
    let data = d_rx
        .as_slice()
        .iter()
        .zip(d_tx.as_slice())
        .map(|(rx, tx)| rx / tx)
        .collect();
    SymbolMatrix::from_columns(d_tx.n_subcarriers(), d_tx.n_symbols(), data)
}

/// Width of one padded range bin, m.
pub fn range_bin_width(config: &FrameConfig, padding_factor: usize) -> f64 {
    SPEED_OF_LIGHT / (2.0 * config.subcarrier_spacing * (padding_factor * config.n_subcarriers) as f64)
}

/// Width of one padded velocity bin, m/s.
pub fn velocity_bin_width(config: &FrameConfig, padding_factor: usize) -> f64 {
    SPEED_OF_LIGHT
        / (2.0
            * config.carrier_frequency
            * (padding_factor * config.n_symbols) as f64
            * config.symbol_duration)
}

/// Largest unambiguous range `c_0 / (2 df)`, m.
pub fn max_unambiguous_range(config: &FrameConfig) -> f64 {
    SPEED_OF_LIGHT / (2.0 * config.subcarrier_spacing)
}

/// Largest unambiguous speed `c_0 / (4 f_c T)`, m/s.
pub fn max_unambiguous_velocity(config: &FrameConfig) -> f64 {
    SPEED_OF_LIGHT / (4.0 * config.carrier_frequency * config.symbol_duration)
}

/// First index of the maximum.
pub fn peak_index(profile: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in profile.iter().enumerate() {
        if v > profile[best] {
            best = i;
        }
    }
    best
}

/// Planned transforms for a fixed frame size and padding factor.
pub struct Periodogram {
    n_subcarriers: usize,
    n_symbols: usize,
    padding_factor: usize,
    range_fft: Arc<dyn Fft<f64>>,
    velocity_fft: Arc<dyn Fft<f64>>,
}

impl Periodogram {
    pub fn new(n_subcarriers: usize, n_symbols: usize, padding_factor: usize) -> Result<Self> {
        if padding_factor < 1 {
            return Err(Error::argument("padding_factor", "must be at least 1"));
        }
        if n_subcarriers == 0 || n_symbols == 0 {
            return Err(Error::argument("d_div", "matrix is empty"));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n_subcarriers,
            n_symbols,
            padding_factor,
            range_fft: planner.plan_fft_inverse(padding_factor * n_subcarriers),
            velocity_fft: planner.plan_fft_forward(padding_factor * n_symbols),
        })
    }

    pub fn for_config(config: &FrameConfig, padding_factor: usize) -> Result<Self> {
        Self::new(config.n_subcarriers, config.n_symbols, padding_factor)
    }

    pub fn padding_factor(&self) -> usize {
        self.padding_factor
    }

    /// Power profile of length `padding * N_c`, averaged over symbols. The
    /// transform is unitary, so with padding 1 the profile sums to the mean
    /// column energy.
    pub fn range_profile(&self, d_div: &SymbolMatrix) -> Result<Vec<f64>> {
        d_div.check_dims(self.n_subcarriers, self.n_symbols)?;
        let len = self.range_fft.len();
        let columns = (0..self.n_symbols).map(|mu| d_div.column(mu).iter().copied());
        Ok(self.averaged_power(&*self.range_fft, len, columns))
    }

    /// Power profile of length `padding * N_sym`, averaged over subcarriers.
    pub fn velocity_profile(&self, d_div: &SymbolMatrix) -> Result<Vec<f64>> {
        d_div.check_dims(self.n_subcarriers, self.n_symbols)?;
        let len = self.velocity_fft.len();
        let rows = (0..self.n_subcarriers).map(|n| d_div.row(n));
        Ok(self.averaged_power(&*self.velocity_fft, len, rows))
    }

    fn averaged_power<I, S>(&self, fft: &dyn Fft<f64>, len: usize, sequences: I) -> Vec<f64>
    where
        I: Iterator<Item = S>,
        S: Iterator<Item = Complex64>,
    {
        let mut buffer = vec![Complex64::new(0.0, 0.0); len];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let mut power = vec![0.0; len];
        let mut count = 0usize;
        for seq in sequences {
            buffer.fill(Complex64::new(0.0, 0.0));
            for (slot, v) in buffer.iter_mut().zip(seq) {
                *slot = v;
            }
            fft.process_with_scratch(&mut buffer, &mut scratch);
            for (p, v) in power.iter_mut().zip(&buffer) {
                *p += v.norm_sqr();
            }
            count += 1;
        }
        let norm = 1.0 / (len as f64 * count as f64);
        power.iter_mut().for_each(|p| *p *= norm);
        power
    }

    /// Range estimate only (used by the Monte Carlo sweep).
    pub fn estimate_range(&self, d_div: &SymbolMatrix, config: &FrameConfig) -> Result<f64> {
        let bin = peak_index(&self.range_profile(d_div)?);
        Ok(bin as f64 * range_bin_width(config, self.padding_factor))
    }

    pub fn estimate(&self, d_div: &SymbolMatrix, config: &FrameConfig) -> Result<EstimationResult> {
        d_div.check_config(config)?;
        let range = self.range_profile(d_div)?;
        let velocity = self.velocity_profile(d_div)?;
        let range_bin = peak_index(&range);
        let velocity_bin = peak_index(&velocity);
        let len = velocity.len();
        let signed_bin = if 2 * velocity_bin > len {
            velocity_bin as f64 - len as f64
        } else {
            velocity_bin as f64
        };
        Ok(EstimationResult {
            range_estimate: range_bin as f64 * range_bin_width(config, self.padding_factor),
            velocity_estimate: signed_bin * velocity_bin_width(config, self.padding_factor),
            range_bin,
            velocity_bin,
            peak_magnitude: range[range_bin].sqrt(),
            padding_factor: self.padding_factor,
        })
    }
}

pub fn range_profile(d_div: &SymbolMatrix, padding_factor: usize) -> Result<Vec<f64>> {
    Periodogram::new(d_div.n_subcarriers(), d_div.n_symbols(), padding_factor)?.range_profile(d_div)
}

pub fn velocity_profile(d_div: &SymbolMatrix, padding_factor: usize) -> Result<Vec<f64>> {
    Periodogram::new(d_div.n_subcarriers(), d_div.n_symbols(), padding_factor)?.velocity_profile(d_div)
}

pub fn estimate(d_div: &SymbolMatrix, config: &FrameConfig, padding_factor: usize) -> Result<EstimationResult> {
    Periodogram::for_config(config, padding_factor)?.estimate(d_div, config)
}

/// Monte Carlo settings for [`mse_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    /// Per-sample SNR without IRS gain, dB. `f64::INFINITY` runs noiseless.
    pub snr_grid_db: Vec<f64>,
    pub padding_factor: usize,
    pub trials: usize,
    pub seed: u64,
}

/// Empirical mean squared range error per SNR point.
///
/// Each trial draws a fresh payload and noise realization from
/// `(seed, trial)`; the same realization is reused at every SNR point. The
/// transmit weight is `A = sqrt(snr)` and the noise has unit power, so the
/// per-entry SNR of the divided matrix is `A^2 |h|^2 |d|^2`.
pub fn mse_sweep(
    config: &FrameConfig,
    scenario: &Scenario,
    channel: Complex64,
    settings: &SweepSettings,
) -> Result<Vec<f64>> {
    config.validate()?;
    if settings.trials < 1 {
        return Err(Error::argument("trials", "must be at least 1"));
    }
    if settings.snr_grid_db.iter().any(|s| s.is_nan()) {
        return Err(Error::argument("snr_grid_db", "contains NaN"));
    }
    let periodogram = Periodogram::for_config(config, settings.padding_factor)?;
    let grid: Vec<(ModulationWeight, f64)> = settings
        .snr_grid_db
        .iter()
        .map(|&db| {
            let snr = from_db(db);
            if snr.is_infinite() {
                Ok((ModulationWeight::default(), 0.0))
            } else {
                ModulationWeight::real(snr.sqrt()).map(|w| (w, 1.0))
            }
        })
        .collect::<Result<_>>()?;

    let per_trial: Vec<Vec<f64>> = (0..settings.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = child_seed(settings.seed, trial);
            let payload_seed = child_seed(trial_seed, 0);
            let noise_seed = child_seed(trial_seed, 1);
            grid.iter()
                .map(|&(weight, noise_power)| {
                    let tx = build_frame(config, &[], weight, payload_seed)?;
                    let echo = apply_echo(&tx, config, scenario, channel)?;
                    let rx = add_noise(&echo, noise_power, noise_seed)?;
                    let r_hat = periodogram.estimate_range(&divide(&rx, &tx)?, config)?;
                    Ok((r_hat - scenario.range).powi(2))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;

    // fixed summation order keeps the result independent of scheduling
    let mut sums = vec![0.0; grid.len()];
    for errors in &per_trial {
        for (s, e) in sums.iter_mut().zip(errors) {
            *s += e;
        }
    }
    Ok(sums.into_iter().map(|s| s / settings.trials as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::irs_channel::add_noise;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn echo_div(config: &FrameConfig, range: f64, velocity: f64, seed: u64) -> SymbolMatrix {
        let tx = build_frame(config, &[], ModulationWeight::default(), seed).unwrap();
        let scenario = Scenario {
            range,
            velocity,
            carrier_frequency: config.carrier_frequency,
            ..Scenario::default()
        };
        let rx = apply_echo(&tx, config, &scenario, one()).unwrap();
        divide(&rx, &tx).unwrap()
    }

    fn brute_force_argmax(v: &[f64]) -> usize {
        let max = v.iter().cloned().fold(f64::MIN, f64::max);
        v.iter().position(|&x| x == max).unwrap()
    }

    #[test]
    fn self_division_is_ones() {
        let tx = build_frame(&FrameConfig::reference(), &[], ModulationWeight::default(), 3).unwrap();
        let div = divide(&tx, &tx).unwrap();
        assert!(div.as_slice().iter().all(|v| (v - one()).norm() < 1e-15));
    }

    #[test]
    fn noiseless_division_has_unit_magnitude() {
        let div = echo_div(&FrameConfig::reference(), 123.0, -17.0, 4);
        assert!(div.as_slice().iter().all(|v| (v.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn division_reports_zero_symbol() {
        let mut tx = SymbolMatrix::from_fn(4, 3, |_, _| one());
        tx.set(2, 1, Complex64::new(0.0, 0.0));
        let rx = SymbolMatrix::from_fn(4, 3, |_, _| one());
        assert_eq!(
            divide(&rx, &tx).unwrap_err(),
            Error::ZeroTransmitSymbol {
                subcarrier: 2,
                symbol: 1
            }
        );
        assert!(divide(&SymbolMatrix::zeros(4, 2), &tx).is_err());
    }

    #[test]
    fn division_is_payload_independent() {
        let config = FrameConfig::reference();
        let a = echo_div(&config, 75.0, 12.0, 1);
        let b = echo_div(&config, 75.0, 12.0, 2);
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_range_peaks_at_zero() {
        let div = echo_div(&FrameConfig::reference(), 0.0, 0.0, 1);
        assert_eq!(peak_index(&range_profile(&div, 4).unwrap()), 0);
        assert_eq!(peak_index(&velocity_profile(&div, 4).unwrap()), 0);
    }

    #[test]
    fn integer_bin_targets() {
        let config = FrameConfig::reference();
        let r = 3.0 * SPEED_OF_LIGHT / (2.0 * 512.0 * config.subcarrier_spacing);
        let v = 2.0 * SPEED_OF_LIGHT / (2.0 * config.carrier_frequency * 12.0 * config.symbol_duration);
        let div = echo_div(&config, r, v, 1);
        let rp = range_profile(&div, 1).unwrap();
        let vp = velocity_profile(&div, 1).unwrap();
        assert_eq!(peak_index(&rp), 3);
        assert_eq!(brute_force_argmax(&rp), 3);
        assert_eq!(peak_index(&vp), 2);
        assert_eq!(brute_force_argmax(&vp), 2);

        let mirrored = velocity_profile(&echo_div(&config, r, -v, 1), 1).unwrap();
        assert_eq!(peak_index(&mirrored), 12 - 2);
    }

    #[test]
    fn padded_peak_at_hundred_metres() {
        let config = FrameConfig::reference();
        let div = echo_div(&config, 100.0, 0.0, 1);
        let rp = range_profile(&div, 8).unwrap();
        let expected = (2.0 * 100.0 * config.subcarrier_spacing * 8.0 * 512.0 / SPEED_OF_LIGHT).round() as usize;
        assert_eq!(brute_force_argmax(&rp), expected);
        assert_eq!(peak_index(&rp), expected);
    }

    #[test]
    fn end_to_end_noiseless_recovery() {
        let config = FrameConfig::reference();
        let div = echo_div(&config, 60.0, 30.0, 9);
        let est = estimate(&div, &config, 8).unwrap();
        assert!((est.range_estimate - 60.0).abs() <= range_bin_width(&config, 8) / 2.0);
        assert!(range_bin_width(&config, 8) / 2.0 < 0.61);
        assert!((est.velocity_estimate - 30.0).abs() <= velocity_bin_width(&config, 8) / 2.0);
        assert!(est.range_estimate < max_unambiguous_range(&config));
        assert!(est.velocity_estimate.abs() <= max_unambiguous_velocity(&config));
    }

    #[test]
    fn global_scaling_keeps_bins() {
        let config = FrameConfig::reference();
        let div = echo_div(&config, 210.0, -44.0, 2);
        let a = estimate(&div, &config, 8).unwrap();
        let b = estimate(&div.scaled(Complex64::new(-0.3, 2.7)), &config, 8).unwrap();
        assert_eq!((a.range_bin, a.velocity_bin), (b.range_bin, b.velocity_bin));
    }

    #[test]
    fn pure_noise_input_is_total() {
        let config = FrameConfig::reference();
        let noise = add_noise(&SymbolMatrix::zeros(512, 12), 1e-6, 5).unwrap();
        let est = estimate(&noise, &config, 2).unwrap();
        assert!(est.peak_magnitude.is_finite());
        assert!(est.peak_magnitude < 1e-2);
    }

    #[test]
    fn parseval_padding_one() {
        let config = FrameConfig::reference();
        let div = add_noise(&echo_div(&config, 40.0, 5.0, 3), 0.5, 8).unwrap();
        let mean_column_energy = div.energy() / 12.0;
        let mean_row_energy = div.energy() / 512.0;
        let rp: f64 = range_profile(&div, 1).unwrap().iter().sum();
        let vp: f64 = velocity_profile(&div, 1).unwrap().iter().sum();
        assert!((rp / mean_column_energy - 1.0).abs() < 1e-9);
        assert!((vp / mean_row_energy - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_padding_factor_rejected() {
        let div = SymbolMatrix::zeros(4, 2);
        assert!(range_profile(&div, 0).is_err());
    }

    #[test]
    fn noiseless_sweep_hits_quantization_floor() {
        let config = FrameConfig::reference();
        let scenario = Scenario {
            range: 60.0,
            ..Scenario::default()
        };
        let settings = SweepSettings {
            snr_grid_db: vec![f64::INFINITY],
            padding_factor: 8,
            trials: 4,
            seed: 1,
        };
        let mse = mse_sweep(&config, &scenario, one(), &settings).unwrap();
        let w = range_bin_width(&config, 8);
        let floor = (60.0 - (60.0 / w).round() * w).powi(2);
        assert!((mse[0] - floor).abs() < 1e-12);
        assert!(mse[0] <= w * w / 12.0);
    }

    #[test]
    fn sweep_is_deterministic() {
        let config = FrameConfig::new(64, 4, 30e3, 33.3e-6, 5.9e9).unwrap();
        let settings = SweepSettings {
            snr_grid_db: vec![-15.0, 0.0],
            padding_factor: 2,
            trials: 20,
            seed: 77,
        };
        let s = Scenario::default();
        let a = mse_sweep(&config, &s, one(), &settings).unwrap();
        let b = mse_sweep(&config, &s, one(), &settings).unwrap();
        assert_eq!(a, b);
        assert!(mse_sweep(&config, &s, one(), &SweepSettings { trials: 0, ..settings }).is_err());
    }
}
