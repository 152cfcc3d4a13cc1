//! IRS sensing channel and echo synthesis on the symbol matrix.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::ofdm_frame::{FrameConfig, SymbolMatrix};
use crate::rng::stream_rng;
use crate::SPEED_OF_LIGHT;

/// Per-sub-surface coefficients of an IRS with `M` sub-surfaces.
///
/// `beta`/`phi` describe the propagation path through sub-surface `m`,
/// `alpha`/`theta` the reflection the surface applies.
#[derive(Debug, Clone, PartialEq)]
pub struct IrsProfile {
    pub beta: Vec<f64>,
    pub phi: Vec<f64>,
    pub alpha: Vec<f64>,
    pub theta: Vec<f64>,
}

impl IrsProfile {
    pub fn new(beta: Vec<f64>, phi: Vec<f64>, alpha: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        let profile = Self {
            beta,
            phi,
            alpha,
            theta,
        };
        profile.validate()?;
        Ok(profile)
    }

    /// `beta = alpha = 1`, all phases zero (so `theta == phi`).
    pub fn aligned_unit(m: usize) -> Self {
        Self {
            beta: vec![1.0; m],
            phi: vec![0.0; m],
            alpha: vec![1.0; m],
            theta: vec![0.0; m],
        }
    }

    /// Random propagation path: `beta ~ U[beta_min, 1]`, `phi ~ U[0, 2pi)`,
    /// unit reflection amplitude and `theta = 0`.
    pub fn random_propagation(m: usize, beta_min: f64, seed: u64) -> Self {
        let mut rng = stream_rng(seed, 0);
        let beta = (0..m)
            .map(|_| {
                if beta_min < 1.0 {
                    rng.random_range(beta_min..=1.0)
                } else {
                    1.0
                }
            })
            .collect();
        let phi = (0..m).map(|_| rng.random_range(0.0..TAU)).collect();
        Self {
            beta,
            phi,
            alpha: vec![1.0; m],
            theta: vec![0.0; m],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.beta.len();
        if m == 0 {
            return Err(Error::config("irs.m", "profile needs at least one sub-surface"));
        }
        for (key, len) in [
            ("irs.phi", self.phi.len()),
            ("irs.alpha", self.alpha.len()),
            ("irs.theta", self.theta.len()),
        ] {
            if len != m {
                return Err(Error::config(key, format!("length {len} differs from M = {m}")));
            }
        }
        if let Some(b) = self.beta.iter().find(|b| !(**b >= 0.0 && b.is_finite())) {
            return Err(Error::config("irs.beta", format!("{b} is not a finite value >= 0")));
        }
        if let Some(a) = self.alpha.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(Error::config("irs.alpha", format!("{a} outside [0, 1]")));
        }
        if self.phi.iter().chain(&self.theta).any(|p| !p.is_finite()) {
            return Err(Error::config("irs.theta", "phases must be finite"));
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.beta.len()
    }

    /// Copy with `theta = phi`, the phase-aligned configuration.
    pub fn aligned(&self) -> Self {
        Self {
            theta: self.phi.clone(),
            ..self.clone()
        }
    }

    pub fn with_theta(&self, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} phases", self.m()),
                actual: format!("{} phases", theta.len()),
            });
        }
        Ok(Self {
            theta,
            ..self.clone()
        })
    }

    /// Effective per-sub-surface amplitude `beta_m * alpha_m`.
    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.beta.iter().zip(&self.alpha).map(|(b, a)| b * a)
    }

    /// `sum_m beta_m * alpha_m`, the magnitude of the aligned channel.
    pub fn coherent_amplitude(&self) -> f64 {
        self.weights().sum()
    }
}

/// Physical link parameters of the monostatic radar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    /// Target range R, m.
    pub range: f64,
    /// Radial velocity, m/s (positive closes the Doppler phase upward).
    pub velocity: f64,
    /// P_t, W.
    pub transmit_power: f64,
    /// G, linear.
    pub antenna_gain: f64,
    /// Radar cross section, m^2.
    pub rcs: f64,
    /// f_c, Hz.
    pub carrier_frequency: f64,
    /// L >= 1.
    pub path_loss_factor: f64,
    /// N_0, W.
    pub noise_power: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let checks: [(&str, bool, &str); 7] = [
            ("scenario.range", self.range > 0.0 && self.range.is_finite(), "must be positive"),
            ("scenario.velocity", self.velocity.is_finite(), "must be finite"),
            ("scenario.transmit_power", self.transmit_power > 0.0, "must be positive"),
            ("scenario.antenna_gain", self.antenna_gain > 0.0, "must be positive"),
            ("scenario.rcs", self.rcs > 0.0, "must be positive"),
            ("scenario.path_loss_factor", self.path_loss_factor >= 1.0, "must be >= 1"),
            ("scenario.noise_power", self.noise_power > 0.0, "must be positive"),
        ];
        for (key, ok, reason) in checks {
            if !ok {
                return Err(Error::config(key, reason));
            }
        }
        if !(self.carrier_frequency > 0.0 && self.carrier_frequency.is_finite()) {
            return Err(Error::config("scenario.carrier_frequency", "must be positive"));
        }
        Ok(())
    }

    /// lambda = c_0 / f_c.
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency
    }

    /// Round-trip delay 2R/c_0, s.
    pub fn delay(&self) -> f64 {
        2.0 * self.range / SPEED_OF_LIGHT
    }

    /// Doppler shift 2 v f_c / c_0, Hz.
    pub fn doppler_shift(&self) -> f64 {
        2.0 * self.velocity * self.carrier_frequency / SPEED_OF_LIGHT
    }
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            range: 50.0,
            velocity: 20.0,
            transmit_power: 20.0,
            antenna_gain: 1.0,
            rcs: 1.0,
            carrier_frequency: 5.9e9,
            path_loss_factor: 1.0,
            noise_power: 0.8,
        }
    }
}

/// Composite channel `H_M = sum_m beta_m alpha_m e^{j(theta_m - phi_m)}`.
pub fn sensing_channel(profile: &IrsProfile) -> Complex64 {
    profile
        .weights()
        .zip(profile.theta.iter().zip(&profile.phi))
        .map(|(w, (theta, phi))| Complex64::from_polar(w, theta - phi))
        .sum()
}

/// Applies the channel gain `h`, the delay phase ramp across subcarriers and
/// the Doppler phase ramp across symbols:
///
/// `out(n, mu) = d_tx(n, mu) * h * exp(-j 2pi n df 2R/c_0) * exp(+j 2pi mu T 2 v f_c / c_0)`
pub fn apply_echo(
    d_tx: &SymbolMatrix,
    config: &FrameConfig,
    scenario: &Scenario,
    h: Complex64,
) -> Result<SymbolMatrix> {
    d_tx.check_config(config)?;
    let delay_step = -TAU * config.subcarrier_spacing * scenario.delay();
    let doppler_step = TAU * config.symbol_duration * scenario.doppler_shift();
    let delay: Vec<Complex64> = (0..config.n_subcarriers)
        .map(|n| Complex64::from_polar(1.0, delay_step * n as f64))
        .collect();
    Ok(SymbolMatrix::from_fn(config.n_subcarriers, config.n_symbols, |n, mu| {
        let doppler = Complex64::from_polar(1.0, doppler_step * mu as f64);
        d_tx.get(n, mu) * h * delay[n] * doppler
    }))
}

/// Adds circularly-symmetric complex Gaussian noise of `noise_power` per
/// complex sample (half per real component).
pub fn add_noise(d_rx: &SymbolMatrix, noise_power: f64, seed: u64) -> Result<SymbolMatrix> {
    if !(noise_power >= 0.0 && noise_power.is_finite()) {
        return Err(Error::argument(
            "noise_power",
            format!("must be finite and >= 0, got {noise_power}"),
        ));
    }
    let mut out = d_rx.clone();
    if noise_power == 0.0 {
        return Ok(out);
    }
    let sigma = (noise_power / 2.0).sqrt();
    let mut rng = stream_rng(seed, 0);
    for v in out.as_mut_slice() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *v += Complex64::new(re * sigma, im * sigma);
    }
    Ok(out)
}
