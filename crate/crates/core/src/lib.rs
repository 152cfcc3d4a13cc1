//! Simulation of an OFDM integrated sensing and communication (ISAC) radar
//! whose target carries an intelligent reflecting surface (IRS).
//!
//! The crate covers the whole sensing chain on the OFDM symbol matrix:
//!
//! * [`ofdm_frame`] builds 16QAM transmit frames,
//! * [`irs_channel`] models the IRS sensing channel and the delayed, Doppler
//!   shifted, noisy echo,
//! * [`estimator`] recovers range and velocity by element-wise division and
//!   periodogram peak search,
//! * [`link_budget`] evaluates the IRS radar equation and receiver SNR,
//! * [`detection`] holds the CA-CFAR false-alarm/detection statistics plus a
//!   Monte Carlo square-law detector,
//! * [`crlb`] evaluates Fisher information and Cramer-Rao bounds,
//! * [`phase_optimizer`] maximizes the echo SNR over the IRS phase vector,
//! * [`experiments`] drives the config-file experiments and validation suite
//!   behind the `irs-isac` binary.

pub mod crlb;
pub mod detection;
pub mod error;
pub mod estimator;
pub mod experiments;
pub mod irs_channel;
pub mod link_budget;
pub mod ofdm_frame;
pub mod phase_optimizer;
pub mod rng;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
