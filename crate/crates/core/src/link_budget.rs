//! Radar equation for an IRS-equipped target.

use std::f64::consts::PI;

use crate::irs_channel::{sensing_channel, IrsProfile, Scenario};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudgetReport {
    /// Transmit power density at the target, W/m^2.
    pub q_t: f64,
    /// Echo power with all sub-surfaces coherently aligned, W.
    pub p_r_ideal: f64,
    /// Echo power for the profile as given, W.
    pub p_r: f64,
    pub snr_linear: f64,
    pub snr_db: f64,
}

/// `P_t G / (4 pi R^2)`.
pub fn transmit_power_density(scenario: &Scenario) -> f64 {
    scenario.transmit_power * scenario.antenna_gain / (4.0 * PI * scenario.range.powi(2))
}

/// Profile-independent part of the echo power,
/// `P_t G^2 sigma lambda^2 / ((4 pi)^3 R^4 L)`.
pub fn link_factor(scenario: &Scenario) -> f64 {
    scenario.transmit_power
        * scenario.antenna_gain.powi(2)
        * scenario.rcs
        * scenario.wavelength().powi(2)
        / ((4.0 * PI).powi(3) * scenario.range.powi(4) * scenario.path_loss_factor)
}

/// Echo power `link_factor * |H_M|^2`, W.
pub fn received_power(scenario: &Scenario, profile: &IrsProfile) -> f64 {
    link_factor(scenario) * sensing_channel(profile).norm_sqr()
}

/// Echo power with every sub-surface phase aligned, W.
pub fn received_power_ideal(scenario: &Scenario, profile: &IrsProfile) -> f64 {
    link_factor(scenario) * profile.coherent_amplitude().powi(2)
}

/// gamma = P_r / N_0.
pub fn receiver_snr(scenario: &Scenario, profile: &IrsProfile) -> f64 {
    received_power(scenario, profile) / scenario.noise_power
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Full chain for one profile. `processing_gain` multiplies the SNR (use 1.0
/// for the bare receiver SNR, `N_c * N_sym` to include coherent integration).
pub fn link_budget(scenario: &Scenario, profile: &IrsProfile, processing_gain: f64) -> LinkBudgetReport {
    let p_r = received_power(scenario, profile);
    let snr_linear = p_r / scenario.noise_power * processing_gain;
    LinkBudgetReport {
        q_t: transmit_power_density(scenario),
        p_r_ideal: received_power_ideal(scenario, profile),
        p_r,
        snr_linear,
        snr_db: to_db(snr_linear),
    }
}
