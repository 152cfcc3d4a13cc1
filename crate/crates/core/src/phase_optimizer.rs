//! IRS phase design: maximize the echo SNR over `theta`.
//!
//! The objective is `link_factor * |S|^2 / N_0` with
//! `S = sum_m beta_m alpha_m e^{j(theta_m - phi_m)}`. Its global maximum is
//! `theta = phi` ([`closed_form_optimum`]); [`optimize`] reaches it by
//! stochastic (random-minibatch) coordinate ascent.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::irs_channel::{sensing_channel, IrsProfile, Scenario};
use crate::link_budget::{link_factor, receiver_snr};
use crate::rng::stream_rng;

/// Halvings tried before an iteration gives up on improving.
const MAX_BACKTRACKS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub learning_rate: f64,
    pub max_iterations: usize,
    /// `None` selects `ceil(M / 4)`.
    pub minibatch_size: Option<usize>,
    pub tolerance_db: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            max_iterations: 2000,
            minibatch_size: None,
            tolerance_db: 0.01,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config("optimizer.learning_rate", "must be positive"));
        }
        if self.max_iterations < 1 {
            return Err(Error::config("optimizer.max_iterations", "must be positive"));
        }
        if self.minibatch_size == Some(0) {
            return Err(Error::config("optimizer.minibatch_size", "must be positive"));
        }
        if !(self.tolerance_db > 0.0) {
            return Err(Error::config("optimizer.tolerance_db", "must be positive"));
        }
        Ok(())
    }

    fn batch_for(&self, m: usize) -> usize {
        self.minibatch_size.unwrap_or(m.div_ceil(4)).clamp(1, m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationTrace {
    pub initial_objective: f64,
    /// Linear SNR after each iteration.
    pub objectives: Vec<f64>,
    pub theta: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
}

impl OptimizationTrace {
    pub fn final_objective(&self) -> f64 {
        self.objectives.last().copied().unwrap_or(self.initial_objective)
    }
}

fn check_len(theta: &[f64], profile: &IrsProfile) -> Result<()> {
    if theta.len() != profile.m() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} phases", profile.m()),
            actual: format!("{} phases", theta.len()),
        });
    }
    Ok(())
}

fn channel_sum(theta: &[f64], profile: &IrsProfile) -> Complex64 {
    profile
        .weights()
        .zip(theta.iter().zip(&profile.phi))
        .map(|(w, (t, p))| Complex64::from_polar(w, t - p))
        .sum()
}

/// Linear SNR with `theta` substituted into the profile.
pub fn objective(theta: &[f64], profile: &IrsProfile, scenario: &Scenario) -> Result<f64> {
    check_len(theta, profile)?;
    Ok(link_factor(scenario) * channel_sum(theta, profile).norm_sqr() / scenario.noise_power)
}

/// Gradient of [`objective`] with respect to `theta`:
/// `-2 c beta_k alpha_k Im(e^{j(theta_k - phi_k)} conj(S))`, `c = link_factor / N_0`.
pub fn gradient(theta: &[f64], profile: &IrsProfile, scenario: &Scenario) -> Result<Vec<f64>> {
    check_len(theta, profile)?;
    let scale = link_factor(scenario) / scenario.noise_power;
    let s = channel_sum(theta, profile);
    Ok(profile
        .weights()
        .zip(theta.iter().zip(&profile.phi))
        .map(|(w, (t, p))| -2.0 * scale * w * (Complex64::from_polar(1.0, t - p) * s.conj()).im)
        .collect())
}

/// `theta = phi` and the aligned SNR.
pub fn closed_form_optimum(profile: &IrsProfile, scenario: &Scenario) -> (Vec<f64>, f64) {
    (profile.phi.clone(), receiver_snr(scenario, &profile.aligned()))
}

fn within_tolerance(value: f64, optimum: f64, tolerance_db: f64) -> bool {
    if optimum <= 0.0 {
        return true;
    }
    value > 0.0 && 10.0 * (optimum / value).log10() <= tolerance_db
}

/// Random-minibatch coordinate ascent from a seeded uniform start.
///
/// Each iteration samples `minibatch_size` phase indices and moves them along
/// their gradient components, each divided by its curvature scale
/// `2 c beta_k alpha_k |S|` so that `learning_rate` is dimensionless. A step
/// that lowers the objective is retried with half the rate.
pub fn optimize(
    profile: &IrsProfile,
    scenario: &Scenario,
    config: &OptimizerConfig,
) -> Result<OptimizationTrace> {
    profile.validate()?;
    config.validate()?;
    let m = profile.m();
    let (_, optimum) = closed_form_optimum(profile, scenario);
    let mut rng = stream_rng(config.seed, 0);
    let mut theta: Vec<f64> = if m == 1 {
        profile.phi.clone()
    } else {
        (0..m).map(|_| rng.random_range(0.0..TAU)).collect()
    };
    let scale = link_factor(scenario) / scenario.noise_power;
    let weights: Vec<f64> = profile.weights().collect();
    let batch = config.batch_for(m);

    let initial_objective = objective(&theta, profile, scenario)?;
    let mut current = initial_objective;
    let mut objectives = Vec::new();
    let mut converged = within_tolerance(current, optimum, config.tolerance_db);

    while !converged && objectives.len() < config.max_iterations {
        let grad = gradient(&theta, profile, scenario)?;
        let s_mag = channel_sum(&theta, profile).norm().max(f64::MIN_POSITIVE);
        let indices = sample(&mut rng, m, batch);
        let mut rate = config.learning_rate;
        for _ in 0..MAX_BACKTRACKS {
            let mut candidate = theta.clone();
            for k in indices.iter() {
                let curvature = 2.0 * scale * weights[k] * s_mag;
                if curvature > 0.0 {
                    candidate[k] = (candidate[k] + rate * grad[k] / curvature).rem_euclid(TAU);
                }
            }
            let value = objective(&candidate, profile, scenario)?;
            if value >= current {
                theta = candidate;
                current = value;
                break;
            }
            rate *= 0.5;
        }
        objectives.push(current);
        converged = within_tolerance(current, optimum, config.tolerance_db);
    }

    Ok(OptimizationTrace {
        initial_objective,
        iterations_used: objectives.len(),
        objectives,
        theta,
        converged,
    })
}

/// SNR with uniformly random phases, averaged (in linear scale) over `draws`.
pub fn random_phase_snr(profile: &IrsProfile, scenario: &Scenario, draws: usize, seed: u64) -> f64 {
    let mut rng = stream_rng(seed, 0);
    let total: f64 = (0..draws)
        .map(|_| {
            let theta: Vec<f64> = (0..profile.m()).map(|_| rng.random_range(0.0..TAU)).collect();
            receiver_snr(scenario, &IrsProfile { theta, ..profile.clone() })
        })
        .sum();
    total / draws.max(1) as f64
}

/// Convenience: `|H_M|` of a profile after optimization.
pub fn optimized_channel(profile: &IrsProfile, trace: &OptimizationTrace) -> Complex64 {
    sensing_channel(&IrsProfile {
        theta: trace.theta.clone(),
        ..profile.clone()
    })
}
