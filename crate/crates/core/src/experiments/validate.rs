//! Cross-module oracle checks run by `irs-isac validate`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::crlb::{crlb_frequency, fisher_matrix, fisher_numeric_oracle};
use crate::detection::{binomial_sigma, pd_cfar, pd_monte_carlo, scale_for_pfa};
use crate::estimator::{divide, estimate, max_unambiguous_range, max_unambiguous_velocity, range_bin_width, velocity_bin_width};
use crate::irs_channel::{apply_echo, IrsProfile, Scenario};
use crate::link_budget::{receiver_snr, to_db};
use crate::ofdm_frame::{build_frame, FrameConfig, ModulationWeight};
use crate::phase_optimizer::{closed_form_optimum, objective, optimize, OptimizerConfig};
use crate::rng::{child_seed, stream_rng};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Analytic detection model `(pfa, n_ref, snr) -> pd` checked by the Monte
/// Carlo detector.
pub type PdModel = fn(f64, usize, f64) -> f64;

pub fn analytic_pd(pfa: f64, n_ref: usize, snr: f64) -> f64 {
    pd_cfar(scale_for_pfa(pfa, n_ref).expect("pfa in (0, 1)"), n_ref, snr)
}

#[derive(Debug, Clone, Copy)]
pub struct ValidationOptions {
    /// Smaller trial counts and grids.
    pub quick: bool,
    pub seed: u64,
    pub pd_model: PdModel,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            quick: false,
            seed: 2022,
            pd_model: analytic_pd,
        }
    }
}

/// `(pfa, n_ref, snr)` grid for the Monte Carlo detector check.
pub fn pd_check_grid() -> Vec<(f64, usize, f64)> {
    let mut grid = Vec::new();
    for pfa in [1e-1, 1e-2, 1e-4] {
        for n_ref in [8, 32] {
            for snr in [1.0, 10.0] {
                grid.push((pfa, n_ref, snr));
            }
        }
    }
    grid
}

pub fn check_fisher_oracle() -> CheckOutcome {
    let mut worst_entry = 0.0f64;
    let mut worst_bound = 0.0f64;
    for n_c in [4, 8, 16] {
        let analytic = fisher_matrix(1.0, 1.0, n_c).expect("n_c >= 2");
        let numeric = fisher_numeric_oracle(1.0, 1.0, n_c, 1.0);
        for i in 0..3 {
            for j in 0..3 {
                let (x, y) = (numeric[i][j], analytic.entries[i][j]);
                let err = if y == 0.0 { x.abs() } else { ((x - y) / y).abs() };
                worst_entry = worst_entry.max(err);
            }
        }
        let inv = analytic.for_complex_noise(1.0).inverse().expect("positive definite");
        let bound = crlb_frequency(1.0, 1.0, n_c).expect("n_c >= 2");
        worst_bound = worst_bound.max(((inv[1][1] - bound) / bound).abs());
    }
    CheckOutcome {
        name: "fisher_oracle",
        passed: worst_entry < 1e-3 && worst_bound < 1e-12,
        detail: format!("max entry rel err {worst_entry:.2e}, max bound rel err {worst_bound:.2e}"),
    }
}

pub fn check_pfa_roundtrip() -> CheckOutcome {
    let mut worst = 0.0f64;
    for p in [1e-2, 1e-4, 1e-6] {
        for n in [1, 8, 16, 64] {
            let got = pd_cfar(scale_for_pfa(p, n).expect("valid pfa"), n, 0.0);
            worst = worst.max(((got - p) / p).abs());
        }
    }
    CheckOutcome {
        name: "pfa_roundtrip",
        passed: worst < 1e-12,
        detail: format!("max rel err {worst:.2e}"),
    }
}

/// Monte Carlo detection fraction against `model` within three binomial
/// standard deviations at every grid point.
pub fn check_pd_monte_carlo(trials: usize, seed: u64, model: PdModel) -> CheckOutcome {
    let mut worst_z = 0.0f64;
    let mut failures = 0;
    for (i, (pfa, n_ref, snr)) in pd_check_grid().into_iter().enumerate() {
        let expected = model(pfa, n_ref, snr);
        let measured = pd_monte_carlo(pfa, n_ref, snr, trials, child_seed(seed, i as u64)).expect("valid grid");
        let sigma = binomial_sigma(expected, trials).max(1.0 / trials as f64);
        let z = (measured - expected).abs() / sigma;
        worst_z = worst_z.max(z);
        if z > 3.0 || !expected.is_finite() {
            failures += 1;
        }
    }
    CheckOutcome {
        name: "pd_monte_carlo",
        passed: failures == 0,
        detail: format!("{trials} trials, {failures} of 12 points outside 3 sigma, worst |z| {worst_z:.2}"),
    }
}

pub fn check_phase_grid(steps: usize) -> CheckOutcome {
    let profile = IrsProfile::new(vec![0.9, 0.6, 0.75], vec![0.4, 2.0, 5.1], vec![1.0; 3], vec![0.0; 3])
        .expect("valid profile");
    let scenario = Scenario::default();
    let (_, best) = closed_form_optimum(&profile, &scenario);
    let step = TAU / steps as f64;
    let grid_max = (0..steps)
        .into_par_iter()
        .map(|i| {
            let mut local = 0.0f64;
            for j in 0..steps {
                for k in 0..steps {
                    let theta = [i as f64 * step, j as f64 * step, k as f64 * step];
                    local = local.max(objective(&theta, &profile, &scenario).expect("M = 3"));
                }
            }
            local
        })
        .reduce(|| 0.0, f64::max);
    CheckOutcome {
        name: "phase_grid",
        passed: grid_max <= best * (1.0 + 1e-12),
        detail: format!("{steps}^3 grid max / closed form = {:.12}", grid_max / best),
    }
}

/// Noiseless targets recovered within half a padded bin, and payload
/// invariance of the divided matrix.
pub fn check_estimator_resolution(targets: usize, seed: u64) -> CheckOutcome {
    let config = FrameConfig::reference();
    let padding = 8;
    let one = Complex64::new(1.0, 0.0);
    let mut rng = stream_rng(seed, 0);
    let mut cases = vec![(60.0, 30.0)];
    let r_max = max_unambiguous_range(&config) - range_bin_width(&config, padding);
    let v_max = max_unambiguous_velocity(&config) - velocity_bin_width(&config, padding);
    cases.extend((0..targets).map(|_| (rng.random_range(0.0..r_max), rng.random_range(-v_max..v_max))));

    let mut worst_range = 0.0f64;
    let mut worst_velocity = 0.0f64;
    let mut worst_payload = 0.0f64;
    for (i, &(range, velocity)) in cases.iter().enumerate() {
        let scenario = Scenario {
            range,
            velocity,
            carrier_frequency: config.carrier_frequency,
            ..Scenario::default()
        };
        let divs: Vec<_> = [0u64, 1]
            .iter()
            .map(|&k| {
                let tx = build_frame(&config, &[], ModulationWeight::default(), child_seed(seed, 2 * i as u64 + k))
                    .expect("valid frame");
                let rx = apply_echo(&tx, &config, &scenario, one).expect("matching dims");
                divide(&rx, &tx).expect("nonzero symbols")
            })
            .collect();
        for (a, b) in divs[0].as_slice().iter().zip(divs[1].as_slice()) {
            worst_payload = worst_payload.max((a - b).norm());
        }
        let est = estimate(&divs[0], &config, padding).expect("valid input");
        worst_range = worst_range.max((est.range_estimate - range).abs() / range_bin_width(&config, padding));
        worst_velocity =
            worst_velocity.max((est.velocity_estimate - velocity).abs() / velocity_bin_width(&config, padding));
    }
    CheckOutcome {
        name: "estimator_resolution",
        passed: worst_range <= 0.5 + 1e-9 && worst_velocity <= 0.5 + 1e-9 && worst_payload <= 1e-12,
        detail: format!(
            "{} targets: worst error {worst_range:.3} range bins, {worst_velocity:.3} velocity bins; payload diff {worst_payload:.1e}",
            cases.len()
        ),
    }
}

pub fn check_optimizer(instances: usize, seed: u64) -> CheckOutcome {
    let scenario = Scenario::default();
    let gaps: Vec<f64> = (0..instances as u64)
        .into_par_iter()
        .map(|i| {
            let s = child_seed(seed, i);
            let profile = IrsProfile::random_propagation(64, 0.5, child_seed(s, 0));
            let config = OptimizerConfig {
                seed: child_seed(s, 1),
                ..OptimizerConfig::default()
            };
            let trace = optimize(&profile, &scenario, &config).expect("valid profile");
            let (_, best) = closed_form_optimum(&profile, &scenario);
            to_db(best) - to_db(trace.final_objective())
        })
        .collect();
    let worst = gaps.iter().cloned().fold(0.0, f64::max);
    CheckOutcome {
        name: "optimizer",
        passed: worst <= 0.1,
        detail: format!("{instances} instances at M = 64, worst gap {worst:.4} dB"),
    }
}

pub fn check_snr_gain() -> CheckOutcome {
    let scenario = Scenario::default();
    let base = to_db(receiver_snr(&scenario, &IrsProfile::aligned_unit(1)));
    let worst = [1usize, 2, 4, 8, 16, 32, 64]
        .iter()
        .map(|&m| {
            let gain = to_db(receiver_snr(&scenario, &IrsProfile::aligned_unit(m))) - base;
            (gain - 20.0 * (m as f64).log10()).abs()
        })
        .fold(0.0, f64::max);
    CheckOutcome {
        name: "snr_gain",
        passed: worst <= 0.01,
        detail: format!("max deviation from 20 log10 M: {worst:.2e} dB"),
    }
}

pub fn validation_suite(options: &ValidationOptions) -> Vec<CheckOutcome> {
    let (pd_trials, grid_steps, targets, instances) = if options.quick {
        (20_000, 32, 8, 4)
    } else {
        (100_000, 64, 40, 20)
    };
    vec![
        check_fisher_oracle(),
        check_pfa_roundtrip(),
        check_pd_monte_carlo(pd_trials, child_seed(options.seed, 1), options.pd_model),
        check_phase_grid(grid_steps),
        check_estimator_resolution(targets, child_seed(options.seed, 2)),
        check_optimizer(instances, child_seed(options.seed, 3)),
        check_snr_gain(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corrupted_exponent(pfa: f64, n_ref: usize, snr: f64) -> f64 {
        // exponent -N replaced by -(N + 1)
        let alpha = scale_for_pfa(pfa, n_ref).unwrap();
        (1.0 + alpha / (n_ref as f64 * (1.0 + snr))).powf(-(n_ref as f64 + 1.0))
    }

    #[test]
    fn quick_suite_passes() {
        let outcomes = validation_suite(&ValidationOptions {
            quick: true,
            ..ValidationOptions::default()
        });
        for o in &outcomes {
            assert!(o.passed, "{}: {}", o.name, o.detail);
        }
    }

    #[test]
    fn corrupted_detection_model_is_caught() {
        let outcome = check_pd_monte_carlo(100_000, 1, corrupted_exponent);
        assert!(!outcome.passed, "{}", outcome.detail);
    }
}
