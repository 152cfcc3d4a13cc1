//! Cell-averaging CFAR statistics for a square-law detector and a fluctuating
//! (Rayleigh envelope) target.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::irs_channel::{IrsProfile, Scenario};
use crate::link_budget::receiver_snr;
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveSource {
    Analytic,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionCurve {
    pub pfa_target: f64,
    /// Abscissa: sub-surface counts (as reals) or SNR values in dB.
    pub grid: Vec<f64>,
    pub pd_values: Vec<f64>,
    pub source: CurveSource,
    /// Detection probability without IRS (single unit reflector), if computed.
    pub baseline_pd: Option<f64>,
}

/// `(1 + alpha/N)^(-N)`.
pub fn pfa_cfar(scale_alpha: f64, n_ref: usize) -> f64 {
    let n = n_ref as f64;
    (-n * (scale_alpha / n).ln_1p()).exp()
}

/// Inverse of [`pfa_cfar`]: `N (pfa^(-1/N) - 1)`.
pub fn scale_for_pfa(pfa_target: f64, n_ref: usize) -> Result<f64> {
    if !(pfa_target > 0.0 && pfa_target < 1.0) {
        return Err(Error::argument(
            "pfa_target",
            format!("must lie in (0, 1), got {pfa_target}"),
        ));
    }
    if n_ref == 0 {
        return Err(Error::argument("n_ref", "must be at least 1"));
    }
    let n = n_ref as f64;
    Ok(n * (-pfa_target.ln() / n).exp_m1())
}

/// `(1 + alpha / (N (1 + snr)))^(-N)`.
pub fn pd_cfar(scale_alpha: f64, n_ref: usize, snr_linear: f64) -> f64 {
    pfa_cfar(scale_alpha / (1.0 + snr_linear), n_ref)
}

/// Large-`N` limit `pfa^(1 / (1 + snr))`.
pub fn pd_limit(pfa_target: f64, snr_linear: f64) -> f64 {
    (pfa_target.ln() / (1.0 + snr_linear)).exp()
}

/// Fraction of `trials` in which a CA-CFAR square-law detector fires on a
/// complex Gaussian target of mean power `snr_linear` in unit-power noise.
pub fn pd_monte_carlo(
    pfa_target: f64,
    n_ref: usize,
    snr_linear: f64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials < 1000 {
        return Err(Error::argument("trials", format!("need at least 1000, got {trials}")));
    }
    if !(snr_linear >= 0.0) {
        return Err(Error::argument("snr_linear", "must be >= 0"));
    }
    let factor = scale_for_pfa(pfa_target, n_ref)? / n_ref as f64;
    let target_sigma = (snr_linear / 2.0).sqrt();
    let noise_sigma = 0.5f64.sqrt();

    let detections: u64 = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(seed, trial);
            let mut cgauss = |sigma: f64| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                (re * sigma, im * sigma)
            };
            let (sr, si) = cgauss(target_sigma);
            let (wr, wi) = cgauss(noise_sigma);
            let cut = (sr + wr).powi(2) + (si + wi).powi(2);
            let reference: f64 = (0..n_ref)
                .map(|_| {
                    let (r, i) = cgauss(noise_sigma);
                    r * r + i * i
                })
                .sum();
            u64::from(cut > factor * reference)
        })
        .sum();
    Ok(detections as f64 / trials as f64)
}

/// Detection probability (large-`N` limit) versus the number of phase-aligned
/// unit sub-surfaces. The `M = 1` channel is the no-IRS baseline.
/// `processing_gain` multiplies the receiver SNR before detection.
pub fn pd_vs_m_curve(
    scenario: &Scenario,
    m_grid: &[usize],
    pfa_target: f64,
    processing_gain: f64,
) -> Result<DetectionCurve> {
    if m_grid.is_empty() {
        return Err(Error::argument("m_grid", "must not be empty"));
    }
    if let Some(m) = m_grid.iter().find(|&&m| m == 0) {
        return Err(Error::argument("m_grid", format!("entries must be >= 1, got {m}")));
    }
    if !(pfa_target > 0.0 && pfa_target < 1.0) {
        return Err(Error::argument("pfa_target", "must lie in (0, 1)"));
    }
    let pd = |m: usize| {
        let snr = receiver_snr(scenario, &IrsProfile::aligned_unit(m)) * processing_gain;
        pd_limit(pfa_target, snr)
    };
    Ok(DetectionCurve {
        pfa_target,
        grid: m_grid.iter().map(|&m| m as f64).collect(),
        pd_values: m_grid.iter().map(|&m| pd(m)).collect(),
        source: CurveSource::Analytic,
        baseline_pd: Some(pd(1)),
    })
}

/// Binomial standard deviation of a fraction estimated from `trials` draws.
pub fn binomial_sigma(p: f64, trials: usize) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pfa_examples() {
        assert_eq!(pfa_cfar(0.0, 7), 1.0);
        assert!((pfa_cfar(1.0, 1) - 0.5).abs() < 1e-15);
        let p = pfa_cfar(9.2103, 1_000_000);
        assert!(((p - (-9.2103f64).exp()) / p).abs() < 1e-4);
        assert!((p - 1.0e-4).abs() < 1e-6 * 1e2);
    }

    #[test]
    fn scale_examples() {
        assert!((scale_for_pfa(0.5, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!(scale_for_pfa(1.0 - 1e-12, 16).unwrap() < 1e-10);
        assert!(scale_for_pfa(1.0, 16).is_err());
        assert!(scale_for_pfa(0.0, 16).is_err());
        assert!(scale_for_pfa(0.1, 0).is_err());
        let round = pfa_cfar(scale_for_pfa(1e-4, 16).unwrap(), 16);
        assert!((round - 1e-4).abs() < 1e-12 * 1e-4 * 10.0);
    }

    #[test]
    fn pd_examples() {
        let a = scale_for_pfa(1e-3, 12).unwrap();
        assert_eq!(pd_cfar(a, 12, 0.0), pfa_cfar(a, 12));
        assert!((pd_cfar(a, 12, 1e12) - 1.0).abs() < 1e-9);
        assert!((pd_limit(0.01, 0.0) - 0.01).abs() < 1e-15);
        assert!((pd_limit(0.01, 1e12) - 1.0).abs() < 1e-9);
        assert!((pd_limit(1e-4, 100.0) - 0.9128).abs() < 1e-4);
        let a = scale_for_pfa(1e-4, 16).unwrap();
        let finite = pd_cfar(a, 16, 100.0);
        let limit = pd_limit(1e-4, 100.0);
        // finite reference window costs detection probability
        assert!(finite < limit && limit - finite < 0.05, "{finite} vs {limit}");
    }

    #[test]
    fn monte_carlo_false_alarms() {
        let p = pd_monte_carlo(0.1, 16, 0.0, 100_000, 11).unwrap();
        assert!((p - 0.1).abs() < 0.01, "{p}");
    }

    #[test]
    fn monte_carlo_strong_target() {
        assert!(pd_monte_carlo(1e-4, 16, 1e6, 10_000, 3).unwrap() > 0.999);
    }

    #[test]
    fn monte_carlo_matches_analytic() {
        let analytic = pd_cfar(scale_for_pfa(1e-2, 32).unwrap(), 32, 10.0);
        let mc = pd_monte_carlo(1e-2, 32, 10.0, 100_000, 5).unwrap();
        assert!((mc - analytic).abs() < 3.0 * binomial_sigma(analytic, 100_000), "{mc} vs {analytic}");
    }

    #[test]
    fn monte_carlo_rejects_few_trials() {
        assert!(pd_monte_carlo(0.1, 4, 1.0, 999, 0).is_err());
    }

    #[test]
    fn curve_properties() {
        let s = Scenario {
            range: 10.0,
            antenna_gain: 1000.0,
            rcs: 10.0,
            ..Scenario::default()
        };
        let grid: Vec<usize> = (1..=64).collect();
        let curves: Vec<_> = [1e-2, 1e-4, 1e-6]
            .iter()
            .map(|&p| pd_vs_m_curve(&s, &grid, p, 1.0).unwrap())
            .collect();
        for c in &curves {
            assert!(c.pd_values.windows(2).all(|w| w[1] >= w[0]));
            assert!(c.pd_values.iter().all(|&p| p >= c.baseline_pd.unwrap()));
            assert!(c.pd_values.iter().all(|&p| (0.0..=1.0).contains(&p)));
        }
        for pair in curves.windows(2) {
            assert!(pair[0].pd_values.iter().zip(&pair[1].pd_values).all(|(a, b)| a >= b));
        }
        assert!(pd_vs_m_curve(&s, &[], 0.1, 1.0).is_err());
        assert!(pd_vs_m_curve(&s, &[0], 0.1, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn zero_snr_roundtrip(p in 1e-9f64..0.999, n in 1usize..=128) {
            let got = pd_cfar(scale_for_pfa(p, n).unwrap(), n, 0.0);
            prop_assert!(((got - p) / p).abs() < 1e-12);
        }

        #[test]
        fn converges_to_limit(snr in 0.0f64..1000.0, k in 0usize..3) {
            let p = [1e-2, 1e-4, 1e-6][k];
            let n = 10_000;
            let finite = pd_cfar(scale_for_pfa(p, n).unwrap(), n, snr);
            prop_assert!((finite - pd_limit(p, snr)).abs() < 1e-3);
        }

        #[test]
        fn probabilities_bounded(alpha in 0.0f64..1e4, n in 1usize..200, snr in 0.0f64..1e6) {
            for v in [pfa_cfar(alpha, n), pd_cfar(alpha, n, snr)] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }
}
