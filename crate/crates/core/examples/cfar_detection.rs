//! CA-CFAR thresholds, analytic detection probability and a Monte Carlo
//! cross-check.

use irs_isac::detection::{binomial_sigma, pd_cfar, pd_limit, pd_monte_carlo, pd_vs_m_curve, scale_for_pfa};
use irs_isac::irs_channel::Scenario;

fn main() -> irs_isac::Result<()> {
    let n_ref = 16;
    let trials = 100_000;
    for pfa in [1e-2, 1e-4, 1e-6] {
        let alpha = scale_for_pfa(pfa, n_ref)?;
        println!("pfa {pfa:.0e}: scale {alpha:.4}");
        for snr_db in [0.0, 10.0, 20.0] {
            let snr = 10f64.powf(snr_db / 10.0);
            let pd = pd_cfar(alpha, n_ref, snr);
            let mc = pd_monte_carlo(pfa, n_ref, snr, trials, 3)?;
            println!(
                "  {snr_db:>4} dB: pd {pd:.4}  mc {mc:.4} (+-{:.4})  N->inf {:.4}",
                3.0 * binomial_sigma(pd, trials),
                pd_limit(pfa, snr)
            );
        }
    }

    let scenario = Scenario {
        range: 10.0,
        antenna_gain: 1000.0,
        rcs: 10.0,
        ..Scenario::default()
    };
    let grid = [1, 8, 16, 32, 64];
    let curve = pd_vs_m_curve(&scenario, &grid, 1e-4, 1.0)?;
    println!("pfa 1e-4, no-IRS pd {:.4}", curve.baseline_pd.unwrap_or(f64::NAN));
    for (m, pd) in grid.iter().zip(&curve.pd_values) {
        println!("  M = {m:>2}: {pd:.4}");
    }
    Ok(())
}
