//! Periodogram range/velocity estimation on a noisy IRS echo.

use irs_isac::estimator::{divide, range_bin_width, velocity_bin_width, Periodogram};
use irs_isac::irs_channel::{add_noise, apply_echo, sensing_channel, IrsProfile, Scenario};
use irs_isac::ofdm_frame::{build_frame, FrameConfig, ModulationWeight};

fn main() -> irs_isac::Result<()> {
    let config = FrameConfig::reference();
    let padding = 8;
    let scenario = Scenario {
        range: 60.0,
        velocity: 30.0,
        ..Scenario::default()
    };
    let periodogram = Periodogram::for_config(&config, padding)?;
    println!(
        "bins: {:.3} m, {:.3} m/s",
        range_bin_width(&config, padding),
        velocity_bin_width(&config, padding)
    );

    // per-sample SNR of -20 dB before IRS gain
    let weight = ModulationWeight::real(0.1)?;
    for m in [1usize, 4, 16] {
        let h = sensing_channel(&IrsProfile::aligned_unit(m));
        let tx = build_frame(&config, &[], weight, 11)?;
        let rx = add_noise(&apply_echo(&tx, &config, &scenario, h)?, 1.0, 12)?;
        let est = periodogram.estimate(&divide(&rx, &tx)?, &config)?;
        println!(
            "M = {m:>2}: R = {:7.3} m, v = {:7.3} m/s, peak {:.3}",
            est.range_estimate, est.velocity_estimate, est.peak_magnitude
        );
    }
    Ok(())
}
