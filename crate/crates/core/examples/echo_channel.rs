//! Composite IRS channel and the delay/Doppler phase ramps it imprints on
//! the transmit frame.

use irs_isac::irs_channel::{add_noise, apply_echo, sensing_channel, IrsProfile, Scenario};
use irs_isac::ofdm_frame::{build_frame, FrameConfig, ModulationWeight};

fn main() -> irs_isac::Result<()> {
    let profile = IrsProfile::random_propagation(8, 0.5, 3);
    let random = sensing_channel(&profile);
    let aligned = sensing_channel(&profile.aligned());
    println!("M = 8, |H| with theta = 0: {:.4}", random.norm());
    println!("M = 8, |H| with theta = phi: {:.4} (sum of weights {:.4})", aligned.norm(), profile.coherent_amplitude());

    let config = FrameConfig::reference();
    let scenario = Scenario::default();
    println!(
        "R = {} m, v = {} m/s: delay {:.3e} s, doppler {:.1} Hz",
        scenario.range,
        scenario.velocity,
        scenario.delay(),
        scenario.doppler_shift()
    );
    let tx = build_frame(&config, &[], ModulationWeight::default(), 1)?;
    let rx = apply_echo(&tx, &config, &scenario, aligned)?;
    let ratio = |n, mu| rx.get(n, mu) / tx.get(n, mu);
    println!("phase step per subcarrier {:+.6} rad", (ratio(1, 0) / ratio(0, 0)).arg());
    println!("phase step per symbol     {:+.6} rad", (ratio(0, 1) / ratio(0, 0)).arg());

    let noisy = add_noise(&rx, 0.8, 2)?;
    let diff: f64 = noisy.as_slice().iter().zip(rx.as_slice()).map(|(a, b)| (a - b).norm_sqr()).sum();
    println!("measured noise power {:.4} (target 0.8)", diff / config.n_elements() as f64);
    Ok(())
}
