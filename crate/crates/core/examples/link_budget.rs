//! Radar-equation link budget for a growing, phase-aligned IRS.

use irs_isac::irs_channel::{IrsProfile, Scenario};
use irs_isac::link_budget::{link_budget, to_db};

fn main() {
    let scenario = Scenario {
        range: 10.0,
        antenna_gain: 1000.0,
        rcs: 10.0,
        ..Scenario::default()
    };
    let processing_gain = 512.0 * 12.0;
    let base = link_budget(&scenario, &IrsProfile::aligned_unit(1), 1.0);
    println!("power density at target {:.4e} W/m^2", base.q_t);
    println!("{:>4} {:>12} {:>10} {:>10} {:>14}", "M", "P_r [W]", "SNR [dB]", "gain [dB]", "integrated [dB]");
    for m in [1usize, 2, 4, 8, 16, 32, 64] {
        let profile = IrsProfile::aligned_unit(m);
        let r = link_budget(&scenario, &profile, 1.0);
        let integrated = link_budget(&scenario, &profile, processing_gain);
        println!(
            "{m:>4} {:>12.4e} {:>10.2} {:>10.2} {:>14.2}",
            r.p_r,
            r.snr_db,
            r.snr_db - base.snr_db,
            integrated.snr_db
        );
    }
    let misaligned = IrsProfile::random_propagation(16, 1.0, 5);
    let r = link_budget(&scenario, &misaligned, 1.0);
    println!(
        "M = 16 unaligned: {:.2} dB, aligned would give {:.2} dB",
        r.snr_db,
        to_db(r.p_r_ideal / scenario.noise_power)
    );
}
