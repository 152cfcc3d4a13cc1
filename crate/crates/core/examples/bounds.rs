//! Fisher information of the single-tone model and the range/velocity
//! bounds at the reference numerology.

use irs_isac::crlb::{crlb_report, fisher_matrix, fisher_numeric_oracle};
use irs_isac::ofdm_frame::FrameConfig;

fn main() -> irs_isac::Result<()> {
    let n_c = 8;
    let analytic = fisher_matrix(1.0, 1.0, n_c)?;
    let numeric = fisher_numeric_oracle(1.0, 1.0, n_c, 1.0);
    println!("Fisher matrix, N_c = {n_c} (closed form | finite differences):");
    for (row, num) in analytic.entries.iter().zip(&numeric) {
        println!(
            "  {:>10.4} {:>10.4} {:>10.4} | {:>10.4} {:>10.4} {:>10.4}",
            row[0], row[1], row[2], num[0], num[1], num[2]
        );
    }

    let config = FrameConfig::reference();
    println!("{:>4} {:>14} {:>14}", "M", "range [m^2]", "vel [m^2/s^2]");
    for m in [1usize, 4, 16, 64] {
        let r = crlb_report(&config, 1.0, m as f64)?;
        println!("{m:>4} {:>14.4e} {:>14.4e}", r.crlb_range, r.crlb_velocity);
    }
    Ok(())
}
