//! Minibatch gradient ascent on the IRS phases versus the closed-form
//! alignment and random phases.

use irs_isac::irs_channel::{IrsProfile, Scenario};
use irs_isac::link_budget::to_db;
use irs_isac::phase_optimizer::{closed_form_optimum, optimize, random_phase_snr, OptimizerConfig};

fn main() -> irs_isac::Result<()> {
    let scenario = Scenario::default();
    for m in [4usize, 16, 64] {
        let profile = IrsProfile::random_propagation(m, 0.5, m as u64);
        let config = OptimizerConfig {
            seed: 1,
            ..OptimizerConfig::default()
        };
        let trace = optimize(&profile, &scenario, &config)?;
        let (_, best) = closed_form_optimum(&profile, &scenario);
        let random = random_phase_snr(&profile, &scenario, 1000, 2);
        println!(
            "M = {m:>2}: start {:7.2} dB -> {:7.2} dB in {:>4} iterations (optimum {:7.2} dB, random {:7.2} dB)",
            to_db(trace.initial_objective),
            to_db(trace.final_objective()),
            trace.iterations_used,
            to_db(best),
            to_db(random)
        );
    }
    Ok(())
}
