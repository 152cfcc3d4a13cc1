//! Builds a 16QAM OFDM frame from a text payload and prints the
//! constellation usage and a few symbols.

use irs_isac::ofdm_frame::{build_frame, modulate_qam16, qam16_point, FrameConfig, ModulationWeight};

fn bits_of(text: &str) -> Vec<bool> {
    text.bytes().flat_map(|b| (0..8).rev().map(move |i| b >> i & 1 == 1)).collect()
}

fn main() -> irs_isac::Result<()> {
    println!("gray map (b0b1 -> I, b2b3 -> Q):");
    for code in 0u8..16 {
        let bits = [code & 8 != 0, code & 4 != 0, code & 2 != 0, code & 1 != 0];
        let p = qam16_point(bits);
        println!("  {code:04b} -> {:+.4} {:+.4}j", p.re, p.im);
    }

    let payload = bits_of("IRS-assisted ISAC, hello!");
    let q = modulate_qam16(&payload[..27]);
    println!("27 bits -> {} symbols, {} padding bits", q.symbols.len(), q.padded_bits);

    let config = FrameConfig::reference();
    let frame = build_frame(&config, &payload, ModulationWeight::real(2.0)?, 7)?;
    println!(
        "frame {} x {}: mean symbol energy {:.4} (A^2 = 4)",
        frame.n_subcarriers(),
        frame.n_symbols(),
        frame.energy() / config.n_elements() as f64
    );
    for n in 0..4 {
        let d = frame.get(n, 0);
        println!("  d[{n}, 0] = {:+.4} {:+.4}j", d.re, d.im);
    }
    Ok(())
}
