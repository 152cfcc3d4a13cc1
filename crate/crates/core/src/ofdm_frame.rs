//! OFDM numerology, the 16QAM mapper and transmit frame construction.
//!
//! A frame is an `N_c x N_sym` matrix of modulation symbols: rows are
//! subcarriers, columns are OFDM symbols. All processing in the crate happens
//! on this matrix; there is no time-domain waveform.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Relative tolerance on `symbol_duration * subcarrier_spacing == 1`.
const ORTHOGONALITY_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameConfig {
    pub n_subcarriers: usize,
    pub n_symbols: usize,
    /// Subcarrier spacing, Hz.
    pub subcarrier_spacing: f64,
    /// OFDM symbol duration, s.
    pub symbol_duration: f64,
    /// Carrier frequency, Hz.
    pub carrier_frequency: f64,
}

impl FrameConfig {
    pub fn new(
        n_subcarriers: usize,
        n_symbols: usize,
        subcarrier_spacing: f64,
        symbol_duration: f64,
        carrier_frequency: f64,
    ) -> Result<Self> {
        let config = Self {
            n_subcarriers,
            n_symbols,
            subcarrier_spacing,
            symbol_duration,
            carrier_frequency,
        };
        config.validate()?;
        Ok(config)
    }

    /// 512 subcarriers at 30 kHz, 12 symbols of 33.3 us, 5.9 GHz carrier.
    pub fn reference() -> Self {
        Self {
            n_subcarriers: 512,
            n_symbols: 12,
            subcarrier_spacing: 30e3,
            symbol_duration: 33.3e-6,
            carrier_frequency: 5.9e9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_subcarriers < 2 {
            return Err(Error::config("n_subcarriers", "must be at least 2"));
        }
        if self.n_symbols < 1 {
            return Err(Error::config("n_symbols", "must be at least 1"));
        }
        if !(self.subcarrier_spacing > 0.0 && self.subcarrier_spacing.is_finite()) {
            return Err(Error::config("subcarrier_spacing", "must be positive"));
        }
        if !(self.symbol_duration > 0.0 && self.symbol_duration.is_finite()) {
            return Err(Error::config("symbol_duration", "must be positive"));
        }
        if !(self.carrier_frequency > 0.0 && self.carrier_frequency.is_finite()) {
            return Err(Error::config("carrier_frequency", "must be positive"));
        }
        let product = self.symbol_duration * self.subcarrier_spacing;
        if (product - 1.0).abs() > ORTHOGONALITY_TOLERANCE {
            return Err(Error::config(
                "symbol_duration",
                format!("symbol_duration * subcarrier_spacing = {product}, must be 1 within 1%"),
            ));
        }
        Ok(())
    }

    /// Number of resource elements, `N_c * N_sym`.
    pub fn n_elements(&self) -> usize {
        self.n_subcarriers * self.n_symbols
    }
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self::reference()
    }
}

/// Complex matrix indexed by `(subcarrier, symbol)`.
///
/// Storage is column-major, so one OFDM symbol (all subcarriers) is a
/// contiguous slice.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolMatrix {
    n_subcarriers: usize,
    n_symbols: usize,
    data: Vec<Complex64>,
}

impl SymbolMatrix {
    pub fn zeros(n_subcarriers: usize, n_symbols: usize) -> Self {
        Self {
            n_subcarriers,
            n_symbols,
            data: vec![Complex64::new(0.0, 0.0); n_subcarriers * n_symbols],
        }
    }

    pub fn from_fn(
        n_subcarriers: usize,
        n_symbols: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Self {
        let mut data = Vec::with_capacity(n_subcarriers * n_symbols);
        for symbol in 0..n_symbols {
            for subcarrier in 0..n_subcarriers {
                data.push(f(subcarrier, symbol));
            }
        }
        Self {
            n_subcarriers,
            n_symbols,
            data,
        }
    }

    /// Builds a matrix from column-major data (symbol after symbol).
    pub fn from_columns(n_subcarriers: usize, n_symbols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n_subcarriers * n_symbols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", n_subcarriers * n_symbols),
                actual: format!("{} entries", data.len()),
            });
        }
        Ok(Self {
            n_subcarriers,
            n_symbols,
            data,
        })
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_subcarriers
    }

    pub fn n_symbols(&self) -> usize {
        self.n_symbols
    }

    pub fn get(&self, subcarrier: usize, symbol: usize) -> Complex64 {
        self.data[symbol * self.n_subcarriers + subcarrier]
    }

    pub fn set(&mut self, subcarrier: usize, symbol: usize, value: Complex64) {
        self.data[symbol * self.n_subcarriers + subcarrier] = value;
    }

    /// All subcarriers of one OFDM symbol.
    pub fn column(&self, symbol: usize) -> &[Complex64] {
        let start = symbol * self.n_subcarriers;
        &self.data[start..start + self.n_subcarriers]
    }

    /// One subcarrier across all OFDM symbols.
    pub fn row(&self, subcarrier: usize) -> impl Iterator<Item = Complex64> + '_ {
        self.data
            .iter()
            .skip(subcarrier)
            .step_by(self.n_subcarriers)
            .copied()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Iterates `(subcarrier, symbol, value)`.
    pub fn indexed(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        let n_c = self.n_subcarriers;
        self.data
            .iter()
            .enumerate()
            .map(move |(i, &v)| (i % n_c, i / n_c, v))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            n_subcarriers: self.n_subcarriers,
            n_symbols: self.n_symbols,
            data: self.data.iter().map(|&v| v * factor).collect(),
        }
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    pub(crate) fn check_dims(&self, n_subcarriers: usize, n_symbols: usize) -> Result<()> {
        if self.n_subcarriers != n_subcarriers || self.n_symbols != n_symbols {
            return Err(Error::DimensionMismatch {
                expected: format!("{n_subcarriers}x{n_symbols}"),
                actual: format!("{}x{}", self.n_subcarriers, self.n_symbols),
            });
        }
        Ok(())
    }

    pub(crate) fn check_config(&self, config: &FrameConfig) -> Result<()> {
        self.check_dims(config.n_subcarriers, config.n_symbols)
    }
}

/// Complex modulation weight `A` applied uniformly to a frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationWeight(Complex64);

impl ModulationWeight {
    pub fn new(value: Complex64) -> Result<Self> {
        if !(value.norm() > 0.0 && value.norm().is_finite()) {
            return Err(Error::argument(
                "weight",
                format!("magnitude must be positive and finite, got {value}"),
            ));
        }
        Ok(Self(value))
    }

    pub fn real(amplitude: f64) -> Result<Self> {
        Self::new(Complex64::new(amplitude, 0.0))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }
}

impl Default for ModulationWeight {
    fn default() -> Self {
        Self(Complex64::new(1.0, 0.0))
    }
}

/// Output of [`modulate_qam16`].
#[derive(Debug, Clone, PartialEq)]
pub struct QamSymbols {
    pub symbols: Vec<Complex64>,
    /// Zero bits appended to complete the last 4-bit group.
    pub padded_bits: usize,
}

/// Gray-coded amplitude levels for a bit pair: 00, 01, 11, 10 -> -3, -1, +1, +3.
fn gray_level(msb: bool, lsb: bool) -> f64 {
    match (msb, lsb) {
        (false, false) => -3.0,
        (false, true) => -1.0,
        (true, true) => 1.0,
        (true, false) => 3.0,
    }
}

/// Maps one 4-bit group `[b0, b1, b2, b3]` to a unit-average-energy 16QAM
/// point. `b0 b1` select the in-phase level and `b2 b3` the quadrature level.
pub fn qam16_point(bits: [bool; 4]) -> Complex64 {
    let scale = 1.0 / 10f64.sqrt();
    Complex64::new(
        gray_level(bits[0], bits[1]) * scale,
        gray_level(bits[2], bits[3]) * scale,
    )
}

/// Gray-coded 16QAM on the `{+-1, +-3}/sqrt(10)` lattice.
///
/// A ragged tail is padded with zero bits; the pad count is reported.
pub fn modulate_qam16(bits: &[bool]) -> QamSymbols {
    let padded_bits = (4 - bits.len() % 4) % 4;
    let symbols = bits
        .chunks(4)
        .map(|chunk| {
            let mut group = [false; 4];
            group[..chunk.len()].copy_from_slice(chunk);
            qam16_point(group)
        })
        .collect();
    QamSymbols {
        symbols,
        padded_bits,
    }
}

/// Builds the transmit matrix `A * d_Tx(n, mu)`.
///
/// Payload bits fill the frame symbol by symbol (all subcarriers of symbol 0
/// first). A payload shorter than `4 * N_c * N_sym` bits is completed with
/// pseudorandom bits drawn from `seed`.
pub fn build_frame(
    config: &FrameConfig,
    payload: &[bool],
    weight: ModulationWeight,
    seed: u64,
) -> Result<SymbolMatrix> {
    config.validate()?;
    let capacity = 4 * config.n_elements();
    if payload.len() > capacity {
        return Err(Error::argument(
            "payload",
            format!("{} bits exceed frame capacity of {capacity} bits", payload.len()),
        ));
    }
    let mut bits = Vec::with_capacity(capacity);
    bits.extend_from_slice(payload);
    let mut rng = stream_rng(seed, 0);
    bits.extend((payload.len()..capacity).map(|_| rng.random::<bool>()));

    let a = weight.value();
    let data = modulate_qam16(&bits)
        .symbols
        .into_iter()
        .map(|s| a * s)
        .collect();
    SymbolMatrix::from_columns(config.n_subcarriers, config.n_symbols, data)
}
