//! Fisher information and Cramer-Rao bounds for OFDM range/velocity
//! estimation.
//!
//! The single-symbol signal model is `s_n = A |H_M| e^{j(2 pi f n + psi)}`,
//! `n = 0..N_c`, with parameters `(|H_M|, f, psi)`.
//!
//! Noise convention: [`fisher_matrix`] is the information for noise of unit
//! variance per real component. The bounds ([`crlb_frequency`],
//! [`crlb_range`], [`crlb_velocity`]) assume unit variance per *complex*
//! sample, i.e. `(A |H_M|)^2` is the per-sample SNR; their information matrix
//! is twice [`fisher_matrix`] (see [`FisherMatrix::for_complex_noise`]).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::SPEED_OF_LIGHT;

pub type Matrix3 = [[f64; 3]; 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherMatrix {
    pub entries: Matrix3,
    pub n_subcarriers: usize,
}

impl FisherMatrix {
    /// `N_c (N_c - 1)`.
    pub fn upsilon(&self) -> f64 {
        upsilon(self.n_subcarriers)
    }

    /// `Upsilon (2 N_c - 1) / 6`.
    pub fn gamma(&self) -> f64 {
        gamma(self.n_subcarriers)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut entries = self.entries;
        entries.iter_mut().flatten().for_each(|v| *v *= factor);
        Self { entries, ..*self }
    }

    /// Information for complex noise of variance `noise_power` (half per real
    /// component).
    pub fn for_complex_noise(&self, noise_power: f64) -> Self {
        self.scaled(2.0 / noise_power)
    }

    pub fn inverse(&self) -> Option<Matrix3> {
        invert3(&self.entries)
    }
}

fn upsilon(n_c: usize) -> f64 {
    let n = n_c as f64;
    n * (n - 1.0)
}

fn gamma(n_c: usize) -> f64 {
    upsilon(n_c) * (2.0 * n_c as f64 - 1.0) / 6.0
}

pub fn invert3(m: &Matrix3) -> Option<Matrix3> {
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let det = m[0][0] * cof(1, 2, 1, 2) - m[0][1] * cof(1, 2, 0, 2) + m[0][2] * cof(1, 2, 0, 1);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let adj = [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    let mut inv = adj;
    inv.iter_mut().flatten().for_each(|v| *v /= det);
    Some(inv)
}

/// Analytic Fisher matrix over `(|H_M|, f, psi)`:
///
/// ```text
/// [ A^2 N_c   0                      0                  ]
/// [ 0         (2 pi |H| A)^2 Gamma   pi (|H| A)^2 Ups   ]
/// [ 0         pi (|H| A)^2 Ups       (|H| A)^2 N_c      ]
/// ```
pub fn fisher_matrix(a: f64, h_mag: f64, n_c: usize) -> Result<FisherMatrix> {
    if n_c < 2 {
        return Err(Error::argument("n_c", "need at least 2 subcarriers"));
    }
    if !(a > 0.0) {
        return Err(Error::argument("a", "amplitude must be positive"));
    }
    let n = n_c as f64;
    let ha2 = (h_mag * a).powi(2);
    let cross = PI * ha2 * upsilon(n_c);
    Ok(FisherMatrix {
        entries: [
            [a * a * n, 0.0, 0.0],
            [0.0, (2.0 * PI * h_mag * a).powi(2) * gamma(n_c), cross],
            [0.0, cross, ha2 * n],
        ],
        n_subcarriers: n_c,
    })
}

/// `6 / ((2 pi |H| A)^2 N_c (N_c^2 - 1))`, bound on the normalized
/// frequency (cycles per subcarrier).
pub fn crlb_frequency(a: f64, h_mag: f64, n_c: usize) -> Result<f64> {
    if n_c < 2 {
        return Err(Error::argument("n_c", "need at least 2 subcarriers"));
    }
    let n = n_c as f64;
    Ok(6.0 / ((2.0 * PI * h_mag * a).powi(2) * n * (n * n - 1.0)))
}

/// `6 c_0^2 / ((4 pi df)^2 |H|^2 A^2 N_sym N_c (N_c^2 - 1))`, m^2.
/// With `n_sym = 1` this is the single-symbol bound.
pub fn crlb_range(a: f64, h_mag: f64, n_c: usize, n_sym: usize, delta_f: f64) -> Result<f64> {
    if n_c < 2 {
        return Err(Error::argument("n_c", "need at least 2 subcarriers"));
    }
    if n_sym < 1 {
        return Err(Error::argument("n_sym", "need at least 1 symbol"));
    }
    let (nc, ns) = (n_c as f64, n_sym as f64);
    Ok(6.0 * SPEED_OF_LIGHT.powi(2)
        / ((4.0 * PI * delta_f).powi(2) * (h_mag * a).powi(2) * ns * nc * (nc * nc - 1.0)))
}

/// `6 c_0^2 / ((4 pi T f_c)^2 |H|^2 A^2 N_sym N_c (N_sym^2 - 1))`, (m/s)^2.
pub fn crlb_velocity(a: f64, h_mag: f64, n_c: usize, n_sym: usize, t: f64, f_c: f64) -> Result<f64> {
    if n_sym < 2 {
        return Err(Error::argument("n_sym", "need at least 2 symbols"));
    }
    if n_c < 1 {
        return Err(Error::argument("n_c", "need at least 1 subcarrier"));
    }
    let (nc, ns) = (n_c as f64, n_sym as f64);
    Ok(6.0 * SPEED_OF_LIGHT.powi(2)
        / ((4.0 * PI * t * f_c).powi(2) * (h_mag * a).powi(2) * ns * nc * (ns * ns - 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrlbReport {
    pub crlb_frequency: f64,
    pub crlb_range: f64,
    pub crlb_velocity: f64,
    pub n_subcarriers: usize,
    pub n_symbols: usize,
    pub subcarrier_spacing: f64,
    pub symbol_duration: f64,
    pub carrier_frequency: f64,
    pub h_mag: f64,
    pub amplitude: f64,
}

pub fn crlb_report(config: &crate::ofdm_frame::FrameConfig, a: f64, h_mag: f64) -> Result<CrlbReport> {
    Ok(CrlbReport {
        crlb_frequency: crlb_frequency(a, h_mag, config.n_subcarriers)?,
        crlb_range: crlb_range(a, h_mag, config.n_subcarriers, config.n_symbols, config.subcarrier_spacing)?,
        crlb_velocity: crlb_velocity(
            a,
            h_mag,
            config.n_subcarriers,
            config.n_symbols,
            config.symbol_duration,
            config.carrier_frequency,
        )?,
        n_subcarriers: config.n_subcarriers,
        n_symbols: config.n_symbols,
        subcarrier_spacing: config.subcarrier_spacing,
        symbol_duration: config.symbol_duration,
        carrier_frequency: config.carrier_frequency,
        h_mag,
        amplitude: a,
    })
}

/// Central-difference step of [`fisher_numeric_oracle`].
pub const ORACLE_STEP: f64 = 1e-5;

/// Finite-difference Fisher matrix: the negative Hessian of the expected
/// log-likelihood of `s_n = a h e^{j(2 pi f n + psi)}` under Gaussian noise
/// with `component_variance` per real component, evaluated at `f = psi = 0`.
pub fn fisher_numeric_oracle(a: f64, h_mag: f64, n_c: usize, component_variance: f64) -> Matrix3 {
    fisher_numeric_oracle_with_step(a, h_mag, n_c, component_variance, ORACLE_STEP)
}

pub fn fisher_numeric_oracle_with_step(
    a: f64,
    h_mag: f64,
    n_c: usize,
    component_variance: f64,
    step: f64,
) -> Matrix3 {
    let truth = [h_mag, 0.0, 0.0];
    let signal = |p: [f64; 3], n: usize| {
        num_complex::Complex64::from_polar(a * p[0], 2.0 * PI * p[1] * n as f64 + p[2])
    };
    // E[-log L(p)] up to a constant, with data drawn at `truth`
    let expected_nll = |p: [f64; 3]| -> f64 {
        (0..n_c)
            .map(|n| (signal(truth, n) - signal(p, n)).norm_sqr())
            .sum::<f64>()
            / (2.0 * component_variance)
    };
    let at = |i: usize, di: f64, j: usize, dj: f64| {
        let mut p = truth;
        p[i] += di;
        p[j] += dj;
        expected_nll(p)
    };
    let h = step;
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = if i == j {
                (at(i, h, i, 0.0) - 2.0 * expected_nll(truth) + at(i, -h, i, 0.0)) / (h * h)
            } else {
                (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) / (4.0 * h * h)
            };
        }
    }
    out
}
