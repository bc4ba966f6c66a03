//! Frequency-domain view of fixed-width windowing.
//!
//! `G_S` is the transfer function of a width-`W` sliding mean; `G_D` is the
//! double sum for a sliding mean that only reports every `W` steps, evaluated
//! term by term. Frequencies are in radians per sample.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyResponse {
    pub omega: f64,
    pub gain: Complex64,
}

impl FrequencyResponse {
    pub fn new(omega: f64, gain: Complex64) -> Self {
        Self { omega, gain }
    }

    pub fn magnitude(&self) -> f64 {
        self.gain.norm()
    }
}

/// `o_t = (1/W) Σ_{a=t−W+1}^{t} i_a` for every `t` with a full window.
pub fn sliding_window_output(input: &[f64], w: usize) -> Result<Vec<f64>> {
    if w == 0 {
        return Err(Error::InvalidConfig("window width must be at least 1".into()));
    }
    if w > input.len() {
        return Err(Error::InvalidConfig(format!("window width {w} exceeds input length {}", input.len())));
    }
    Ok(input.windows(w).map(|win| win.iter().sum::<f64>() / w as f64).collect())
}

/// `G_S(ω) = (1/W) Σ_{g=0}^{W−1} e^{−jgω}`.
pub fn sliding_window_gain(w: usize, omega: f64) -> Result<FrequencyResponse> {
    if w == 0 {
        return Err(Error::InvalidConfig("window width must be at least 1".into()));
    }
    let sum: Complex64 = (0..w).map(|g| Complex64::from_polar(1.0, -(g as f64) * omega)).sum();
    Ok(FrequencyResponse::new(omega, sum / w as f64))
}

/// `G_D(ω) = (1/W²) Σ_{g=0}^{W−1} Σ_{b=0}^{W−1} e^{−jb(ω + 2gπ)}`.
pub fn dc_gain(w: usize, omega: f64) -> Result<FrequencyResponse> {
    if w == 0 {
        return Err(Error::InvalidConfig("window width must be at least 1".into()));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for g in 0..w {
        let shifted = omega + 2.0 * g as f64 * PI;
        for b in 0..w {
            sum += Complex64::from_polar(1.0, -(b as f64) * shifted);
        }
    }
    Ok(FrequencyResponse::new(omega, sum / (w * w) as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainRow {
    pub w: usize,
    pub sliding: FrequencyResponse,
    pub cell: FrequencyResponse,
}

/// Both gains at `ω = kπ/(n_points − 1)` for `k = 0..n_points`.
pub fn gain_sweep(w: usize, n_points: usize) -> Result<Vec<GainRow>> {
    if n_points < 2 {
        return Err(Error::InvalidConfig("a gain sweep needs at least 2 points".into()));
    }
    (0..n_points)
        .map(|k| {
            let omega = k as f64 * PI / (n_points - 1) as f64;
            Ok(GainRow { w, sliding: sliding_window_gain(w, omega)?, cell: dc_gain(w, omega)? })
        })
        .collect()
}

/// Writes `W,omega,G_S_mag,G_D_mag` rows.
pub fn write_gain_sweeps<W: Write>(out: W, rows: &[GainRow]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["W", "omega", "G_S_mag", "G_D_mag"])?;
    for r in rows {
        wtr.write_record([
            r.w.to_string(),
            r.sliding.omega.to_string(),
            r.sliding.magnitude().to_string(),
            r.cell.magnitude().to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
