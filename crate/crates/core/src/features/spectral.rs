//! FFT magnitudes, power spectral intensity and relative intensity ratios.

use std::cell::RefCell;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Frequency band `[f_low, f_up]` cut into `K` bins of width `f_step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralBandSpec {
    pub f_low_hz: f64,
    pub f_up_hz: f64,
    pub f_step_hz: f64,
}

impl SpectralBandSpec {
    pub const fn new(f_low_hz: f64, f_up_hz: f64, f_step_hz: f64) -> Self {
        Self {
            f_low_hz,
            f_up_hz,
            f_step_hz,
        }
    }

    /// Number of bins; errors unless the band divides into a whole number.
    pub fn bins(&self) -> Result<usize> {
        let Self {
            f_low_hz: lo,
            f_up_hz: up,
            f_step_hz: step,
        } = *self;
        if !(lo >= 0.0 && up > lo && step > 0.0) || !(lo.is_finite() && up.is_finite()) {
            return Err(Error::config(format!("invalid band {self}")));
        }
        let k = (up - lo) / step;
        let rounded = k.round();
        if rounded < 1.0 || (k - rounded).abs() > 1e-9 * rounded.max(1.0) {
            return Err(Error::config(format!(
                "band {self} does not split into a whole number of bins"
            )));
        }
        Ok(rounded as usize)
    }

    /// `(f_min, f_max)` of bin `k` (zero-based).
    pub fn bin_edges(&self, k: usize) -> (f64, f64) {
        (
            self.f_low_hz + k as f64 * self.f_step_hz,
            self.f_low_hz + (k + 1) as f64 * self.f_step_hz,
        )
    }
}

impl std::fmt::Display for SpectralBandSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.f_low_hz, self.f_up_hz, self.f_step_hz)
    }
}

impl std::str::FromStr for SpectralBandSpec {
    type Err = Error;

    /// Parses `low:up:step`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::config(format!(
                "band `{s}` must have the form low:up:step"
            )));
        }
        let mut values = [0.0; 3];
        for (slot, part) in values.iter_mut().zip(&parts) {
            *slot = part
                .trim()
                .parse()
                .map_err(|_| Error::config(format!("band `{s}`: `{part}` is not a number")))?;
        }
        let band = Self::new(values[0], values[1], values[2]);
        band.bins()?;
        Ok(band)
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// `|X_k|` for every DFT coefficient of `samples`.
pub fn fft_magnitudes(samples: &[f64]) -> Result<Vec<f64>> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::input(format!(
            "FFT needs at least 2 samples, got {n}"
        )));
    }
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n));
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fft.process(&mut buf);
    Ok(buf.iter().map(|c| c.norm()).collect())
}

#[inline]
fn spectral_index(n: usize, freq: f64, sample_rate_hz: f64) -> usize {
    // Tolerate products like 4096 * 2.5 / 200 landing a hair under an integer.
    (n as f64 * freq / sample_rate_hz + 1e-9).floor() as usize
}

/// Summed spectral magnitude inside each band bin.
///
/// Bin `k` covers DFT indices `floor(N f_min / fs) ..= floor(N f_max / fs)`;
/// both ends are inclusive so adjacent bins share their edge line.
pub fn power_spectral_intensity(
    magnitudes: &[f64],
    band: &SpectralBandSpec,
    sample_rate_hz: f64,
) -> Result<Vec<f64>> {
    let k = band.bins()?;
    let nyquist = sample_rate_hz / 2.0;
    if band.f_up_hz > nyquist {
        return Err(Error::config(format!(
            "band upper edge {} Hz exceeds Nyquist ({nyquist} Hz)",
            band.f_up_hz
        )));
    }
    let n = magnitudes.len();
    Ok((0..k)
        .map(|bin| {
            let (f_min, f_max) = band.bin_edges(bin);
            let lo = spectral_index(n, f_min, sample_rate_hz);
            let hi = spectral_index(n, f_max, sample_rate_hz).min(n - 1);
            magnitudes[lo..=hi].iter().sum()
        })
        .collect())
}

/// Each PSI bin as a fraction of the band total. A zero-power band maps to
/// the uniform distribution.
pub fn relative_intensity_ratio(psi: &[f64]) -> Result<Vec<f64>> {
    if psi.is_empty() {
        return Err(Error::input("RIR needs at least one PSI bin"));
    }
    let total: f64 = psi.iter().sum();
    if total > 0.0 {
        Ok(psi.iter().map(|p| p / total).collect())
    } else {
        Ok(vec![1.0 / psi.len() as f64; psi.len()])
    }
}
