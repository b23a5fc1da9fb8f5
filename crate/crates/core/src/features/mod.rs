//! Per-segment feature extraction.
//!
//! A [`FeatureVector`] is laid out as `K` relative intensity ratios followed
//! by PFD, HFD, Hjorth mobility and Hjorth complexity, so its dimension is
//! always `K + 4`.

mod fractal;
mod hjorth;
mod normalize;
mod spectral;

use serde::{Deserialize, Serialize};

pub use fractal::{derivative_sign_changes, higuchi_fd, petrosian_fd};
pub use hjorth::hjorth_params;
pub use normalize::Normalizer;
pub use spectral::{
    fft_magnitudes, power_spectral_intensity, relative_intensity_ratio, SpectralBandSpec,
};

use crate::error::{Error, Result};
use crate::signal::{FilterSpec, Segment};

/// Everything that shapes a feature vector besides the raw samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractionConfig {
    pub segment_length: usize,
    pub filter: FilterSpec,
    pub band: SpectralBandSpec,
    pub k_max: usize,
}

impl Default for ExtractionConfig {
    /// 8192-sample segments, 56 Hz low-pass, 2-32 Hz band in 1 Hz bins.
    fn default() -> Self {
        Self {
            segment_length: 8192,
            filter: FilterSpec::low_pass(56.0),
            band: SpectralBandSpec::new(2.0, 32.0, 1.0),
            k_max: 5,
        }
    }
}

impl ExtractionConfig {
    pub fn new(segment_length: usize, cutoff_hz: f64, band: SpectralBandSpec) -> Self {
        Self {
            segment_length,
            filter: FilterSpec::low_pass(cutoff_hz),
            band,
            ..Self::default()
        }
    }

    pub fn validate(&self, sample_rate_hz: f64) -> Result<()> {
        if self.k_max < 2 {
            return Err(Error::config(format!(
                "k_max must be at least 2, got {}",
                self.k_max
            )));
        }
        if self.segment_length < 2 * self.k_max {
            return Err(Error::config(format!(
                "segment length {} is shorter than 2*k_max ({})",
                self.segment_length,
                2 * self.k_max
            )));
        }
        self.band.bins()?;
        self.filter.validate(sample_rate_hz)?;
        if self.band.f_up_hz > self.filter.cutoff_hz {
            return Err(Error::config(format!(
                "band upper edge {} Hz lies above the {} Hz filter cutoff",
                self.band.f_up_hz, self.filter.cutoff_hz
            )));
        }
        Ok(())
    }

    pub fn n_bins(&self) -> Result<usize> {
        self.band.bins()
    }

    pub fn dim(&self) -> Result<usize> {
        Ok(self.n_bins()? + 4)
    }

    /// Stable identifier; models only accept vectors with the same one.
    pub fn fingerprint(&self) -> String {
        format!(
            "len={};lp={}/o{};band={};kmax={}",
            self.segment_length, self.filter.cutoff_hz, self.filter.order, self.band, self.k_max
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub rir: Vec<f64>,
    pub pfd: f64,
    pub hfd: f64,
    pub mobility: f64,
    pub complexity: f64,
    pub config_id: String,
}

impl FeatureVector {
    pub fn dim(&self) -> usize {
        self.rir.len() + 4
    }

    /// Flattened in the canonical order.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.dim());
        v.extend_from_slice(&self.rir);
        v.extend([self.pfd, self.hfd, self.mobility, self.complexity]);
        v
    }

    pub fn is_finite(&self) -> bool {
        self.to_vec().iter().all(|v| v.is_finite())
    }
}

/// Feature vector of one raw (already filtered) window.
pub fn extract_samples(
    samples: &[f64],
    config: &ExtractionConfig,
    sample_rate_hz: f64,
) -> Result<FeatureVector> {
    if samples.len() != config.segment_length {
        return Err(Error::input(format!(
            "segment has {} samples but the configuration expects {}",
            samples.len(),
            config.segment_length
        )));
    }
    let magnitudes = fft_magnitudes(samples)?;
    let psi = power_spectral_intensity(&magnitudes, &config.band, sample_rate_hz)?;
    let rir = relative_intensity_ratio(&psi)?;
    let pfd = petrosian_fd(samples)?;
    let hfd = higuchi_fd(samples, config.k_max)?;
    let (mobility, complexity) = hjorth_params(samples)?;
    Ok(FeatureVector {
        rir,
        pfd,
        hfd,
        mobility,
        complexity,
        config_id: config.fingerprint(),
    })
}

pub fn extract(
    segment: &Segment,
    config: &ExtractionConfig,
    sample_rate_hz: f64,
) -> Result<FeatureVector> {
    extract_samples(&segment.samples, config, sample_rate_hz).map_err(|e| {
        e.context(format!(
            "channel {} frame {}",
            segment.channel, segment.frame_index
        ))
    })
}
