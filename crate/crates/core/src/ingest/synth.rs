//! Synthetic multichannel EEG.
//!
//! Each channel is a sum of background sinusoids with random phases plus
//! white Gaussian noise. Epileptic recordings additionally carry transient
//! sharp waves: Gaussian-windowed sinusoid bursts whose carrier lies in the
//! spike band, arriving as a Poisson process. Background and spikes draw from
//! separate random streams, so a spike rate of zero leaves the background
//! byte-identical to the healthy generator with the same seed.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{Label, Recording};

/// 10-20 montage channel order used by the generator for 22 channels.
pub const STANDARD_CHANNELS: [&str; 22] = [
    "Fp1", "Fp2", "F3", "F4", "C3", "C4", "P3", "P4", "O1", "O2", "F7", "F8", "T3", "T4", "T5",
    "T6", "A1", "A2", "Fz", "Pz", "Cz", "Oz",
];

/// Amplitude resolution of generated samples, in microvolts.
const RESOLUTION_UV: f64 = 0.01;

pub fn standard_channel_names(n: usize) -> Vec<String> {
    if n == STANDARD_CHANNELS.len() {
        STANDARD_CHANNELS.iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("Ch{i:02}")).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub seed: u64,
    pub subject_id: String,
    pub label: Label,
    pub duration_s: f64,
    pub sample_rate_hz: f64,
    pub n_channels: usize,
    /// `(frequency Hz, amplitude µV)` background rhythms.
    pub background_bands: Vec<(f64, f64)>,
    pub noise_sd_uv: f64,
    /// Mean sharp-wave rate per channel; must be 0 for healthy subjects.
    pub spike_rate_hz: f64,
    /// Carrier frequency range of the sharp waves.
    pub spike_band_hz: (f64, f64),
    pub spike_amplitude_uv: f64,
}

impl SynthSpec {
    /// Delta/theta/alpha/beta background with no spikes.
    pub fn healthy(seed: u64) -> Self {
        Self {
            seed,
            subject_id: format!("healthy-{seed}"),
            label: Label::Healthy,
            duration_s: 240.0,
            sample_rate_hz: 200.0,
            n_channels: 22,
            background_bands: vec![(2.0, 20.0), (6.0, 10.0), (10.0, 25.0), (20.0, 5.0)],
            noise_sd_uv: 8.0,
            spike_rate_hz: 0.0,
            spike_band_hz: (15.0, 50.0),
            spike_amplitude_uv: 60.0,
        }
    }

    pub fn epileptic(seed: u64, spike_rate_hz: f64) -> Self {
        Self {
            subject_id: format!("epileptic-{seed}"),
            label: Label::Epileptic,
            spike_rate_hz,
            ..Self::healthy(seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nyquist = self.sample_rate_hz / 2.0;
        if !(self.sample_rate_hz > 0.0 && self.sample_rate_hz.is_finite()) {
            return Err(Error::config("sample rate must be positive"));
        }
        if !(self.duration_s >= 0.0 && self.duration_s.is_finite()) {
            return Err(Error::config("duration must be non-negative"));
        }
        if self.n_channels == 0 {
            return Err(Error::config("at least one channel is required"));
        }
        if self.label == Label::Unknown {
            return Err(Error::config(
                "synthetic subjects must be Epileptic or Healthy",
            ));
        }
        for &(f, a) in &self.background_bands {
            if !(f > 0.0 && f < nyquist) || !(a >= 0.0 && a.is_finite()) {
                return Err(Error::config(format!(
                    "invalid background band ({f} Hz, {a} µV)"
                )));
            }
        }
        if !(self.noise_sd_uv >= 0.0 && self.noise_sd_uv.is_finite()) {
            return Err(Error::config("noise sd must be non-negative"));
        }
        if !(self.spike_rate_hz >= 0.0 && self.spike_rate_hz.is_finite()) {
            return Err(Error::config("spike rate must be non-negative"));
        }
        if self.label == Label::Healthy && self.spike_rate_hz != 0.0 {
            return Err(Error::config("healthy subjects cannot have spikes"));
        }
        let (lo, hi) = self.spike_band_hz;
        if !(lo > 0.0 && hi > lo && hi < nyquist) {
            return Err(Error::config(format!(
                "spike band {lo}-{hi} Hz must lie inside (0, {nyquist}) Hz"
            )));
        }
        if !(self.spike_amplitude_uv >= 0.0 && self.spike_amplitude_uv.is_finite()) {
            return Err(Error::config("spike amplitude must be non-negative"));
        }
        Ok(())
    }

    pub fn n_samples(&self) -> usize {
        (self.duration_s * self.sample_rate_hz).round() as usize
    }
}

/// One injected sharp wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikeEvent {
    pub time_s: f64,
    pub frequency_hz: f64,
    pub support_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub recording: Recording,
    /// Injected events per channel.
    pub events: Vec<Vec<SpikeEvent>>,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn stream(seed: u64, channel: usize, purpose: u64) -> ChaCha8Rng {
    let key = splitmix64(splitmix64(seed ^ purpose.rotate_left(32)) ^ channel as u64);
    ChaCha8Rng::seed_from_u64(key)
}

pub fn synthesize(spec: &SynthSpec) -> Result<Recording> {
    Ok(synthesize_with_events(spec)?.recording)
}

pub fn synthesize_with_events(spec: &SynthSpec) -> Result<SynthOutput> {
    spec.validate()?;
    let n = spec.n_samples();
    let fs = spec.sample_rate_hz;
    let mut samples = Vec::with_capacity(spec.n_channels);
    let mut events = Vec::with_capacity(spec.n_channels);
    for c in 0..spec.n_channels {
        let mut bg = stream(spec.seed, c, 1);
        let phases: Vec<f64> = spec
            .background_bands
            .iter()
            .map(|_| bg.random_range(0.0..2.0 * PI))
            .collect();
        let noise = Normal::new(0.0, spec.noise_sd_uv)
            .map_err(|e| Error::config(format!("noise distribution: {e}")))?;
        let mut x: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 / fs;
                let rhythm: f64 = spec
                    .background_bands
                    .iter()
                    .zip(&phases)
                    .map(|(&(f, a), &ph)| a * (2.0 * PI * f * t + ph).sin())
                    .sum();
                rhythm + noise.sample(&mut bg)
            })
            .collect();

        let mut channel_events = Vec::new();
        if spec.spike_rate_hz > 0.0 {
            let mut sp = stream(spec.seed, c, 2);
            let gap = Exp::new(spec.spike_rate_hz)
                .map_err(|e| Error::config(format!("spike rate: {e}")))?;
            let mut t = gap.sample(&mut sp);
            while t < spec.duration_s {
                let event = SpikeEvent {
                    time_s: t,
                    frequency_hz: sp.random_range(spec.spike_band_hz.0..spec.spike_band_hz.1),
                    support_s: sp.random_range(0.1..0.2),
                };
                let sign = if sp.random_bool(0.5) { 1.0 } else { -1.0 };
                add_sharp_wave(&mut x, fs, &event, sign * spec.spike_amplitude_uv);
                channel_events.push(event);
                t += gap.sample(&mut sp);
            }
        }
        for v in &mut x {
            *v = (*v / RESOLUTION_UV).round() * RESOLUTION_UV;
        }
        samples.push(x);
        events.push(channel_events);
    }
    let recording = Recording::new(
        standard_channel_names(spec.n_channels),
        samples,
        fs,
        spec.subject_id.clone(),
        spec.label,
    )?;
    Ok(SynthOutput { recording, events })
}

/// Gaussian-windowed sinusoid centred on the event, truncated to its support.
fn add_sharp_wave(x: &mut [f64], fs: f64, event: &SpikeEvent, amplitude: f64) {
    let sigma = event.support_s / 6.0;
    let half = event.support_s / 2.0;
    let first = ((event.time_s - half) * fs).ceil().max(0.0) as usize;
    let last = (((event.time_s + half) * fs).floor() as usize).min(x.len().saturating_sub(1));
    for (i, v) in x.iter_mut().enumerate().take(last + 1).skip(first) {
        let dt = i as f64 / fs - event.time_s;
        let envelope = (-0.5 * (dt / sigma).powi(2)).exp();
        *v += amplitude * envelope * (2.0 * PI * event.frequency_hz * dt).cos();
    }
}
