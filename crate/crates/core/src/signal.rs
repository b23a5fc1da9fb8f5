//! Signal conditioning: zero-phase low-pass filtering and segmentation into
//! co-temporal frames.

use std::collections::HashSet;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Subject-level class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Epileptic,
    Healthy,
    Unknown,
}

impl Label {
    /// Index in [`crate::BINARY_CLASSES`]; `None` for `Unknown`.
    pub fn class_index(self) -> Option<usize> {
        match self {
            Label::Healthy => Some(0),
            Label::Epileptic => Some(1),
            Label::Unknown => None,
        }
    }

    pub fn from_class_index(index: usize) -> Option<Label> {
        crate::BINARY_CLASSES.get(index).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Epileptic => "Epileptic",
            Label::Healthy => "Healthy",
            Label::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "epileptic" => Ok(Label::Epileptic),
            "healthy" => Ok(Label::Healthy),
            "unknown" => Ok(Label::Unknown),
            other => Err(Error::input(format!("unknown label `{other}`"))),
        }
    }
}

/// A multichannel recording in microvolts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recording {
    channels: Vec<String>,
    samples: Vec<Vec<f64>>,
    sample_rate_hz: f64,
    pub subject_id: String,
    pub label: Label,
}

impl Recording {
    pub fn new(
        channels: Vec<String>,
        samples: Vec<Vec<f64>>,
        sample_rate_hz: f64,
        subject_id: impl Into<String>,
        label: Label,
    ) -> Result<Self> {
        if !(sample_rate_hz > 0.0 && sample_rate_hz.is_finite()) {
            return Err(Error::config(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if channels.is_empty() {
            return Err(Error::input("recording has no channels"));
        }
        if channels.len() != samples.len() {
            return Err(Error::input(format!(
                "{} channel names but {} sample columns",
                channels.len(),
                samples.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &channels {
            if !seen.insert(name.as_str()) {
                return Err(Error::input(format!("duplicate channel name `{name}`")));
            }
        }
        let len = samples[0].len();
        if let Some((i, _)) = samples.iter().enumerate().find(|(_, s)| s.len() != len) {
            return Err(Error::input(format!(
                "channel `{}` has {} samples, expected {len}",
                channels[i],
                samples[i].len()
            )));
        }
        Ok(Self {
            channels,
            samples,
            sample_rate_hz,
            subject_id: subject_id.into(),
            label,
        })
    }

    pub fn channels(&self) -> &[String] {
        &self.channels
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn channel(&self, index: usize) -> &[f64] {
        &self.samples[index]
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    /// Samples per channel.
    pub fn len(&self) -> usize {
        self.samples[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn with_samples(&self, samples: Vec<Vec<f64>>) -> Self {
        Self {
            channels: self.channels.clone(),
            samples,
            sample_rate_hz: self.sample_rate_hz,
            subject_id: self.subject_id.clone(),
            label: self.label,
        }
    }
}

/// One channel's window of `segment_length` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub channel: String,
    pub frame_index: usize,
    pub samples: Vec<f64>,
    pub label: Label,
}

/// Co-temporal segments, one per channel, in recording channel order.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub index: usize,
    pub label: Label,
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FilterKind {
    LowPass,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub cutoff_hz: f64,
    pub order: usize,
    pub kind: FilterKind,
}

impl FilterSpec {
    pub const DEFAULT_ORDER: usize = 4;

    pub fn low_pass(cutoff_hz: f64) -> Self {
        Self {
            cutoff_hz,
            order: Self::DEFAULT_ORDER,
            kind: FilterKind::LowPass,
        }
    }

    pub fn validate(&self, sample_rate_hz: f64) -> Result<()> {
        if self.order == 0 {
            return Err(Error::config("filter order must be positive"));
        }
        if !(self.cutoff_hz > 0.0 && self.cutoff_hz.is_finite()) {
            return Err(Error::config(format!(
                "cutoff must be positive, got {} Hz",
                self.cutoff_hz
            )));
        }
        let nyquist = sample_rate_hz / 2.0;
        if self.cutoff_hz >= nyquist {
            return Err(Error::config(format!(
                "cutoff {} Hz is not below Nyquist ({nyquist} Hz)",
                self.cutoff_hz
            )));
        }
        Ok(())
    }

    /// Samples at each end excluded from accuracy checks on filtered output.
    pub fn edge_transient(&self) -> usize {
        (3 * self.order).max(50)
    }
}

/// Biquad coefficients `(b0, b1, b2, a1, a2)` with `a0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    fn dc_gain(&self) -> f64 {
        (self.b[0] + self.b[1] + self.b[2]) / (1.0 + self.a[0] + self.a[1])
    }

    /// Transposed direct form II state for a steady input level `x`.
    fn steady_state(&self, x: f64) -> [f64; 2] {
        let y = self.dc_gain() * x;
        let z2 = self.b[2] * x - self.a[1] * y;
        let z1 = self.b[1] * x - self.a[0] * y + z2;
        [z1, z2]
    }

    fn run(&self, data: &mut [f64], mut state: [f64; 2]) {
        let [b0, b1, b2] = self.b;
        let [a1, a2] = self.a;
        for v in data.iter_mut() {
            let x = *v;
            let y = b0 * x + state[0];
            state[0] = b1 * x - a1 * y + state[1];
            state[1] = b2 * x - a2 * y;
            *v = y;
        }
    }
}

/// Digital Butterworth low-pass as a cascade of second-order sections.
///
/// The design cutoff is pre-corrected so that the *forward-backward* response
/// crosses −3 dB at the requested frequency: a single pass is designed with
/// `|H(fc)|² = 1/√2`, so the squared zero-phase response equals `1/2` there.
#[derive(Debug, Clone, PartialEq)]
pub struct ButterworthLowPass {
    sections: Vec<Biquad>,
}

impl ButterworthLowPass {
    pub fn design(spec: &FilterSpec, sample_rate_hz: f64) -> Result<Self> {
        spec.validate(sample_rate_hz)?;
        let n = spec.order;
        // Bilinear transform with s = (1 - z^-1) / (1 + z^-1): prewarp.
        let warped = (PI * spec.cutoff_hz / sample_rate_hz).tan();
        let correction = (SQRT_2 - 1.0).powf(1.0 / (2.0 * n as f64));
        let wc = warped / correction;

        let mut sections = Vec::with_capacity(n.div_ceil(2));
        for k in 0..n / 2 {
            // Conjugate pole pair on the unit circle of the analog prototype.
            let theta = PI * (2 * k + n + 1) as f64 / (2 * n) as f64;
            let damping = -2.0 * theta.cos() * wc;
            let w2 = wc * wc;
            let a0 = 1.0 + damping + w2;
            sections.push(Biquad {
                b: [w2 / a0, 2.0 * w2 / a0, w2 / a0],
                a: [(2.0 * w2 - 2.0) / a0, (1.0 - damping + w2) / a0],
            });
        }
        if n % 2 == 1 {
            let a0 = 1.0 + wc;
            sections.push(Biquad {
                b: [wc / a0, wc / a0, 0.0],
                a: [(wc - 1.0) / a0, 0.0],
            });
        }
        Ok(Self { sections })
    }

    pub fn sections(&self) -> &[Biquad] {
        &self.sections
    }

    /// Single causal pass starting from the steady state of `data[0]`.
    fn pass(&self, data: &mut [f64]) {
        let mut level = data[0];
        for section in &self.sections {
            let state = section.steady_state(level);
            level *= section.dc_gain();
            section.run(data, state);
        }
    }

    /// Zero-phase (forward-backward) filtering with odd-reflection padding.
    pub fn filtfilt(&self, x: &[f64]) -> Vec<f64> {
        if x.is_empty() {
            return Vec::new();
        }
        let pad = (3 * (2 * self.sections.len() + 1)).min(x.len() - 1);
        let first = x[0];
        let last = x[x.len() - 1];
        let mut ext = Vec::with_capacity(x.len() + 2 * pad);
        ext.extend((1..=pad).rev().map(|i| 2.0 * first - x[i]));
        ext.extend_from_slice(x);
        ext.extend((1..=pad).map(|i| 2.0 * last - x[x.len() - 1 - i]));

        self.pass(&mut ext);
        ext.reverse();
        self.pass(&mut ext);
        ext.reverse();
        ext.drain(..pad);
        ext.truncate(x.len());
        ext
    }
}

/// Low-pass every channel with a zero-phase Butterworth filter.
pub fn low_pass_filter(recording: &Recording, spec: &FilterSpec) -> Result<Recording> {
    if recording.is_empty() {
        return Err(Error::input("cannot filter an empty recording"));
    }
    let filter = ButterworthLowPass::design(spec, recording.sample_rate_hz())?;
    let samples = recording
        .samples()
        .iter()
        .map(|channel| filter.filtfilt(channel))
        .collect();
    Ok(recording.with_samples(samples))
}

/// Cut every channel into consecutive non-overlapping windows. Trailing
/// samples that do not fill a whole window are dropped.
pub fn segment(recording: &Recording, segment_length: usize) -> Result<Vec<Frame>> {
    if segment_length < 2 {
        return Err(Error::input(format!(
            "segment length must be at least 2, got {segment_length}"
        )));
    }
    let n_frames = recording.len() / segment_length;
    let frames = (0..n_frames)
        .map(|index| {
            let start = index * segment_length;
            let segments = recording
                .channels()
                .iter()
                .zip(recording.samples())
                .map(|(name, data)| Segment {
                    channel: name.clone(),
                    frame_index: index,
                    samples: data[start..start + segment_length].to_vec(),
                    label: recording.label,
                })
                .collect();
            Frame {
                index,
                label: recording.label,
                segments,
            }
        })
        .collect();
    Ok(frames)
}
