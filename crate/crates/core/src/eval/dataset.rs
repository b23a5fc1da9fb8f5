use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::{extract_samples, ExtractionConfig, FeatureVector};
use crate::signal::{low_pass_filter, segment, Label, Recording};

/// Features of one frame: one flattened vector per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameFeatures {
    pub subject_id: String,
    pub frame_index: usize,
    pub label: Label,
    pub vectors: Vec<FeatureVector>,
}

/// Frames from many recordings that share a channel layout and configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDataset {
    pub channels: Vec<String>,
    pub config: ExtractionConfig,
    pub sample_rate_hz: f64,
    pub frames: Vec<FrameFeatures>,
}

impl FeatureDataset {
    pub fn n_bins(&self) -> usize {
        self.frames
            .first()
            .and_then(|f| f.vectors.first())
            .map(|v| v.rir.len())
            .unwrap_or_else(|| self.config.n_bins().unwrap_or(0))
    }
}

/// Filter, segment and extract every frame of one recording. Recordings
/// shorter than one segment yield no frames.
pub fn recording_features(
    recording: &Recording,
    config: &ExtractionConfig,
) -> Result<Vec<FrameFeatures>> {
    let fs = recording.sample_rate_hz();
    config.validate(fs)?;
    if recording.len() < config.segment_length {
        return Ok(Vec::new());
    }
    let filtered = low_pass_filter(recording, &config.filter)?;
    let frames = segment(&filtered, config.segment_length)?;
    frames
        .par_iter()
        .map(|frame| {
            let vectors = frame
                .segments
                .iter()
                .map(|s| {
                    extract_samples(&s.samples, config, fs).map_err(|e| {
                        e.context(format!(
                            "subject {} channel {} frame {}",
                            recording.subject_id, s.channel, s.frame_index
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(FrameFeatures {
                subject_id: recording.subject_id.clone(),
                frame_index: frame.index,
                label: frame.label,
                vectors,
            })
        })
        .collect()
}

/// Run the extraction pipeline over a set of recordings.
pub fn build_dataset(
    recordings: &[Recording],
    config: &ExtractionConfig,
) -> Result<FeatureDataset> {
    let first = recordings
        .first()
        .ok_or_else(|| Error::input("no recordings given"))?;
    let fs = first.sample_rate_hz();
    for r in recordings {
        if r.sample_rate_hz() != fs {
            return Err(Error::input(format!(
                "subject {} is sampled at {} Hz, expected {fs} Hz",
                r.subject_id,
                r.sample_rate_hz()
            )));
        }
        if r.channels() != first.channels() {
            return Err(Error::input(format!(
                "subject {} has a different channel layout than subject {}",
                r.subject_id, first.subject_id
            )));
        }
    }
    let per_recording = recordings
        .par_iter()
        .map(|r| recording_features(r, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(FeatureDataset {
        channels: first.channels().to_vec(),
        config: *config,
        sample_rate_hz: fs,
        frames: per_recording.into_iter().flatten().collect(),
    })
}
