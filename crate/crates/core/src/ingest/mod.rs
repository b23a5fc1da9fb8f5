//! Loading recordings from disk and generating synthetic ones.
//!
//! On disk a dataset is a JSON manifest plus one CSV file per recording: a
//! header row of channel names followed by one row per sample, amplitudes in
//! microvolts. Numbers are written in shortest round-trip decimal form, so a
//! write/read cycle reproduces every sample bit for bit.

mod csv_io;
mod synth;

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use csv_io::{read_recording_csv, write_recording};
pub use synth::{
    standard_channel_names, synthesize, synthesize_with_events, SpikeEvent, SynthOutput, SynthSpec,
    STANDARD_CHANNELS,
};

use crate::error::{Error, Result};
use crate::signal::{Label, Recording};

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative paths are resolved against the manifest's directory.
    pub data_path: PathBuf,
    pub subject_id: String,
    pub label: Label,
    pub sample_rate_hz: f64,
    pub channel_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Self {
        Self {
            format_version: MANIFEST_VERSION,
            entries,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != MANIFEST_VERSION {
            return Err(Error::input(format!(
                "unsupported manifest format_version {} (expected {MANIFEST_VERSION})",
                self.format_version
            )));
        }
        let mut paths = HashSet::new();
        for e in &self.entries {
            if !paths.insert(&e.data_path) {
                return Err(Error::input(format!(
                    "data path {} listed twice",
                    e.data_path.display()
                )));
            }
            if e.label == Label::Unknown {
                return Err(Error::input(format!(
                    "subject {} must be labelled Epileptic or Healthy",
                    e.subject_id
                )));
            }
            if !(e.sample_rate_hz > 0.0 && e.sample_rate_hz.is_finite()) {
                return Err(Error::input(format!(
                    "subject {} has invalid sample rate {}",
                    e.subject_id, e.sample_rate_hz
                )));
            }
            if e.channel_names.is_empty() {
                return Err(Error::input(format!(
                    "subject {} lists no channels",
                    e.subject_id
                )));
            }
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: Self = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

/// Read one manifest entry's CSV and check it against the entry.
pub fn load_recording(path: impl AsRef<Path>, entry: &ManifestEntry) -> Result<Recording> {
    let path = path.as_ref();
    let (channels, samples) = read_recording_csv(path)?;
    if channels != entry.channel_names {
        return Err(Error::input(format!(
            "{}: header has {} channels {:?}, manifest lists {} {:?}",
            path.display(),
            channels.len(),
            channels,
            entry.channel_names.len(),
            entry.channel_names
        )));
    }
    Recording::new(
        channels,
        samples,
        entry.sample_rate_hz,
        entry.subject_id.clone(),
        entry.label,
    )
    .map_err(|e| e.context(path.display().to_string()))
}

/// Load every recording listed in a manifest, in manifest order.
pub fn load_dataset(manifest_path: impl AsRef<Path>) -> Result<(DatasetManifest, Vec<Recording>)> {
    let manifest_path = manifest_path.as_ref();
    let manifest = DatasetManifest::load(manifest_path)?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let recordings = manifest
        .entries
        .iter()
        .map(|e| load_recording(base.join(&e.data_path), e))
        .collect::<Result<Vec<_>>>()?;
    Ok((manifest, recordings))
}
