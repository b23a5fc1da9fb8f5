//! Leave-one-out evaluation of single-channel PNNs and the voted ensemble,
//! feature-combination studies and configuration sweeps.
//!
//! Evaluation works at segment (frame) granularity: a held-out sample is one
//! segment, and segments from the same subject can appear on both sides of a
//! fold.

mod dataset;
mod loocv;
mod render;
mod study;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use dataset::{build_dataset, recording_features, FeatureDataset, FrameFeatures};
pub use loocv::{fold_model, loocv_channel, loocv_voted, ChannelResult, VotedResult};
pub use render::{render_feature_study, render_report, render_sweep};
pub use study::{
    config_sweep, feature_study, standard_grid, FeatureStudy, SweepFailure, SweepOutcome,
};

use crate::ensemble::TiePolicy;
use crate::error::{Error, Result};
use crate::features::{ExtractionConfig, FeatureVector};
use crate::signal::Label;

/// Which feature families feed the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureSelection {
    pub include_rir: bool,
    pub include_fds: bool,
    pub include_hjorth: bool,
}

impl Default for FeatureSelection {
    fn default() -> Self {
        Self::ALL
    }
}

impl FeatureSelection {
    pub const ALL: Self = Self::new(true, true, true);

    pub const fn new(include_rir: bool, include_fds: bool, include_hjorth: bool) -> Self {
        Self {
            include_rir,
            include_fds,
            include_hjorth,
        }
    }

    /// The seven non-empty combinations, in the column order of the
    /// single-channel accuracy table.
    pub fn all_combinations() -> [Self; 7] {
        [
            Self::new(true, true, true),
            Self::new(false, true, true),
            Self::new(false, true, false),
            Self::new(true, false, false),
            Self::new(false, false, true),
            Self::new(true, true, false),
            Self::new(true, false, true),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        if self.include_rir || self.include_fds || self.include_hjorth {
            Ok(())
        } else {
            Err(Error::config("feature selection is empty"))
        }
    }

    /// Dimension after masking a vector with `n_bins` RIR entries.
    pub fn dim(&self, n_bins: usize) -> usize {
        usize::from(self.include_rir) * n_bins
            + usize::from(self.include_fds) * 2
            + usize::from(self.include_hjorth) * 2
    }

    /// Mask a flattened vector laid out as `[rir; n_bins] pfd hfd mob comp`.
    pub fn select_flat(&self, flat: &[f64], n_bins: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim(n_bins));
        if self.include_rir {
            out.extend_from_slice(&flat[..n_bins]);
        }
        if self.include_fds {
            out.extend_from_slice(&flat[n_bins..n_bins + 2]);
        }
        if self.include_hjorth {
            out.extend_from_slice(&flat[n_bins + 2..n_bins + 4]);
        }
        out
    }

    pub fn select(&self, fv: &FeatureVector) -> Vec<f64> {
        self.select_flat(&fv.to_vec(), fv.rir.len())
    }

    /// Short token used on the command line, e.g. `rir+fd`.
    pub fn token(&self) -> String {
        if *self == Self::ALL {
            return "all".into();
        }
        let parts: Vec<&str> = [
            (self.include_rir, "rir"),
            (self.include_fds, "fd"),
            (self.include_hjorth, "hjorth"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, name)| *name)
        .collect();
        parts.join("+")
    }

    /// Column heading as used in the accuracy tables.
    pub fn heading(&self) -> String {
        let parts: Vec<&str> = [
            (self.include_rir, "RIRs"),
            (self.include_fds, "FDs"),
            (self.include_hjorth, "Hjorth's"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, name)| *name)
        .collect();
        parts.join(" & ")
    }
}

impl std::str::FromStr for FeatureSelection {
    type Err = Error;

    /// `all`, or families joined by `+` or `,`: `rir`, `fd`, `hjorth`.
    fn from_str(s: &str) -> Result<Self> {
        let mut sel = Self::new(false, false, false);
        for part in s.split(['+', ',']).map(str::trim) {
            match part.to_ascii_lowercase().as_str() {
                "all" => sel = Self::ALL,
                "rir" | "rirs" => sel.include_rir = true,
                "fd" | "fds" => sel.include_fds = true,
                "hjorth" => sel.include_hjorth = true,
                other => {
                    return Err(Error::config(format!(
                        "unknown feature family `{other}` (expected all, rir, fd, hjorth)"
                    )))
                }
            }
        }
        sel.validate()?;
        Ok(sel)
    }
}

/// Confusion counts with Epileptic as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn record(&mut self, truth: usize, predicted: usize, positive: usize) {
        match (truth == positive, predicted == positive) {
            (true, true) => self.tp += 1,
            (true, false) => self.fn_ += 1,
            (false, true) => self.fp += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.total())
    }

    /// TP / (TP + FN); also the true positive rate.
    pub fn sensitivity(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// TN / (TN + FP).
    pub fn specificity(&self) -> f64 {
        ratio(self.tn, self.tn + self.fp)
    }

    /// FP / (FP + TN).
    pub fn false_positive_rate(&self) -> f64 {
        ratio(self.fp, self.fp + self.tn)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelAccuracy {
    pub channel: String,
    pub accuracy: f64,
    pub confusion: Confusion,
}

/// Outcome of one voted LOOCV run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: ExtractionConfig,
    pub config_id: String,
    pub selection: FeatureSelection,
    pub feature_dim: usize,
    pub spread: f64,
    pub tie_policy: TiePolicy,
    pub per_channel: Vec<ChannelAccuracy>,
    pub voted_accuracy: f64,
    pub true_positive_rate: f64,
    pub false_positive_rate: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub confusion: Confusion,
    pub sample_counts: BTreeMap<Label, usize>,
}

impl EvalReport {
    pub fn mean_channel_accuracy(&self) -> f64 {
        if self.per_channel.is_empty() {
            return 0.0;
        }
        self.per_channel.iter().map(|c| c.accuracy).sum::<f64>() / self.per_channel.len() as f64
    }

    pub fn max_channel_accuracy(&self) -> f64 {
        self.per_channel
            .iter()
            .map(|c| c.accuracy)
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
