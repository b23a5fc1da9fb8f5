//! Per-channel PNNs combined by unweighted majority vote.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::FeatureSelection;
use crate::features::{ExtractionConfig, FeatureVector};
use crate::pnn::PnnModel;
use crate::signal::Label;

/// How a vote split evenly between the top classes is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TiePolicy {
    #[default]
    FavorPositive,
    FavorNegative,
    LowestIndex,
}

impl TiePolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            TiePolicy::FavorPositive => "positive",
            TiePolicy::FavorNegative => "negative",
            TiePolicy::LowestIndex => "lowest",
        }
    }

    /// Pick one of `tied` (ascending class indices, non-empty).
    pub fn resolve(self, tied: &[usize], positive: usize) -> usize {
        match self {
            TiePolicy::FavorPositive if tied.contains(&positive) => positive,
            TiePolicy::FavorNegative => tied
                .iter()
                .copied()
                .find(|&c| c != positive)
                .unwrap_or(positive),
            _ => tied[0],
        }
    }
}

impl std::str::FromStr for TiePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive" => Ok(TiePolicy::FavorPositive),
            "negative" => Ok(TiePolicy::FavorNegative),
            "lowest" => Ok(TiePolicy::LowestIndex),
            other => Err(Error::config(format!(
                "unknown tie policy `{other}` (expected positive, negative or lowest)"
            ))),
        }
    }
}

/// Majority decision from per-member class votes.
pub fn majority(
    votes: &[usize],
    n_classes: usize,
    positive: usize,
    tie: TiePolicy,
) -> (usize, Vec<usize>) {
    let mut tally = vec![0usize; n_classes];
    for &v in votes {
        tally[v] += 1;
    }
    let top = tally.iter().copied().max().unwrap_or(0);
    let tied: Vec<usize> = (0..n_classes).filter(|&c| tally[c] == top).collect();
    (tie.resolve(&tied, positive), tally)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoteOutcome {
    pub decision: Label,
    pub tally: BTreeMap<Label, usize>,
    pub per_channel: BTreeMap<String, Label>,
}

/// One PNN per channel over the binary Healthy/Epileptic task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelEnsemble {
    pub format_version: u32,
    pub config: ExtractionConfig,
    pub sample_rate_hz: f64,
    pub selection: FeatureSelection,
    pub positive_class: Label,
    pub tie_policy: TiePolicy,
    members: Vec<(String, PnnModel)>,
}

impl ChannelEnsemble {
    pub fn new(
        members: Vec<(String, PnnModel)>,
        config: ExtractionConfig,
        sample_rate_hz: f64,
        selection: FeatureSelection,
        tie_policy: TiePolicy,
    ) -> Result<Self> {
        let ensemble = Self {
            format_version: 1,
            config,
            sample_rate_hz,
            selection,
            positive_class: Label::Epileptic,
            tie_policy,
            members,
        };
        ensemble.check()?;
        Ok(ensemble)
    }

    fn check(&self) -> Result<()> {
        if self.members.is_empty() {
            return Err(Error::input("ensemble has no members"));
        }
        let fingerprint = self.config.fingerprint();
        let classes: Vec<String> = crate::BINARY_CLASSES
            .iter()
            .map(|l| l.to_string())
            .collect();
        for (channel, model) in &self.members {
            if model.class_names() != classes.as_slice() {
                return Err(Error::input(format!(
                    "member `{channel}` has classes {:?}, expected {classes:?}",
                    model.class_names()
                )));
            }
            if model.config_id() != Some(fingerprint.as_str()) {
                return Err(Error::input(format!(
                    "member `{channel}` was trained with configuration {:?}, expected {fingerprint}",
                    model.config_id()
                )));
            }
        }
        Ok(())
    }

    pub fn channels(&self) -> impl Iterator<Item = &str> {
        self.members.iter().map(|(c, _)| c.as_str())
    }

    pub fn members(&self) -> &[(String, PnnModel)] {
        &self.members
    }

    pub fn vote(&self, frame: &BTreeMap<String, FeatureVector>) -> Result<VoteOutcome> {
        for channel in frame.keys() {
            if !self.members.iter().any(|(c, _)| c == channel) {
                return Err(Error::input(format!(
                    "frame has unexpected channel `{channel}`"
                )));
            }
        }
        let fingerprint = self.config.fingerprint();
        let mut votes = Vec::with_capacity(self.members.len());
        let mut per_channel = BTreeMap::new();
        for (channel, model) in &self.members {
            let fv = frame
                .get(channel)
                .ok_or_else(|| Error::input(format!("frame is missing channel `{channel}`")))?;
            if fv.config_id != fingerprint {
                return Err(Error::input(format!(
                    "channel `{channel}` features come from configuration {}, ensemble expects {fingerprint}",
                    fv.config_id
                )));
            }
            let class = model.classify(&self.selection.select(fv))?.class;
            votes.push(class);
            per_channel.insert(channel.clone(), class_label(class));
        }
        let positive = self.positive_class.class_index().unwrap_or(1);
        let (decision, counts) = majority(
            &votes,
            crate::BINARY_CLASSES.len(),
            positive,
            self.tie_policy,
        );
        let tally = counts
            .iter()
            .enumerate()
            .map(|(c, &n)| (class_label(c), n))
            .collect();
        Ok(VoteOutcome {
            decision: class_label(decision),
            tally,
            per_channel,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ensemble: Self = serde_json::from_str(text)?;
        if ensemble.format_version != 1 {
            return Err(Error::input(format!(
                "unsupported ensemble format version {}",
                ensemble.format_version
            )));
        }
        ensemble.check()?;
        Ok(ensemble)
    }
}

fn class_label(index: usize) -> Label {
    Label::from_class_index(index).unwrap_or(Label::Unknown)
}
