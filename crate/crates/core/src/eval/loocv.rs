use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{ChannelAccuracy, Confusion, EvalReport, FeatureDataset, FeatureSelection};
use crate::ensemble::{majority, TiePolicy};
use crate::error::{Error, Result};
use crate::features::Normalizer;
use crate::pnn::{
    activation, bias_for_spread, competitive, nearest_class, squared_distance, PnnModel,
};
use crate::BINARY_CLASSES;

const POSITIVE: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelResult {
    pub accuracy: f64,
    pub confusion: Confusion,
    /// Prediction for each sample when it was held out.
    pub predictions: Vec<usize>,
}

fn binary_class_names() -> Vec<String> {
    BINARY_CLASSES.iter().map(|l| l.to_string()).collect()
}

fn check_binary(labels: &[usize], n: usize) -> Result<()> {
    if n != labels.len() {
        return Err(Error::input(format!(
            "{n} vectors but {} labels",
            labels.len()
        )));
    }
    if n < 2 {
        return Err(Error::Eval(format!(
            "LOOCV needs at least 2 samples, got {n}"
        )));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= BINARY_CLASSES.len()) {
        return Err(Error::input(format!(
            "label {bad} is not a binary class index"
        )));
    }
    if !(labels.contains(&0) && labels.contains(&1)) {
        return Err(Error::Eval("LOOCV needs samples from both classes".into()));
    }
    Ok(())
}

/// The PNN trained for fold `held_out`: every sample except that one.
pub fn fold_model<V: AsRef<[f64]>>(
    vectors: &[V],
    labels: &[usize],
    held_out: usize,
    spread: f64,
) -> Result<PnnModel> {
    let (train, train_labels): (Vec<&[f64]>, Vec<usize>) = vectors
        .iter()
        .zip(labels)
        .enumerate()
        .filter(|&(i, _)| i != held_out)
        .map(|(_, (v, &l))| (v.as_ref(), l))
        .unzip();
    PnnModel::train(&train, &train_labels, binary_class_names(), spread)
}

/// Prediction for fold `i` without building the fold's model.
///
/// The fold normalizer is fit over all rows but `i`, and the exemplar rows
/// are normalized on the fly; the arithmetic is the same as in
/// [`PnnModel::train`] and [`PnnModel::classify`], so predictions are
/// identical to training each fold from scratch.
fn masked_prediction(rows: &[&[f64]], labels: &[usize], i: usize, bias: f64) -> Result<usize> {
    let others = rows
        .iter()
        .enumerate()
        .filter(move |&(j, _)| j != i)
        .map(|(_, r)| *r);
    let normalizer = Normalizer::fit_iter(others.clone())?;
    let probe = normalizer.apply(rows[i])?;
    let mut scratch = vec![0.0; probe.len()];
    let mut scores = [0.0; 2];
    let mut dist2 = Vec::with_capacity(rows.len() - 1);
    for (j, row) in rows.iter().enumerate() {
        if j == i {
            continue;
        }
        for (k, (s, &v)) in scratch.iter_mut().zip(row.iter()).enumerate() {
            *s = normalizer.apply_one(k, v);
        }
        let d2 = squared_distance(&scratch, &probe);
        scores[labels[j]] += activation(d2, bias);
        dist2.push((d2, labels[j]));
    }
    Ok(competitive(&scores).unwrap_or_else(|| nearest_class(dist2.into_iter())))
}

/// Leave-one-out accuracy of a single-channel PNN. Labels are binary class
/// indices (0 = Healthy, 1 = Epileptic).
pub fn loocv_channel<V: AsRef<[f64]> + Sync>(
    vectors: &[V],
    labels: &[usize],
    spread: f64,
) -> Result<ChannelResult> {
    check_binary(labels, vectors.len())?;
    if !(spread > 0.0 && spread.is_finite()) {
        return Err(Error::input(format!(
            "spread must be positive, got {spread}"
        )));
    }
    let rows: Vec<&[f64]> = vectors.iter().map(AsRef::as_ref).collect();
    let dim = rows[0].len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(Error::input("feature dimension mismatch across samples"));
    }
    let bias = bias_for_spread(spread);
    let predictions = (0..rows.len())
        .into_par_iter()
        .map(|i| masked_prediction(&rows, labels, i, bias))
        .collect::<Result<Vec<_>>>()?;
    let mut confusion = Confusion::default();
    for (&t, &p) in labels.iter().zip(&predictions) {
        confusion.record(t, p, POSITIVE);
    }
    Ok(ChannelResult {
        accuracy: confusion.accuracy(),
        confusion,
        predictions,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VotedResult {
    pub report: EvalReport,
    pub channel_results: Vec<ChannelResult>,
    /// Voted decision per frame.
    pub decisions: Vec<usize>,
}

/// Voted LOOCV: each held-out frame is classified by per-channel PNNs trained
/// on the same channel of every other frame, then the channels vote.
pub fn loocv_voted(
    dataset: &FeatureDataset,
    selection: FeatureSelection,
    spread: f64,
    tie_policy: TiePolicy,
) -> Result<VotedResult> {
    selection.validate()?;
    let n_channels = dataset.channels.len();
    let fingerprint = dataset.config.fingerprint();
    let mut labels = Vec::with_capacity(dataset.frames.len());
    for f in &dataset.frames {
        if f.vectors.len() != n_channels {
            return Err(Error::input(format!(
                "subject {} frame {} has {} channels, expected {n_channels}",
                f.subject_id,
                f.frame_index,
                f.vectors.len()
            )));
        }
        if let Some(v) = f.vectors.iter().find(|v| v.config_id != fingerprint) {
            return Err(Error::input(format!(
                "subject {} frame {} was extracted with {}, expected {fingerprint}",
                f.subject_id, f.frame_index, v.config_id
            )));
        }
        let label = f
            .label
            .class_index()
            .ok_or_else(|| Error::input(format!("subject {} has no class label", f.subject_id)))?;
        labels.push(label);
    }
    check_binary(&labels, labels.len())?;
    let n_bins = dataset.n_bins();

    let channel_results = (0..n_channels)
        .into_par_iter()
        .map(|c| {
            let vectors: Vec<Vec<f64>> = dataset
                .frames
                .iter()
                .map(|f| selection.select_flat(&f.vectors[c].to_vec(), n_bins))
                .collect();
            loocv_channel(&vectors, &labels, spread)
                .map_err(|e| e.context(format!("channel {}", dataset.channels[c])))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut confusion = Confusion::default();
    let mut decisions = Vec::with_capacity(labels.len());
    for (i, &truth) in labels.iter().enumerate() {
        let votes: Vec<usize> = channel_results.iter().map(|r| r.predictions[i]).collect();
        let (decision, _) = majority(&votes, BINARY_CLASSES.len(), POSITIVE, tie_policy);
        confusion.record(truth, decision, POSITIVE);
        decisions.push(decision);
    }

    let mut sample_counts = BTreeMap::new();
    for (c, label) in BINARY_CLASSES.iter().enumerate() {
        sample_counts.insert(*label, labels.iter().filter(|&&l| l == c).count());
    }
    let report = EvalReport {
        config: dataset.config,
        config_id: fingerprint,
        selection,
        feature_dim: selection.dim(n_bins),
        spread,
        tie_policy,
        per_channel: dataset
            .channels
            .iter()
            .zip(&channel_results)
            .map(|(name, r)| ChannelAccuracy {
                channel: name.clone(),
                accuracy: r.accuracy,
                confusion: r.confusion,
            })
            .collect(),
        voted_accuracy: confusion.accuracy(),
        true_positive_rate: confusion.sensitivity(),
        false_positive_rate: confusion.false_positive_rate(),
        sensitivity: confusion.sensitivity(),
        specificity: confusion.specificity(),
        confusion,
        sample_counts,
    };
    Ok(VotedResult {
        report,
        channel_results,
        decisions,
    })
}
