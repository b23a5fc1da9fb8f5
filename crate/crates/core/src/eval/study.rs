use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    build_dataset, loocv_channel, loocv_voted, EvalReport, FeatureDataset, FeatureSelection,
};
use crate::ensemble::TiePolicy;
use crate::error::{Error, Result};
use crate::features::{ExtractionConfig, SpectralBandSpec};
use crate::signal::Recording;

/// Single-channel LOOCV accuracy for every (channel, feature combination).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStudy {
    pub config_id: String,
    pub channels: Vec<String>,
    pub selections: Vec<FeatureSelection>,
    /// `accuracy[channel][selection]`.
    pub accuracy: Vec<Vec<f64>>,
    pub column_means: Vec<f64>,
    /// Column with the highest mean accuracy (first on ties).
    pub best: usize,
}

pub fn feature_study(
    dataset: &FeatureDataset,
    selections: &[FeatureSelection],
    spread: f64,
) -> Result<FeatureStudy> {
    if selections.is_empty() {
        return Err(Error::config("no feature selections given"));
    }
    for s in selections {
        s.validate()?;
    }
    let labels = dataset
        .frames
        .iter()
        .map(|f| {
            f.label
                .class_index()
                .ok_or_else(|| Error::input(format!("subject {} has no class label", f.subject_id)))
        })
        .collect::<Result<Vec<_>>>()?;
    let n_bins = dataset.n_bins();
    let cells: Vec<(usize, usize)> = (0..dataset.channels.len())
        .flat_map(|c| (0..selections.len()).map(move |s| (c, s)))
        .collect();
    let values = cells
        .par_iter()
        .map(|&(c, s)| {
            let vectors: Vec<Vec<f64>> = dataset
                .frames
                .iter()
                .map(|f| selections[s].select_flat(&f.vectors[c].to_vec(), n_bins))
                .collect();
            loocv_channel(&vectors, &labels, spread).map(|r| r.accuracy)
        })
        .collect::<Result<Vec<_>>>()?;
    let accuracy: Vec<Vec<f64>> = values
        .chunks(selections.len())
        .map(<[f64]>::to_vec)
        .collect();
    let column_means: Vec<f64> = (0..selections.len())
        .map(|s| accuracy.iter().map(|row| row[s]).sum::<f64>() / accuracy.len() as f64)
        .collect();
    let best =
        column_means.iter().enumerate().fold(
            0,
            |best, (i, &m)| if m > column_means[best] { i } else { best },
        );
    Ok(FeatureStudy {
        config_id: dataset.config.fingerprint(),
        channels: dataset.channels.clone(),
        selections: selections.to_vec(),
        accuracy,
        column_means,
        best,
    })
}

/// The configurations evaluated in the original parameter study: both
/// segment lengths, four cutoffs (the two highest only for 8192 samples) and
/// three band/bin settings.
pub fn standard_grid() -> Vec<ExtractionConfig> {
    let bands = [
        SpectralBandSpec::new(2.0, 32.0, 1.0),
        SpectralBandSpec::new(2.0, 34.0, 2.0),
        SpectralBandSpec::new(2.0, 34.5, 2.5),
    ];
    let rows: [(usize, &[f64]); 2] = [(4096, &[40.0, 46.0]), (8192, &[40.0, 46.0, 56.0, 66.0])];
    let mut grid = Vec::new();
    for (length, cutoffs) in rows {
        for &cutoff in cutoffs {
            for band in bands {
                grid.push(ExtractionConfig::new(length, cutoff, band));
            }
        }
    }
    grid
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFailure {
    pub config: ExtractionConfig,
    pub config_id: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    /// Successful runs, best voted accuracy first (grid order on ties).
    pub reports: Vec<EvalReport>,
    pub failures: Vec<SweepFailure>,
    /// Every configuration in the order it was requested.
    pub grid: Vec<ExtractionConfig>,
}

impl SweepOutcome {
    pub fn best(&self) -> Option<&EvalReport> {
        self.reports.first()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Full pipeline (filter, segment, extract, voted LOOCV) for each
/// configuration. A failing configuration is recorded and the sweep goes on.
pub fn config_sweep(
    recordings: &[Recording],
    configs: &[ExtractionConfig],
    selection: FeatureSelection,
    spread: f64,
    tie_policy: TiePolicy,
) -> SweepOutcome {
    let results: Vec<Result<EvalReport>> = configs
        .par_iter()
        .map(|config| {
            let dataset = build_dataset(recordings, config)?;
            Ok(loocv_voted(&dataset, selection, spread, tie_policy)?.report)
        })
        .collect();
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (config, result) in configs.iter().zip(results) {
        match result {
            Ok(r) => reports.push(r),
            Err(e) => failures.push(SweepFailure {
                config: *config,
                config_id: config.fingerprint(),
                error: e.to_string(),
            }),
        }
    }
    // Stable sort keeps grid order among equal accuracies.
    reports.sort_by(|a, b| b.voted_accuracy.total_cmp(&a.voted_accuracy));
    SweepOutcome {
        reports,
        failures,
        grid: configs.to_vec(),
    }
}
