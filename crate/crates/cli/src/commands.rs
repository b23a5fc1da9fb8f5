use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use eegpnn_core::ensemble::majority;
use eegpnn_core::eval::{
    build_dataset, config_sweep, feature_study, loocv_voted, recording_features,
    render_feature_study, render_report, render_sweep, standard_grid, FeatureDataset, FeatureStudy,
    SweepOutcome,
};
use eegpnn_core::ingest::{load_dataset, read_recording_csv, synthesize, write_recording};
use eegpnn_core::{
    ChannelEnsemble, DatasetManifest, EvalReport, ExtractionConfig, FeatureSelection, Label,
    ManifestEntry, PnnModel, Recording, SynthSpec, BINARY_CLASSES,
};
use rayon::prelude::*;
use serde_json::json;

use crate::{
    ClassChoice, ClassifyArgs, Command, ExtractArgs, GenArgs, GridChoice, LoocvArgs, ModelArgs,
    ReportArgs, SweepArgs, TrainArgs, UsageError,
};

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Gen(a) => gen(a),
        Command::Extract(a) => extract(a),
        Command::Loocv(a) => loocv(a),
        Command::Sweep(a) => sweep(a),
        Command::Train(a) => train(a),
        Command::Classify(a) => classify(a),
        Command::Report(a) => report(a),
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Create the output directory and make sure files can be written into it.
fn prepare_out(dir: &Path) -> Result<&Path> {
    let probe = dir.join(".eegpnn-write-check");
    fs::create_dir_all(dir)
        .and_then(|_| fs::write(&probe, b""))
        .and_then(|_| fs::remove_file(&probe))
        .map_err(|e| {
            usage(format!(
                "output directory {} is not writable: {e}",
                dir.display()
            ))
        })?;
    Ok(dir)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn check_model_args(m: &ModelArgs) -> Result<()> {
    if !(m.spread > 0.0 && m.spread.is_finite()) {
        return Err(usage(format!(
            "--spread must be positive, got {}",
            m.spread
        )));
    }
    m.features.validate()?;
    Ok(())
}

fn load_recordings(manifest: &Path) -> Result<Vec<Recording>> {
    let (_, recordings) = load_dataset(manifest)
        .with_context(|| format!("loading dataset {}", manifest.display()))?;
    if recordings.is_empty() {
        return Err(usage(format!("{} lists no recordings", manifest.display())));
    }
    Ok(recordings)
}

fn load_features(manifest: &Path, config: &ExtractionConfig) -> Result<FeatureDataset> {
    let recordings = load_recordings(manifest)?;
    config.validate(recordings[0].sample_rate_hz())?;
    build_dataset(&recordings, config).context("extracting features")
}

/// Seed of subject `index` in class `class`, derived from the run seed.
fn subject_seed(seed: u64, class: Label, index: usize) -> u64 {
    let tag = u64::from(class == Label::Epileptic) << 32;
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (tag | index as u64)
}

fn gen(a: GenArgs) -> Result<()> {
    if a.subjects == 0 {
        return Err(usage("--subjects must be at least 1"));
    }
    if a.channels == 0 {
        return Err(usage("--channels must be at least 1"));
    }
    let classes: &[Label] = match a.classes {
        ClassChoice::Both => &[Label::Healthy, Label::Epileptic],
        ClassChoice::Epileptic => &[Label::Epileptic],
        ClassChoice::Healthy => &[Label::Healthy],
    };
    let mut specs = Vec::new();
    for &class in classes {
        for i in 0..a.subjects {
            let seed = subject_seed(a.seed, class, i);
            let spec = match class {
                Label::Epileptic => {
                    let spread = if a.subjects > 1 {
                        i as f64 / (a.subjects - 1) as f64
                    } else {
                        0.5
                    };
                    SynthSpec::epileptic(seed, a.spike_rate * (0.5 + spread))
                }
                _ => SynthSpec::healthy(seed),
            };
            specs.push(SynthSpec {
                subject_id: format!("{}-{:02}", class.as_str().to_lowercase(), i + 1),
                duration_s: a.duration,
                sample_rate_hz: a.sample_rate,
                n_channels: a.channels,
                ..spec
            });
        }
    }
    for spec in &specs {
        spec.validate()?;
    }
    let dir = prepare_out(&a.out.out)?;
    let recordings = specs
        .par_iter()
        .map(synthesize)
        .collect::<eegpnn_core::Result<Vec<_>>>()?;
    let mut entries = Vec::with_capacity(recordings.len());
    for rec in &recordings {
        let file = format!("{}.csv", rec.subject_id);
        write_recording(dir.join(&file), rec)?;
        entries.push(ManifestEntry {
            data_path: file.into(),
            subject_id: rec.subject_id.clone(),
            label: rec.label,
            sample_rate_hz: rec.sample_rate_hz(),
            channel_names: rec.channels().to_vec(),
        });
    }
    DatasetManifest::new(entries).save(dir.join("manifest.json"))?;
    println!("wrote {} recordings and manifest.json", recordings.len());
    Ok(())
}

fn extract(a: ExtractArgs) -> Result<()> {
    let config = a.config.config();
    let data = load_features(&a.manifest, &config)?;
    let dir = prepare_out(&a.out.out)?;
    let frames: Vec<_> = data
        .frames
        .iter()
        .map(|f| {
            json!({
                "subject_id": f.subject_id,
                "frame_index": f.frame_index,
                "label": f.label,
                "vectors": f.vectors,
            })
        })
        .collect();
    let doc = json!({
        "config": data.config,
        "config_id": data.config.fingerprint(),
        "sample_rate_hz": data.sample_rate_hz,
        "channels": data.channels,
        "frames": frames,
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    write_text(&dir.join("features.json"), &text)?;
    println!(
        "{} frames x {} channels, {} features each ({})",
        data.frames.len(),
        data.channels.len(),
        data.n_bins() + 4,
        data.config.fingerprint()
    );
    Ok(())
}

fn loocv(a: LoocvArgs) -> Result<()> {
    check_model_args(&a.model)?;
    let config = a.config.config();
    let data = load_features(&a.manifest, &config)?;
    let dir = prepare_out(&a.out.out)?;
    let result = loocv_voted(&data, a.model.features, a.model.spread, a.model.tie)
        .context("cross-validation")?;
    let text = render_report(&result.report);
    write_text(&dir.join("loocv.json"), &(result.report.to_json()? + "\n"))?;
    write_text(&dir.join("loocv.txt"), &text)?;
    print!("{text}");
    if a.study {
        let study = feature_study(&data, &FeatureSelection::all_combinations(), a.model.spread)
            .context("feature study")?;
        let table = render_feature_study(&study);
        write_text(
            &dir.join("study.json"),
            &(serde_json::to_string_pretty(&study)? + "\n"),
        )?;
        write_text(&dir.join("study.txt"), &table)?;
        println!();
        print!("{table}");
    }
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<()> {
    check_model_args(&a.model)?;
    let grid = match a.grid {
        GridChoice::Standard => standard_grid(),
        GridChoice::Custom => {
            let mut grid = Vec::new();
            for &length in &a.lengths {
                for &cutoff in &a.cutoffs {
                    for &band in &a.bands {
                        grid.push(ExtractionConfig::new(length, cutoff, band));
                    }
                }
            }
            grid
        }
    };
    if grid.is_empty() {
        return Err(usage("the configuration grid is empty"));
    }
    let recordings = load_recordings(&a.manifest)?;
    let dir = prepare_out(&a.out.out)?;
    let outcome = config_sweep(
        &recordings,
        &grid,
        a.model.features,
        a.model.spread,
        a.model.tie,
    );
    let text = render_sweep(&outcome);
    write_text(&dir.join("sweep.json"), &(outcome.to_json()? + "\n"))?;
    write_text(&dir.join("sweep.txt"), &text)?;
    print!("{text}");
    if !outcome.failures.is_empty() {
        bail!(
            "{} of {} configurations failed",
            outcome.failures.len(),
            grid.len()
        );
    }
    Ok(())
}

fn train(a: TrainArgs) -> Result<()> {
    check_model_args(&a.model)?;
    let config = a.config.config();
    let data = load_features(&a.manifest, &config)?;
    let labels = data
        .frames
        .iter()
        .map(|f| {
            f.label
                .class_index()
                .with_context(|| format!("subject {} has no class label", f.subject_id))
        })
        .collect::<Result<Vec<_>>>()?;
    if labels.is_empty() {
        bail!(
            "no recording is long enough for one {}-sample segment",
            config.segment_length
        );
    }
    let class_names: Vec<String> = BINARY_CLASSES.iter().map(Label::to_string).collect();
    let fingerprint = config.fingerprint();
    let members = data
        .channels
        .par_iter()
        .enumerate()
        .map(|(c, name)| {
            let vectors: Vec<Vec<f64>> = data
                .frames
                .iter()
                .map(|f| a.model.features.select(&f.vectors[c]))
                .collect();
            let model = PnnModel::train(&vectors, &labels, class_names.clone(), a.model.spread)?
                .with_config_id(fingerprint.clone());
            Ok((name.clone(), model))
        })
        .collect::<eegpnn_core::Result<Vec<_>>>()
        .context("training")?;
    let ensemble = ChannelEnsemble::new(
        members,
        config,
        data.sample_rate_hz,
        a.model.features,
        a.model.tie,
    )?;
    let path = match a.model_path {
        Some(p) => p,
        None => prepare_out(&a.out.out)?.join("model.json"),
    };
    write_text(&path, &(ensemble.to_json()? + "\n"))?;
    println!(
        "trained {} channel models on {} frames ({fingerprint})",
        data.channels.len(),
        labels.len()
    );
    Ok(())
}

fn classify(a: ClassifyArgs) -> Result<()> {
    let text = fs::read_to_string(&a.model)
        .with_context(|| format!("reading model {}", a.model.display()))?;
    let ensemble = ChannelEnsemble::from_json(&text)
        .with_context(|| format!("loading model {}", a.model.display()))?;
    let mut config = ensemble.config;
    if let Some(len) = a.segment_length {
        config.segment_length = len;
    }
    if let Some(cutoff) = a.cutoff {
        config.filter.cutoff_hz = cutoff;
    }
    if let Some(band) = a.band {
        config.band = band;
    }
    if config.fingerprint() != ensemble.config.fingerprint() {
        bail!(
            "fingerprint mismatch: model was trained on {}, input requested {}",
            ensemble.config.fingerprint(),
            config.fingerprint()
        );
    }
    let fs = a.sample_rate.unwrap_or(ensemble.sample_rate_hz);
    let (channels, samples) = read_recording_csv(&a.recording)?;
    let subject = a
        .recording
        .file_stem()
        .map_or_else(|| "recording".into(), |s| s.to_string_lossy().into_owned());
    let mut expected: Vec<&str> = ensemble.channels().collect();
    let mut found: Vec<&str> = channels.iter().map(String::as_str).collect();
    expected.sort_unstable();
    found.sort_unstable();
    if expected != found {
        bail!(
            "{} has channels {found:?}, the model expects {expected:?}",
            a.recording.display()
        );
    }
    let recording = Recording::new(channels, samples, fs, subject.clone(), Label::Unknown)?;
    let frames = recording_features(&recording, &config).context("extracting features")?;
    if frames.is_empty() {
        eprintln!(
            "warning: {} has {} samples, fewer than one {}-sample segment; nothing to classify",
            a.recording.display(),
            recording.len(),
            config.segment_length
        );
    }

    let mut outcomes = Vec::with_capacity(frames.len());
    for f in &frames {
        let by_channel: BTreeMap<String, _> = recording
            .channels()
            .iter()
            .cloned()
            .zip(f.vectors.iter().cloned())
            .collect();
        let outcome = ensemble
            .vote(&by_channel)
            .with_context(|| format!("frame {}", f.frame_index))?;
        outcomes.push((f.frame_index, outcome));
    }
    let decisions: Vec<usize> = outcomes
        .iter()
        .filter_map(|(_, o)| o.decision.class_index())
        .collect();
    let positive = ensemble.positive_class.class_index().unwrap_or(1);
    let subject_vote = (!decisions.is_empty()).then(|| {
        majority(
            &decisions,
            BINARY_CLASSES.len(),
            positive,
            ensemble.tie_policy,
        )
    });

    if a.json {
        let frames_json: Vec<_> = outcomes
            .iter()
            .map(|(i, o)| json!({ "frame": i, "decision": o.decision, "tally": o.tally, "per_channel": o.per_channel }))
            .collect();
        let summary = subject_vote.as_ref().map(|(d, tally)| {
            json!({
                "method": "second-level majority over frame decisions",
                "decision": BINARY_CLASSES[*d],
                "tally": BINARY_CLASSES.iter().zip(tally).map(|(l, n)| (l.to_string(), n)).collect::<BTreeMap<_, _>>(),
            })
        });
        let doc = json!({
            "subject_id": subject,
            "config_id": config.fingerprint(),
            "frames": frames_json,
            "subject": summary,
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
        return Ok(());
    }

    println!(
        "subject {subject}, {} frames ({})",
        outcomes.len(),
        config.fingerprint()
    );
    for (i, o) in &outcomes {
        let tally: Vec<String> = o.tally.iter().map(|(l, n)| format!("{l} {n}")).collect();
        println!(
            "frame {i:>3}: {:<9} ({})",
            o.decision.as_str(),
            tally.join(", ")
        );
    }
    match subject_vote {
        Some((d, tally)) => println!(
            "subject decision (second-level majority over frames): {} ({} of {} frames)",
            BINARY_CLASSES[d],
            tally[d],
            decisions.len()
        ),
        None => println!("subject decision: none, no complete frame"),
    }
    Ok(())
}

fn report(a: ReportArgs) -> Result<()> {
    let text =
        fs::read_to_string(&a.path).with_context(|| format!("reading {}", a.path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", a.path.display()))?;
    let rendered = if value.get("voted_accuracy").is_some() {
        render_report(&serde_json::from_value::<EvalReport>(value)?)
    } else if value.get("column_means").is_some() {
        render_feature_study(&serde_json::from_value::<FeatureStudy>(value)?)
    } else if value.get("grid").is_some() {
        render_sweep(&serde_json::from_value::<SweepOutcome>(value)?)
    } else {
        return Err(usage(format!(
            "{} is not a loocv, study or sweep report",
            a.path.display()
        )));
    };
    print!("{rendered}");
    Ok(())
}
