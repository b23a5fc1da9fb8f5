use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eegpnn_core::{ExtractionConfig, FeatureSelection, SpectralBandSpec, TiePolicy};

mod commands;

/// PNN-based EEG screening: synthetic data, feature extraction, LOOCV and
/// per-channel voting.
#[derive(Parser, Debug)]
#[command(name = "eegpnn", version)]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic labelled dataset (CSV files plus manifest.json).
    Gen(GenArgs),
    /// Extract per-frame feature vectors for every recording of a manifest.
    Extract(ExtractArgs),
    /// Leave-one-out evaluation of the per-channel PNNs and their vote.
    Loocv(LoocvArgs),
    /// Run the evaluation over a grid of extraction configurations.
    Sweep(SweepArgs),
    /// Train one PNN per channel on a whole dataset and save the ensemble.
    Train(TrainArgs),
    /// Classify the frames of a recording with a saved ensemble.
    Classify(ClassifyArgs),
    /// Render a saved JSON report as text.
    Report(ReportArgs),
}

#[derive(Args, Debug, Clone)]
struct OutArg {
    /// Output directory.
    #[arg(long, env = "EEGPNN_OUT", default_value = "eegpnn-out")]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClassChoice {
    Both,
    Epileptic,
    Healthy,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(flatten)]
    out: OutArg,
    /// Subjects per class.
    #[arg(long, default_value_t = 6)]
    subjects: usize,
    #[arg(long, value_enum, default_value_t = ClassChoice::Both)]
    classes: ClassChoice,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Recording length in seconds.
    #[arg(long, default_value_t = 240.0)]
    duration: f64,
    /// Mean spike rate in Hz. Epileptic subjects get distinct rates spread
    /// evenly over 0.5x to 1.5x this value.
    #[arg(long, default_value_t = 0.5)]
    spike_rate: f64,
    #[arg(long, default_value_t = 22)]
    channels: usize,
    #[arg(long, default_value_t = 200.0)]
    sample_rate: f64,
}

#[derive(Args, Debug, Clone, Copy)]
struct ConfigArgs {
    /// Samples per segment.
    #[arg(long, default_value_t = 8192)]
    segment_length: usize,
    /// Low-pass cutoff in Hz.
    #[arg(long, default_value_t = 56.0)]
    cutoff: f64,
    /// Spectral band as low:up:step in Hz.
    #[arg(long, default_value = "2:32:1")]
    band: SpectralBandSpec,
}

impl ConfigArgs {
    fn config(&self) -> ExtractionConfig {
        ExtractionConfig::new(self.segment_length, self.cutoff, self.band)
    }
}

#[derive(Args, Debug, Clone, Copy)]
struct ModelArgs {
    /// Distance at which a pattern unit's output falls to 0.5.
    #[arg(long, default_value_t = eegpnn_core::pnn::DEFAULT_SPREAD)]
    spread: f64,
    /// Feature groups: all, or a `+`-joined subset of rir, fd, hjorth.
    #[arg(long, default_value = "all")]
    features: FeatureSelection,
    /// Tie break for the channel vote: positive, negative or lowest.
    #[arg(long, default_value = "positive")]
    tie: TiePolicy,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct LoocvArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Also tabulate single-channel accuracy for all seven feature groupings.
    #[arg(long)]
    study: bool,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GridChoice {
    /// The 18 configurations of the original parameter study.
    Standard,
    /// Cartesian product of --lengths, --cutoffs and --bands.
    Custom,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, value_enum, default_value_t = GridChoice::Standard)]
    grid: GridChoice,
    #[arg(long, value_delimiter = ',', default_value = "8192")]
    lengths: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "56")]
    cutoffs: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "2:32:1")]
    bands: Vec<SpectralBandSpec>,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Where to save the ensemble (default: <out>/model.json).
    #[arg(long)]
    model_path: Option<PathBuf>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    /// Saved ensemble from `train`.
    #[arg(long)]
    model: PathBuf,
    /// CSV recording, one column per channel.
    #[arg(long)]
    recording: PathBuf,
    /// Sample rate of the recording (default: the model's).
    #[arg(long)]
    sample_rate: Option<f64>,
    /// Extraction settings the input is expected to use; they must match
    /// the model's.
    #[arg(long)]
    segment_length: Option<usize>,
    #[arg(long)]
    cutoff: Option<f64>,
    #[arg(long)]
    band: Option<SpectralBandSpec>,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// A loocv.json, study.json or sweep.json file.
    path: PathBuf,
}

/// A problem with the invocation itself rather than with the data.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn exit_code(err: &anyhow::Error) -> u8 {
    let usage = err.chain().any(|cause| {
        cause.is::<UsageError>()
            || cause
                .downcast_ref::<eegpnn_core::Error>()
                .is_some_and(eegpnn_core::Error::is_config)
    });
    if usage {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.map_or(0, usize::from))
        .build();
    let result = match pool {
        Ok(pool) => pool.install(|| commands::run(cli.command)),
        Err(e) => Err(e.into()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
