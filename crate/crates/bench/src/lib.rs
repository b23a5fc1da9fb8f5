//! Criterion benchmarks for the eegpnn pipeline live in `benches/`.
//!
//! This crate only provides shared input builders.

use eegpnn_core::ingest::{synthesize, SynthSpec};
use eegpnn_core::Recording;

/// A short synthetic recording for benchmarks.
pub fn bench_recording(seed: u64, epileptic: bool, duration_s: f64) -> Recording {
    let spec = if epileptic {
        SynthSpec::epileptic(seed, 1.0)
    } else {
        SynthSpec::healthy(seed)
    };
    synthesize(&SynthSpec { duration_s, ..spec }).expect("valid bench spec")
}
