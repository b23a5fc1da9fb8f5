//! Interictal EEG classification toolkit.
//!
//! The pipeline runs in five stages:
//!
//! ```text
//! ingest      CSV recordings + manifest, or the synthetic generator
//!   │
//! signal      zero-phase Butterworth low-pass, fixed-length segmentation
//!   │
//! features    RIR spectrum, Petrosian/Higuchi FD, Hjorth mobility/complexity
//!   │
//! pnn         one probabilistic neural network per channel
//!   │
//! ensemble    majority vote over co-temporal segments (one frame)
//! ```
//!
//! [`eval`] wraps the last three stages in leave-one-out cross-validation,
//! feature-combination studies and configuration sweeps.

pub mod ensemble;
pub mod error;
pub mod eval;
pub mod features;
pub mod ingest;
pub mod pnn;
pub mod signal;

pub use ensemble::{ChannelEnsemble, TiePolicy, VoteOutcome};
pub use error::{Error, Result};
pub use eval::{Confusion, EvalReport, FeatureSelection};
pub use features::{ExtractionConfig, FeatureVector, Normalizer, SpectralBandSpec};
pub use ingest::{DatasetManifest, ManifestEntry, SynthSpec};
pub use pnn::{Classification, PnnModel};
pub use signal::{FilterKind, FilterSpec, Frame, Label, Recording, Segment};

/// Class order shared by every binary model: index 0 is the negative class.
pub const BINARY_CLASSES: [Label; 2] = [Label::Healthy, Label::Epileptic];
