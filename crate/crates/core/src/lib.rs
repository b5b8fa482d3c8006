//! Event-anchored keyframe selection.
//!
//! Given per-frame embeddings and query-relevance scores, the pipeline
//!
//! 1. computes a weighted temporal-similarity curve over neighbouring frames,
//! 2. cuts the stream into events at the curve's local minima and merges the
//!    most similar adjacent events down to a target count,
//! 3. anchors every event at its most relevant frame, and
//! 4. grows the anchor set to the frame budget with a relevance-ordered,
//!    diversity-thresholded sweep whose threshold adapts to the video.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below name the common instantiations.

#![allow(clippy::single_range_in_vec_init)]

pub mod baselines;
pub mod bench;
pub mod config;
pub mod error;
pub mod format;
pub mod metrics;
pub mod partition;
pub mod pipeline;
pub mod scalar;
pub mod select;
pub mod signals;
pub mod synth;

pub use baselines::{
    centroid_anchors, classic_mmr, fixed_threshold_greedy, random_anchors, random_partition, topk_sample,
    uniform_sample,
};
pub use config::{EfsConfig, FillPolicy};
pub use error::{EfsError, Result};
pub use format::{read_signals, write_signals};
pub use partition::{detect_local_minima, merge_to_target, partition_from_minima, EventPartition};
pub use pipeline::{run_efs, run_strategy, select_report, EfsRun, SelectionReport, Strategy};
pub use scalar::Scalar;
pub use select::{adaptive_refine, select_anchors, Selection};
pub use signals::{temporal_similarity, validate_signals, Metadata, RawSignals, SignalSet, SimilarityCurve};
pub use synth::{gen_synthetic, SyntheticSpec};

pub type SignalSetF32 = SignalSet<f32>;
pub type SignalSetF64 = SignalSet<f64>;
pub type SimilarityCurveF32 = SimilarityCurve<f32>;
pub type SimilarityCurveF64 = SimilarityCurve<f64>;
pub type SelectionF32 = Selection<f32>;
pub type SelectionF64 = Selection<f64>;
pub type EfsRunF32 = EfsRun<f32>;
pub type EfsRunF64 = EfsRun<f64>;
