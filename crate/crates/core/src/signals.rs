//! Per-frame signals and the weighted temporal-similarity curve.
//!
//! A [`SignalSet`] holds one L2-normalized embedding row and one query
//! relevance score per candidate frame. It is the only input the selection
//! stages consume; how the signals were produced is recorded in [`Metadata`]
//! and otherwise ignored.

use serde::{Deserialize, Serialize};

use crate::error::{EfsError, Result};
use crate::scalar::{clip, dot, norm, Scalar};

/// Rows whose norm is farther than this from 1 are re-normalized on validation.
pub const NORM_TOLERANCE: f64 = 1e-4;
/// Rows (and segment means) with a norm below this are rejected.
pub const ZERO_NORM: f64 = 1e-12;
/// Candidate sampling rate used when none is given.
pub const DEFAULT_FPS: f64 = 1.0;

/// Free-form provenance carried alongside the signals.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default)]
    pub query: String,
    #[serde(default)]
    pub source: String,
    /// Anything else the producer recorded (model ids, ground truth, ...).
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

/// Unvalidated signal payload, as decoded from a file or assembled by hand.
#[derive(Debug, Clone)]
pub struct RawSignals<T> {
    pub frame_count: usize,
    pub dim: usize,
    /// Row-major `frame_count x dim`.
    pub embeddings: Vec<T>,
    pub relevance: Vec<T>,
    pub fps: f64,
    pub metadata: Metadata,
}

/// Rows that [`validate_signals`] had to re-normalize.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub renormalized_rows: Vec<usize>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.renormalized_rows.is_empty()
    }
}

/// Validated per-frame signals. Immutable once constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSet<T> {
    frame_count: usize,
    dim: usize,
    embeddings: Vec<T>,
    relevance: Vec<T>,
    fps: f64,
    metadata: Metadata,
}

impl<T: Scalar> SignalSet<T> {
    /// Validates and builds from a list of rows.
    pub fn from_rows(rows: &[Vec<T>], relevance: Vec<T>) -> Result<(Self, ValidationReport)> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != dim) {
            return Err(EfsError::DimensionMismatch(format!(
                "row {i} has length {}, expected {dim}",
                rows[i].len()
            )));
        }
        validate_signals(RawSignals {
            frame_count: rows.len(),
            dim,
            embeddings: rows.concat(),
            relevance,
            fps: DEFAULT_FPS,
            metadata: Metadata::default(),
        })
    }

    pub fn frame_count(&self) -> usize {
        self.frame_count
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    pub fn metadata(&self) -> &Metadata {
        &self.metadata
    }

    pub fn relevance(&self) -> &[T] {
        &self.relevance
    }

    /// Row-major embedding matrix.
    pub fn embeddings(&self) -> &[T] {
        &self.embeddings
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.embeddings[i * self.dim..(i + 1) * self.dim]
    }

    /// Cosine similarity of two frames (rows are unit-norm).
    #[inline]
    pub fn cosine(&self, i: usize, j: usize) -> T {
        dot(self.row(i), self.row(j))
    }

    pub fn with_fps(mut self, fps: f64) -> Result<Self> {
        check_fps(fps)?;
        self.fps = fps;
        Ok(self)
    }

    pub fn with_metadata(mut self, metadata: Metadata) -> Self {
        self.metadata = metadata;
        self
    }

    /// Seconds from the start of the sampled stream to frame `index`.
    pub fn timestamp(&self, index: usize) -> f64 {
        index as f64 / self.fps
    }
}

fn check_fps(fps: f64) -> Result<()> {
    if fps.is_finite() && fps > 0.0 {
        Ok(())
    } else {
        Err(EfsError::InvalidFps(fps))
    }
}

/// Checks shapes and finiteness, re-normalizes rows that drifted off the unit
/// sphere, and rejects zero rows.
pub fn validate_signals<T: Scalar>(raw: RawSignals<T>) -> Result<(SignalSet<T>, ValidationReport)> {
    let RawSignals { frame_count, dim, mut embeddings, relevance, fps, metadata } = raw;
    if frame_count == 0 {
        return Err(EfsError::EmptySignals);
    }
    if dim == 0 {
        return Err(EfsError::DimensionMismatch("embedding dimension is 0".into()));
    }
    if embeddings.len() != frame_count * dim {
        return Err(EfsError::DimensionMismatch(format!(
            "{} embedding values for {frame_count} x {dim}",
            embeddings.len()
        )));
    }
    if relevance.len() != frame_count {
        return Err(EfsError::DimensionMismatch(format!(
            "{} relevance scores for {frame_count} frames",
            relevance.len()
        )));
    }
    check_fps(fps)?;
    if let Some(index) = embeddings.iter().position(|v| !v.is_finite()) {
        return Err(EfsError::NonFiniteValue { field: "embeddings", index });
    }
    if let Some(index) = relevance.iter().position(|v| !v.is_finite()) {
        return Err(EfsError::NonFiniteValue { field: "relevance", index });
    }

    let mut report = ValidationReport::default();
    let tol = T::lit(NORM_TOLERANCE);
    for (i, row) in embeddings.chunks_exact_mut(dim).enumerate() {
        let n = norm(row);
        if n < T::lit(ZERO_NORM) {
            return Err(EfsError::ZeroNormEmbedding(i));
        }
        if (n - T::one()).abs() > tol {
            row.iter_mut().for_each(|v| *v = *v / n);
            report.renormalized_rows.push(i);
        }
    }

    Ok((SignalSet { frame_count, dim, embeddings, relevance, fps, metadata }, report))
}

/// Per-frame weighted mean cosine to the neighbours within `window` frames.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityCurve<T> {
    pub values: Vec<T>,
    pub window: usize,
}

impl<T> SimilarityCurve<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Weight of a neighbour at distance `d` (1..=window): linearly decreasing
/// from `window` down to 1.
#[inline]
pub fn neighbour_weight(window: usize, d: usize) -> usize {
    window + 1 - d
}

/// Weighted temporal-coherence curve.
///
/// Frame `i` is compared against every `j != i` with `|i - j| <= window`,
/// each cosine weighted by [`neighbour_weight`], and the weighted sum divided
/// by the total weight. A frame with no neighbours (single-frame input) gets 1.
pub fn temporal_similarity<T: Scalar>(signals: &SignalSet<T>, window: usize) -> Result<SimilarityCurve<T>> {
    if window < 1 {
        return Err(EfsError::WindowTooSmall(window));
    }
    let n = signals.frame_count();
    let values = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(window);
            let hi = (i + window).min(n - 1);
            let mut num = T::zero();
            let mut den = T::zero();
            for j in lo..=hi {
                if j == i {
                    continue;
                }
                let w = T::from_usize_lossy(neighbour_weight(window, i.abs_diff(j)));
                num = num + w * signals.cosine(i, j);
                den = den + w;
            }
            if den == T::zero() {
                T::one()
            } else {
                clip(num / den, -T::one(), T::one())
            }
        })
        .collect();
    Ok(SimilarityCurve { values, window })
}
