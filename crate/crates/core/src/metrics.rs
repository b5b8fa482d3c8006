//! Coverage, relevance and redundancy of a keyframe set.
//!
//! These formalize the three qualities a selection is judged on: does it
//! touch every event, does it favour query-relevant frames, and does it avoid
//! near-duplicates.

use serde::Serialize;

use crate::partition::EventPartition;
use crate::scalar::Scalar;
use crate::signals::SignalSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelectionMetrics {
    pub event_coverage: f64,
    pub mean_relevance: f64,
    pub redundancy: f64,
}

fn distinct(indices: &[usize]) -> Vec<usize> {
    let mut v = indices.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Fraction of ground-truth events containing at least one selected frame.
pub fn event_coverage(indices: &[usize], truth: &EventPartition) -> f64 {
    let mut hit = vec![false; truth.len()];
    for &i in indices {
        if let Some(e) = truth.segment_of(i) {
            hit[e] = true;
        }
    }
    hit.iter().filter(|&&h| h).count() as f64 / truth.len() as f64
}

pub fn mean_relevance<T: Scalar>(indices: &[usize], relevance: &[T]) -> f64 {
    let idx = distinct(indices);
    if idx.is_empty() {
        return 0.0;
    }
    idx.iter().map(|&i| relevance[i].as_f64()).sum::<f64>() / idx.len() as f64
}

/// Mean over distinct selected frames of the highest cosine to another
/// selected frame, each clipped to `[0, 1]`. Zero for fewer than two frames.
pub fn redundancy<T: Scalar>(indices: &[usize], signals: &SignalSet<T>) -> f64 {
    let idx = distinct(indices);
    if idx.len() < 2 {
        return 0.0;
    }
    let total: f64 = idx
        .iter()
        .map(|&i| {
            idx.iter()
                .filter(|&&j| j != i)
                .map(|&j| signals.cosine(i, j).as_f64())
                .fold(f64::NEG_INFINITY, f64::max)
                .clamp(0.0, 1.0)
        })
        .sum();
    total / idx.len() as f64
}

pub fn evaluate<T: Scalar>(indices: &[usize], signals: &SignalSet<T>, truth: &EventPartition) -> SelectionMetrics {
    SelectionMetrics {
        event_coverage: event_coverage(indices, truth),
        mean_relevance: mean_relevance(indices, signals.relevance()),
        redundancy: redundancy(indices, signals),
    }
}
