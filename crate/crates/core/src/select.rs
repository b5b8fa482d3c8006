//! Anchor localization and anchor-guided adaptive refinement.
//!
//! Refinement starts from one anchor per event and grows the keyframe set in
//! relevance order, admitting a frame only when its highest cosine to the
//! frames already chosen is below the current diversity threshold. The
//! threshold range comes from the distribution of candidate-to-anchor
//! similarities: it starts `alpha` standard deviations below the mean and is
//! relaxed by `delta` per pass up to `alpha` standard deviations above it.

use serde::Serialize;

use crate::config::{EfsConfig, FillPolicy};
use crate::error::{EfsError, Result};
use crate::partition::EventPartition;
use crate::scalar::{clip, Scalar};
use crate::signals::SignalSet;

/// Statistics of the candidate-to-anchor maximum similarities and the
/// thresholds derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdStats<T> {
    pub mean: T,
    pub std: T,
    pub strict: T,
    pub loose: T,
}

/// One sweep over the remaining candidates at a fixed threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PassRecord<T> {
    /// 1-based.
    pub pass: usize,
    pub threshold: T,
    /// Frames admitted during this pass, in admission order.
    pub admitted: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RefineTrace<T> {
    pub stats: Option<ThresholdStats<T>>,
    pub passes: Vec<PassRecord<T>>,
    /// Frames appended by [`FillPolicy::FillByRelevance`], in order.
    pub filled: Vec<usize>,
    /// Anchors discarded because there were more anchors than budget.
    pub dropped_anchors: Vec<usize>,
}

/// One greedy step of classic MMR.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MmrStep<T> {
    pub frame: usize,
    pub score: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Trace<T> {
    None,
    Refine(RefineTrace<T>),
    Mmr { steps: Vec<MmrStep<T>> },
}

/// Final keyframes plus everything needed to explain them.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection<T> {
    /// Strictly increasing frame indices.
    pub indices: Vec<usize>,
    /// Anchors retained in the selection.
    pub anchors: Vec<usize>,
    pub partition: Option<EventPartition>,
    pub trace: Trace<T>,
}

impl<T> Selection<T> {
    pub(crate) fn plain(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self { indices, anchors: Vec::new(), partition: None, trace: Trace::None }
    }

    pub fn refine_trace(&self) -> Option<&RefineTrace<T>> {
        match &self.trace {
            Trace::Refine(t) => Some(t),
            _ => None,
        }
    }
}

/// All frame indices ordered by descending relevance, ties toward the smaller index.
pub fn relevance_order<T: Scalar>(relevance: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..relevance.len()).collect();
    // stable sort keeps ascending index among equal scores
    order.sort_by(|&a, &b| relevance[b].partial_cmp(&relevance[a]).expect("relevance is finite"));
    order
}

/// The most relevant frame of every event (first one on ties).
pub fn select_anchors<T: Scalar>(partition: &EventPartition, relevance: &[T]) -> Result<Vec<usize>> {
    if partition.frame_count() != relevance.len() {
        return Err(EfsError::DimensionMismatch(format!(
            "partition covers {} frames, relevance has {}",
            partition.frame_count(),
            relevance.len()
        )));
    }
    Ok(partition
        .segments()
        .iter()
        .map(|seg| {
            seg.clone()
                .reduce(|best, i| if relevance[i] > relevance[best] { i } else { best })
                .expect("segments are non-empty")
        })
        .collect())
}

/// Running maximum cosine from each frame to the selected set, updated lazily:
/// a frame only catches up with selections made since it was last inspected.
pub(crate) struct MaxSimCache<T> {
    best: Vec<T>,
    seen: Vec<usize>,
}

impl<T: Scalar> MaxSimCache<T> {
    pub(crate) fn new(n: usize) -> Self {
        Self { best: vec![T::neg_infinity(); n], seen: vec![0; n] }
    }

    pub(crate) fn current(&self, c: usize) -> T {
        self.best[c]
    }

    pub(crate) fn update(&mut self, c: usize, selected: &[usize], signals: &SignalSet<T>) -> T {
        let mut best = self.best[c];
        for &j in &selected[self.seen[c]..] {
            best = best.max(signals.cosine(c, j));
        }
        self.best[c] = best;
        self.seen[c] = selected.len();
        best
    }
}

fn check_indices(indices: &[usize], n: usize) -> Result<()> {
    match indices.iter().find(|&&i| i >= n) {
        Some(&index) => Err(EfsError::IndexOutOfRange { index, n }),
        None => Ok(()),
    }
}

/// Anchor-guided adaptive refinement.
///
/// Anchors are never evicted. Passes run at `strict`, `strict + delta`, ...
/// with the last pass at exactly `loose`; refinement stops as soon as the
/// budget is met or the pass at `loose` completes.
pub fn adaptive_refine<T: Scalar>(signals: &SignalSet<T>, anchors: &[usize], cfg: &EfsConfig) -> Result<Selection<T>> {
    let n = signals.frame_count();
    if cfg.k == 0 {
        return Err(EfsError::BudgetZero);
    }
    if anchors.is_empty() {
        return Err(EfsError::EmptyAnchorSet);
    }
    check_indices(anchors, n)?;
    let mut anchors = anchors.to_vec();
    anchors.sort_unstable();
    anchors.dedup();

    let relevance = signals.relevance();
    let order = relevance_order(relevance);
    let mut trace = RefineTrace::default();

    if anchors.len() > cfg.k {
        let mut ranked = anchors.clone();
        ranked.sort_by(|&a, &b| relevance[b].partial_cmp(&relevance[a]).expect("relevance is finite"));
        trace.dropped_anchors = ranked.split_off(cfg.k);
        trace.dropped_anchors.sort_unstable();
        ranked.sort_unstable();
        return Ok(Selection {
            indices: ranked.clone(),
            anchors: ranked,
            partition: None,
            trace: Trace::Refine(trace),
        });
    }

    let mut selected = anchors.clone();
    let mut in_set = vec![false; n];
    for &a in &anchors {
        in_set[a] = true;
    }

    let mut cache = MaxSimCache::new(n);
    let initial: Vec<T> = (0..n).map(|c| cache.update(c, &selected, signals)).collect();
    let stats = threshold_stats(&initial, T::lit(cfg.alpha));
    trace.stats = Some(stats);

    let delta = T::lit(cfg.delta);
    let mut threshold = stats.strict;
    let mut pass = 0;
    while selected.len() < cfg.k {
        pass += 1;
        let mut admitted = Vec::new();
        for &c in &order {
            if selected.len() >= cfg.k {
                break;
            }
            if in_set[c] || cache.current(c) >= threshold {
                continue;
            }
            if cache.update(c, &selected, signals) < threshold {
                selected.push(c);
                in_set[c] = true;
                admitted.push(c);
            }
        }
        trace.passes.push(PassRecord { pass, threshold, admitted });
        if selected.len() >= cfg.k || threshold >= stats.loose {
            break;
        }
        threshold = (threshold + delta).min(stats.loose);
    }

    if cfg.fill_policy == FillPolicy::FillByRelevance {
        let target = cfg.k.min(n);
        for &c in &order {
            if selected.len() >= target {
                break;
            }
            if !in_set[c] {
                selected.push(c);
                in_set[c] = true;
                trace.filled.push(c);
            }
        }
    }

    selected.sort_unstable();
    Ok(Selection { indices: selected, anchors, partition: None, trace: Trace::Refine(trace) })
}

/// Mean and population standard deviation of `values`, with thresholds
/// `clip(mean -/+ alpha * std, 0, 1)`.
pub fn threshold_stats<T: Scalar>(values: &[T], alpha: T) -> ThresholdStats<T> {
    let count = T::from_usize_lossy(values.len());
    let (lo, hi) = values
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let sum: T = values.iter().copied().sum();
    // rounding can push the computed mean outside the sample range
    let mean = clip(sum / count, lo, hi);
    let var: T = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / count;
    let std = var.sqrt();
    ThresholdStats {
        mean,
        std,
        strict: clip(mean - alpha * std, T::zero(), T::one()),
        loose: clip(mean + alpha * std, T::zero(), T::one()),
    }
}
