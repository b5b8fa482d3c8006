//! Event partitioning: boundary detection on the similarity curve, initial
//! segmentation, and greedy merging of the most similar adjacent events.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{EfsError, Result};
use crate::scalar::{dot, norm, Scalar};
use crate::signals::{SignalSet, SimilarityCurve, ZERO_NORM};

/// Contiguous, disjoint, exhaustive segmentation of `[0, n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventPartition {
    segments: Vec<Range<usize>>,
}

impl EventPartition {
    /// Builds a partition after checking that `segments` tile `[0, n)` in order.
    pub fn new(segments: Vec<Range<usize>>, n: usize) -> Result<Self> {
        if segments.is_empty() {
            return Err(EfsError::InvalidConfig("partition has no segments".into()));
        }
        let mut cursor = 0;
        for s in &segments {
            if s.start != cursor || s.end <= s.start {
                return Err(EfsError::InvalidConfig(format!(
                    "segment {s:?} does not continue a tiling of [0, {n}) at {cursor}"
                )));
            }
            cursor = s.end;
        }
        if cursor != n {
            return Err(EfsError::InvalidConfig(format!("segments end at {cursor}, expected {n}")));
        }
        Ok(Self { segments })
    }

    /// The whole range as one event.
    pub fn single(n: usize) -> Self {
        Self { segments: vec![0..n] }
    }

    /// Partition whose segments start at `starts` (first entry must be 0).
    pub fn from_starts(starts: &[usize], n: usize) -> Result<Self> {
        let segments = starts
            .iter()
            .zip(starts.iter().skip(1).chain(std::iter::once(&n)))
            .map(|(&a, &b)| a..b)
            .collect();
        Self::new(segments, n)
    }

    pub fn segments(&self) -> &[Range<usize>] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn frame_count(&self) -> usize {
        self.segments.last().map_or(0, |s| s.end)
    }

    /// Index of the segment containing frame `i`.
    pub fn segment_of(&self, i: usize) -> Option<usize> {
        let pos = self.segments.partition_point(|s| s.end <= i);
        (pos < self.segments.len() && self.segments[pos].contains(&i)).then_some(pos)
    }

    /// Unit-norm mean embedding of every segment.
    pub fn means<T: Scalar>(&self, signals: &SignalSet<T>) -> Result<Vec<Vec<T>>> {
        self.segments.iter().map(|s| segment_mean(signals, s.clone())).collect()
    }
}

/// Re-normalized arithmetic mean of the rows in `range`.
///
/// Rows are summed in ascending frame order.
pub fn segment_mean<T: Scalar>(signals: &SignalSet<T>, range: Range<usize>) -> Result<Vec<T>> {
    let mut sum = vec![T::zero(); signals.dim()];
    accumulate(&mut sum, signals, range.clone());
    unit_mean(sum, range)
}

fn accumulate<T: Scalar>(sum: &mut [T], signals: &SignalSet<T>, range: Range<usize>) {
    for i in range {
        for (acc, v) in sum.iter_mut().zip(signals.row(i)) {
            *acc = *acc + *v;
        }
    }
}

fn unit_mean<T: Scalar>(sum: Vec<T>, range: Range<usize>) -> Result<Vec<T>> {
    let count = T::from_usize_lossy(range.len());
    let mean: Vec<T> = sum.into_iter().map(|v| v / count).collect();
    let n = norm(&mean);
    if n < T::lit(ZERO_NORM) {
        return Err(EfsError::ZeroMeanSegment { start: range.start, end: range.end });
    }
    Ok(mean.into_iter().map(|v| v / n).collect())
}

/// Interior local minima of the curve.
///
/// A maximal run of equal values that is bordered on both sides by strictly
/// larger values is a minimum; its first index is reported. Runs touching
/// either end of the curve never count.
pub fn detect_local_minima<T: Scalar>(curve: &SimilarityCurve<T>) -> Vec<usize> {
    let v = &curve.values;
    let n = v.len();
    let mut minima = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && v[end] == v[start] {
            end += 1;
        }
        if start > 0 && end < n && v[start - 1] > v[start] && v[end] > v[start] {
            minima.push(start);
        }
        start = end;
    }
    minima
}

/// Each minimum opens a new segment.
pub fn partition_from_minima(minima: &[usize], n: usize) -> Result<EventPartition> {
    if n == 0 {
        return Err(EfsError::EmptySignals);
    }
    let mut starts = Vec::with_capacity(minima.len() + 1);
    starts.push(0);
    let mut sorted = minima.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &m in &sorted {
        if m == 0 || m + 1 >= n {
            return Err(EfsError::BoundaryOutOfRange { boundary: m, n_minus_one: n.saturating_sub(1) });
        }
        starts.push(m);
    }
    EventPartition::from_starts(&starts, n)
}

/// One merge performed by [`merge_to_target_traced`].
#[derive(Debug, Clone, PartialEq)]
pub struct MergeStep<T> {
    /// Segment boundaries before the merge.
    pub before: EventPartition,
    /// The pair `(pair, pair + 1)` was merged.
    pub pair: usize,
    pub cosine: T,
}

/// Merges the most similar adjacent pair until at most `m_target` segments remain.
pub fn merge_to_target<T: Scalar>(
    partition: &EventPartition,
    signals: &SignalSet<T>,
    m_target: usize,
) -> Result<EventPartition> {
    merge_impl(partition, signals, m_target, None)
}

/// [`merge_to_target`] that also records every step.
pub fn merge_to_target_traced<T: Scalar>(
    partition: &EventPartition,
    signals: &SignalSet<T>,
    m_target: usize,
) -> Result<(EventPartition, Vec<MergeStep<T>>)> {
    let mut steps = Vec::new();
    let merged = merge_impl(partition, signals, m_target, Some(&mut steps))?;
    Ok((merged, steps))
}

struct Segment<T> {
    range: Range<usize>,
    sum: Vec<T>,
    unit: Vec<T>,
}

fn merge_impl<T: Scalar>(
    partition: &EventPartition,
    signals: &SignalSet<T>,
    m_target: usize,
    mut steps: Option<&mut Vec<MergeStep<T>>>,
) -> Result<EventPartition> {
    if m_target == 0 {
        return Err(EfsError::InvalidConfig("target event count must be at least 1".into()));
    }
    if partition.frame_count() != signals.frame_count() {
        return Err(EfsError::DimensionMismatch(format!(
            "partition covers {} frames, signals have {}",
            partition.frame_count(),
            signals.frame_count()
        )));
    }
    if partition.len() <= m_target {
        return Ok(partition.clone());
    }

    let mut segs = partition
        .segments()
        .iter()
        .map(|r| {
            let mut sum = vec![T::zero(); signals.dim()];
            accumulate(&mut sum, signals, r.clone());
            let unit = unit_mean(sum.clone(), r.clone())?;
            Ok(Segment { range: r.clone(), sum, unit })
        })
        .collect::<Result<Vec<_>>>()?;
    // pair_cos[i] = cosine between segment means i and i + 1
    let mut pair_cos: Vec<T> = segs.windows(2).map(|w| dot(&w[0].unit, &w[1].unit)).collect();

    while segs.len() > m_target {
        let mut best = 0;
        for (i, c) in pair_cos.iter().enumerate().skip(1) {
            if *c > pair_cos[best] {
                best = i;
            }
        }
        if let Some(steps) = steps.as_deref_mut() {
            steps.push(MergeStep {
                before: EventPartition { segments: segs.iter().map(|s| s.range.clone()).collect() },
                pair: best,
                cosine: pair_cos[best],
            });
        }

        let right = segs.remove(best + 1);
        let left = &mut segs[best];
        // continuing the running sum keeps the ascending-frame summation order
        accumulate(&mut left.sum, signals, right.range.clone());
        left.range = left.range.start..right.range.end;
        left.unit = unit_mean(left.sum.clone(), left.range.clone())?;

        pair_cos.remove(best);
        if best > 0 {
            pair_cos[best - 1] = dot(&segs[best - 1].unit, &segs[best].unit);
        }
        if best + 1 < segs.len() {
            pair_cos[best] = dot(&segs[best].unit, &segs[best + 1].unit);
        }
    }

    Ok(EventPartition { segments: segs.into_iter().map(|s| s.range).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(values: &[f64]) -> SimilarityCurve<f64> {
        SimilarityCurve { values: values.to_vec(), window: 1 }
    }

    fn signals(rows: &[[f64; 2]]) -> SignalSet<f64> {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        let n = rows.len();
        SignalSet::from_rows(&rows, vec![0.0; n]).unwrap().0
    }

    #[test]
    fn constant_curve_has_no_minima() {
        assert!(detect_local_minima(&curve(&[0.4; 4])).is_empty());
    }

    #[test]
    fn strict_minimum() {
        assert_eq!(detect_local_minima(&curve(&[1.0, 0.5, 1.0])), vec![1]);
    }

    #[test]
    fn plateau_reports_first_index() {
        assert_eq!(detect_local_minima(&curve(&[0.9, 0.7, 0.7, 0.9])), vec![1]);
    }

    #[test]
    fn endpoints_and_edge_plateaus_are_not_minima() {
        assert!(detect_local_minima(&curve(&[0.1, 0.5, 0.9])).is_empty());
        assert!(detect_local_minima(&curve(&[0.9, 0.2, 0.2])).is_empty());
        assert_eq!(detect_local_minima(&curve(&[0.9, 0.5, 0.7, 0.5, 0.5, 0.6])), vec![1, 3]);
    }

    #[test]
    fn partition_construction() {
        let p = partition_from_minima(&[2, 4], 6).unwrap();
        assert_eq!(p.segments(), &[0..2, 2..4, 4..6]);
        assert_eq!(partition_from_minima(&[], 5).unwrap().segments(), &[0..5]);
        assert_eq!(partition_from_minima(&[1], 3).unwrap().segments(), &[0..1, 1..3]);
    }

    #[test]
    fn boundary_out_of_range() {
        assert!(matches!(partition_from_minima(&[0], 5), Err(EfsError::BoundaryOutOfRange { boundary: 0, .. })));
        assert!(matches!(partition_from_minima(&[4], 5), Err(EfsError::BoundaryOutOfRange { boundary: 4, .. })));
    }

    #[test]
    fn merges_most_similar_pair() {
        let s = signals(&[[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let p = EventPartition::new(vec![0..1, 1..2, 2..3], 3).unwrap();
        let merged = merge_to_target(&p, &s, 2).unwrap();
        assert_eq!(merged.segments(), &[0..2, 2..3]);
    }

    #[test]
    fn no_merge_when_under_target() {
        let s = signals(&[[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let p = EventPartition::new(vec![0..1, 1..2, 2..3], 3).unwrap();
        assert_eq!(merge_to_target(&p, &s, 3).unwrap(), p);
        assert_eq!(merge_to_target(&p, &s, 10).unwrap(), p);
    }

    #[test]
    fn equal_means_collapse_one_step_at_a_time() {
        let s = signals(&[[0.6, 0.8]; 8]);
        let p = partition_from_minima(&[2, 4, 6], 8).unwrap();
        let (merged, steps) = merge_to_target_traced(&p, &s, 1).unwrap();
        assert_eq!(merged.segments(), &[0..8]);
        assert_eq!(steps.len(), 3);
        for (k, step) in steps.iter().enumerate() {
            assert_eq!(step.before.len(), 4 - k);
        }
    }

    #[test]
    fn zero_mean_segment_is_rejected() {
        let s = signals(&[[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]]);
        let p = EventPartition::new(vec![0..2, 2..3], 3).unwrap();
        assert!(matches!(merge_to_target(&p, &s, 1), Err(EfsError::ZeroMeanSegment { start: 0, end: 2 })));
    }

    #[test]
    fn segment_lookup() {
        let p = partition_from_minima(&[2, 4], 6).unwrap();
        assert_eq!(p.segment_of(0), Some(0));
        assert_eq!(p.segment_of(3), Some(1));
        assert_eq!(p.segment_of(5), Some(2));
        assert_eq!(p.segment_of(6), None);
    }

    #[test]
    fn new_rejects_gaps() {
        assert!(EventPartition::new(vec![0..2, 3..4], 4).is_err());
        assert!(EventPartition::new(vec![0..2, 2..4], 5).is_err());
        assert!(EventPartition::new(vec![], 0).is_err());
    }
}
