//! Reference strategies the event-anchored selection is compared against.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{EfsError, Result};
use crate::partition::{segment_mean, EventPartition};
use crate::scalar::{dot, Scalar};
use crate::select::{relevance_order, MaxSimCache, MmrStep, PassRecord, RefineTrace, Selection, Trace};
use crate::signals::SignalSet;

/// Center-of-bin uniform sampling: `floor((i + 0.5) * n / k)` for each of
/// `min(k, n)` bins, deduplicated.
pub fn uniform_sample(n: usize, k: usize) -> Vec<usize> {
    if k == 0 {
        return Vec::new();
    }
    let mut out: Vec<usize> = (0..k.min(n)).map(|i| (2 * i + 1) * n / (2 * k)).collect();
    out.dedup();
    out
}

/// The `k` most relevant frames, ascending.
pub fn topk_sample<T: Scalar>(relevance: &[T], k: usize) -> Vec<usize> {
    let mut top = relevance_order(relevance);
    top.truncate(k);
    top.sort_unstable();
    top
}

/// Greedy maximal marginal relevance:
/// `argmax lambda * rel(i) - (1 - lambda) * max_{j in K} cos(i, j)`,
/// with the similarity term 0 while `K` is empty.
pub fn classic_mmr<T: Scalar>(signals: &SignalSet<T>, k: usize, lambda: f64) -> Result<Selection<T>> {
    if k == 0 {
        return Err(EfsError::BudgetZero);
    }
    let n = signals.frame_count();
    let lambda = T::lit(lambda);
    let relevance = signals.relevance();
    let mut max_sim = vec![T::zero(); n];
    let mut taken = vec![false; n];
    let mut steps = Vec::with_capacity(k.min(n));

    for step in 0..k.min(n) {
        let mut best: Option<(usize, T)> = None;
        for i in (0..n).filter(|&i| !taken[i]) {
            let score = lambda * relevance[i] - (T::one() - lambda) * max_sim[i];
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((i, score));
            }
        }
        let (pick, score) = best.expect("a candidate remains");
        taken[pick] = true;
        steps.push(MmrStep { frame: pick, score });
        for i in (0..n).filter(|&i| !taken[i]) {
            let sim = signals.cosine(i, pick);
            max_sim[i] = if step == 0 { sim } else { max_sim[i].max(sim) };
        }
    }

    let mut sel = Selection::plain(steps.iter().map(|s| s.frame).collect());
    sel.trace = Trace::Mmr { steps };
    Ok(sel)
}

/// Single relevance-ordered pass with a fixed diversity threshold, seeded
/// with the most relevant frame. No fill.
pub fn fixed_threshold_greedy<T: Scalar>(signals: &SignalSet<T>, k: usize, tau: f64) -> Result<Selection<T>> {
    if k == 0 {
        return Err(EfsError::BudgetZero);
    }
    let n = signals.frame_count();
    let tau = T::lit(tau);
    let order = relevance_order(signals.relevance());
    let mut selected = vec![order[0]];
    let mut cache = MaxSimCache::new(n);
    let mut admitted = Vec::new();
    for &c in &order[1..] {
        if selected.len() >= k {
            break;
        }
        if cache.update(c, &selected, signals) < tau {
            selected.push(c);
            admitted.push(c);
        }
    }
    let mut sel = Selection::plain(selected);
    sel.trace = Trace::Refine(RefineTrace {
        passes: vec![PassRecord { pass: 1, threshold: tau, admitted }],
        ..RefineTrace::default()
    });
    Ok(sel)
}

/// Seeded uniformly random segmentation into `min(m_target, n)` events.
pub fn random_partition(n: usize, m_target: usize, seed: u64) -> Result<EventPartition> {
    if n == 0 {
        return Err(EfsError::EmptySignals);
    }
    if m_target == 0 {
        return Err(EfsError::InvalidConfig("m_target must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cuts = m_target.min(n) - 1;
    let mut starts: Vec<usize> = sample(&mut rng, n - 1, cuts).into_iter().map(|i| i + 1).collect();
    starts.push(0);
    starts.sort_unstable();
    EventPartition::from_starts(&starts, n)
}

/// One seeded uniformly random frame per event.
pub fn random_anchors(partition: &EventPartition, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    partition.segments().iter().map(|s| rng.random_range(s.clone())).collect()
}

/// Per event, the frame closest (highest cosine) to the event's mean
/// embedding; first one on ties.
pub fn centroid_anchors<T: Scalar>(partition: &EventPartition, signals: &SignalSet<T>) -> Result<Vec<usize>> {
    partition
        .segments()
        .iter()
        .map(|seg| {
            let mean = segment_mean(signals, seg.clone())?;
            let mut best = seg.start;
            let mut best_sim = dot(signals.row(best), &mean);
            for i in seg.clone().skip(1) {
                let sim = dot(signals.row(i), &mean);
                if sim > best_sim {
                    best = i;
                    best_sim = sim;
                }
            }
            Ok(best)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signals(rows: &[[f64; 2]], rel: &[f64]) -> SignalSet<f64> {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        SignalSet::from_rows(&rows, rel.to_vec()).unwrap().0
    }

    #[test]
    fn uniform_bins() {
        assert_eq!(uniform_sample(10, 5), vec![1, 3, 5, 7, 9]);
        assert_eq!(uniform_sample(6, 6), (0..6).collect::<Vec<_>>());
        assert_eq!(uniform_sample(1, 3), vec![0]);
    }

    #[test]
    fn topk_examples() {
        assert_eq!(topk_sample(&[0.1f64, 0.9, 0.3], 2), vec![1, 2]);
        assert_eq!(topk_sample(&[0.1f64, 0.9, 0.3], 7), vec![0, 1, 2]);
        assert_eq!(topk_sample(&[0.4f64; 4], 2), vec![0, 1]);
    }

    #[test]
    fn mmr_prefers_diverse_frame() {
        let s = signals(&[[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]], &[0.9, 0.8, 0.2]);
        let sel = classic_mmr(&s, 2, 0.5).unwrap();
        assert_eq!(sel.indices, vec![0, 2]);
        let Trace::Mmr { steps } = &sel.trace else { panic!("mmr trace") };
        assert!((steps[1].score - 0.1).abs() < 1e-12);
    }

    #[test]
    fn mmr_pure_relevance_is_topk() {
        let s = signals(&[[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.6, 0.8]], &[0.2, 0.8, 0.5, 0.9]);
        assert_eq!(classic_mmr(&s, 2, 1.0).unwrap().indices, topk_sample(s.relevance(), 2));
        assert_eq!(classic_mmr(&s, 4, 0.3).unwrap().indices, vec![0, 1, 2, 3]);
        assert!(matches!(classic_mmr(&s, 0, 0.3), Err(EfsError::BudgetZero)));
    }

    #[test]
    fn fixed_threshold_extremes() {
        let s = signals(&[[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.6, 0.8]], &[0.2, 0.8, 0.5, 0.9]);
        assert_eq!(fixed_threshold_greedy(&s, 4, 0.0).unwrap().indices, vec![3]);
        // tau = 1 admits anything that is not an exact duplicate of a pick
        assert_eq!(fixed_threshold_greedy(&s, 4, 1.0).unwrap().indices, vec![1, 2, 3]);
        assert_eq!(fixed_threshold_greedy(&s, 2, 1.0).unwrap().indices, vec![1, 3]);
    }

    #[test]
    fn random_partition_is_seeded() {
        let a = random_partition(50, 7, 42).unwrap();
        assert_eq!(a, random_partition(50, 7, 42).unwrap());
        assert_eq!(a.len(), 7);
        assert_eq!(random_partition(50, 1, 3).unwrap().segments(), &[0..50]);
        assert_eq!(random_partition(3, 10, 3).unwrap().len(), 3);
    }

    #[test]
    fn random_anchors_stay_in_segment() {
        let p = random_partition(40, 6, 1).unwrap();
        let a = random_anchors(&p, 9);
        assert_eq!(a, random_anchors(&p, 9));
        for (seg, &i) in p.segments().iter().zip(&a) {
            assert!(seg.contains(&i));
        }
    }

    #[test]
    fn centroid_anchor_on_identical_frames_is_first() {
        let s = signals(&[[0.6, 0.8]; 4], &[0.0; 4]);
        let p = EventPartition::new(vec![0..1, 1..4], 4).unwrap();
        assert_eq!(centroid_anchors(&p, &s).unwrap(), vec![0, 1]);
    }
}
