//! Strategy comparison over a corpus with known event structure.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::EfsConfig;
use crate::error::{EfsError, Result};
use crate::format::read_signals;
use crate::metrics::{evaluate, SelectionMetrics};
use crate::partition::EventPartition;
use crate::pipeline::{run_efs, run_strategy, Strategy};
use crate::scalar::Scalar;
use crate::signals::SignalSet;
use crate::synth::ground_truth_from_metadata;

/// Extension of signals files picked up by [`load_corpus`].
pub const SIGNALS_EXTENSION: &str = "efss";

#[derive(Debug, Clone)]
pub struct CorpusItem<T> {
    pub id: String,
    pub signals: SignalSet<T>,
    pub ground_truth: EventPartition,
}

/// Loads every `*.efss` file in `dir` (sorted by file name). Ground truth
/// comes from the file's metadata.
pub fn load_corpus<T: Scalar>(dir: impl AsRef<Path>) -> Result<(Vec<CorpusItem<T>>, Duration)> {
    let start = Instant::now();
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .filter(|p| p.extension().is_some_and(|e| e == SIGNALS_EXTENSION))
        .collect();
    paths.sort();
    let items = paths
        .iter()
        .map(|p| {
            let (signals, _) = read_signals::<T>(p)?;
            let ground_truth = ground_truth_from_metadata(signals.metadata(), signals.frame_count())
                .map_err(|e| EfsError::MissingGroundTruth(format!("{}: {e}", p.display())))?;
            let id = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Ok(CorpusItem { id, signals, ground_truth })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((items, start.elapsed()))
}

/// Metrics of one strategy at one budget on one item.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemRecord {
    pub item: String,
    pub strategy: Strategy,
    pub k: usize,
    pub selected: usize,
    #[serde(flatten)]
    pub metrics: SelectionMetrics,
}

/// Corpus means for one strategy and budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategySummary {
    pub strategy: Strategy,
    pub k: usize,
    pub event_coverage: f64,
    pub mean_relevance: f64,
    pub redundancy: f64,
}

/// Mean per-item wall-clock of each stage, in milliseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct TimingSummary {
    pub reading_ms: f64,
    pub similarity_ms: f64,
    pub partition_ms: f64,
    pub refinement_ms: f64,
    pub selection_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchResult {
    pub items: usize,
    pub budgets: Vec<usize>,
    pub summaries: Vec<StrategySummary>,
    pub records: Vec<ItemRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<TimingSummary>,
}

/// (similarity, partition, refinement) of one EFS run.
type StageSample = (Duration, Duration, Duration);

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Runs every strategy at every budget on every item.
///
/// Items are evaluated in parallel; records come back in item order, so the
/// result does not depend on scheduling (timings aside).
pub fn bench<T: Scalar>(
    items: &[CorpusItem<T>],
    strategies: &[Strategy],
    budgets: &[usize],
    cfg: &EfsConfig,
) -> Result<BenchResult> {
    if items.is_empty() {
        return Err(EfsError::InvalidConfig("corpus is empty".into()));
    }
    if let Some(&k) = budgets.iter().find(|&&k| k == 0) {
        return Err(EfsError::InvalidConfig(format!("budget {k} must be at least 1")));
    }

    let per_item: Vec<(Vec<ItemRecord>, Vec<StageSample>)> = items
        .par_iter()
        .map(|item| {
            let mut records = Vec::new();
            let mut timings = Vec::new();
            for &k in budgets {
                let cfg = cfg.clone().with_k(k);
                for &strategy in strategies {
                    let indices = if strategy == Strategy::Efs {
                        let run = run_efs(&item.signals, &cfg)?;
                        let t = run.timings;
                        timings.push((t.similarity, t.partition, t.refinement));
                        run.selection.indices
                    } else {
                        run_strategy(&item.signals, strategy, &cfg)?.indices
                    };
                    records.push(ItemRecord {
                        item: item.id.clone(),
                        strategy,
                        k,
                        selected: indices.len(),
                        metrics: evaluate(&indices, &item.signals, &item.ground_truth),
                    });
                }
            }
            Ok((records, timings))
        })
        .collect::<Result<_>>()?;

    let records: Vec<ItemRecord> = per_item.iter().flat_map(|(r, _)| r.iter().cloned()).collect();
    let mut summaries = Vec::new();
    for &k in budgets {
        for &strategy in strategies {
            let rows: Vec<&ItemRecord> = records.iter().filter(|r| r.k == k && r.strategy == strategy).collect();
            let mean = |f: fn(&SelectionMetrics) -> f64| rows.iter().map(|r| f(&r.metrics)).sum::<f64>() / rows.len() as f64;
            summaries.push(StrategySummary {
                strategy,
                k,
                event_coverage: mean(|m| m.event_coverage),
                mean_relevance: mean(|m| m.mean_relevance),
                redundancy: mean(|m| m.redundancy),
            });
        }
    }

    let runs: Vec<_> = per_item.iter().flat_map(|(_, t)| t.iter().copied()).collect();
    let timing = (!runs.is_empty()).then(|| {
        let count = runs.len() as f64;
        let (s, p, r) = runs.iter().fold((0.0, 0.0, 0.0), |acc, (s, p, r)| (acc.0 + ms(*s), acc.1 + ms(*p), acc.2 + ms(*r)));
        TimingSummary {
            reading_ms: 0.0,
            similarity_ms: s / count,
            partition_ms: p / count,
            refinement_ms: r / count,
            selection_ms: (s + p + r) / count,
        }
    });

    Ok(BenchResult { items: items.len(), budgets: budgets.to_vec(), summaries, records, timing })
}

/// Plain-text table of the per-strategy summaries.
pub fn render_table(result: &BenchResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} items", result.items);
    let _ = writeln!(out, "{:<8} {:>4} {:>9} {:>9} {:>10}", "strategy", "k", "coverage", "relevance", "redundancy");
    for s in &result.summaries {
        let _ = writeln!(
            out,
            "{:<8} {:>4} {:>9.4} {:>9.4} {:>10.4}",
            s.strategy.name(),
            s.k,
            s.event_coverage,
            s.mean_relevance,
            s.redundancy
        );
    }
    if let Some(t) = &result.timing {
        let _ = writeln!(
            out,
            "efs stage ms/item: reading {:.3}  similarity {:.3}  partition {:.3}  refinement {:.3}  selection {:.3}",
            t.reading_ms, t.similarity_ms, t.partition_ms, t.refinement_ms, t.selection_ms
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{gen_synthetic, SyntheticSpec};

    fn corpus(n: usize) -> Vec<CorpusItem<f64>> {
        (0..n)
            .map(|seed| {
                let spec = SyntheticSpec {
                    n_frames: 60,
                    dim: 8,
                    n_events: 6,
                    relevant_events: vec![1, 4],
                    noise: 0.2,
                    seed: seed as u64,
                    fps: 1.0,
                };
                let (signals, ground_truth) = gen_synthetic(&spec).unwrap();
                CorpusItem { id: format!("item{seed:03}"), signals, ground_truth }
            })
            .collect()
    }

    #[test]
    fn summaries_cover_every_combination() {
        let items = corpus(3);
        let result = bench(&items, &Strategy::ALL, &[4, 8], &EfsConfig::default()).unwrap();
        assert_eq!(result.summaries.len(), 10);
        assert_eq!(result.records.len(), 30);
        for s in &result.summaries {
            assert!((0.0..=1.0).contains(&s.event_coverage));
            assert!((0.0..=1.0).contains(&s.redundancy));
        }
        assert!(result.timing.is_some());
        assert!(render_table(&result).contains("uniform"));
    }

    #[test]
    fn records_are_in_item_order() {
        let items = corpus(4);
        let result = bench(&items, &[Strategy::Topk], &[4], &EfsConfig::default()).unwrap();
        let ids: Vec<&str> = result.records.iter().map(|r| r.item.as_str()).collect();
        assert_eq!(ids, ["item000", "item001", "item002", "item003"]);
        assert!(result.timing.is_none());
    }

    #[test]
    fn empty_corpus_and_zero_budget_are_errors() {
        assert!(bench::<f64>(&[], &[Strategy::Efs], &[8], &EfsConfig::default()).is_err());
        assert!(bench(&corpus(1), &[Strategy::Efs], &[0], &EfsConfig::default()).is_err());
    }
}
