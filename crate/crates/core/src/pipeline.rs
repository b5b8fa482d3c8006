//! End-to-end selection and the JSON report describing it.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::baselines::{classic_mmr, fixed_threshold_greedy, topk_sample, uniform_sample};
use crate::config::EfsConfig;
use crate::error::{EfsError, Result};
use crate::partition::{detect_local_minima, merge_to_target, partition_from_minima, EventPartition};
use crate::scalar::Scalar;
use crate::select::{adaptive_refine, select_anchors, Selection, Trace};
use crate::signals::{temporal_similarity, SignalSet, SimilarityCurve};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Efs,
    Uniform,
    Topk,
    Mmr,
    Fixed,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [Strategy::Efs, Strategy::Uniform, Strategy::Topk, Strategy::Mmr, Strategy::Fixed];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Efs => "efs",
            Strategy::Uniform => "uniform",
            Strategy::Topk => "topk",
            Strategy::Mmr => "mmr",
            Strategy::Fixed => "fixed",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = EfsError;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| EfsError::InvalidConfig(format!("unknown strategy {s:?}")))
    }
}

/// Wall-clock time of each stage of [`run_efs`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub similarity: Duration,
    pub partition: Duration,
    pub refinement: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.similarity + self.partition + self.refinement
    }
}

/// Every intermediate artifact of one event-anchored selection.
#[derive(Debug, Clone)]
pub struct EfsRun<T> {
    pub curve: SimilarityCurve<T>,
    pub minima: Vec<usize>,
    pub initial_partition: EventPartition,
    pub selection: Selection<T>,
    pub timings: StageTimings,
}

/// Similarity curve, boundary detection, merging, anchoring and refinement.
pub fn run_efs<T: Scalar>(signals: &SignalSet<T>, cfg: &EfsConfig) -> Result<EfsRun<T>> {
    cfg.validate()?;
    let t0 = Instant::now();
    let curve = temporal_similarity(signals, cfg.window)?;
    let t1 = Instant::now();
    let minima = detect_local_minima(&curve);
    let initial_partition = partition_from_minima(&minima, signals.frame_count())?;
    let partition = merge_to_target(&initial_partition, signals, cfg.m_target)?;
    let anchors = select_anchors(&partition, signals.relevance())?;
    let t2 = Instant::now();
    let mut selection = adaptive_refine(signals, &anchors, cfg)?;
    selection.partition = Some(partition);
    let t3 = Instant::now();
    Ok(EfsRun {
        curve,
        minima,
        initial_partition,
        selection,
        timings: StageTimings { similarity: t1 - t0, partition: t2 - t1, refinement: t3 - t2 },
    })
}

/// Runs one strategy with budget `cfg.k`.
pub fn run_strategy<T: Scalar>(signals: &SignalSet<T>, strategy: Strategy, cfg: &EfsConfig) -> Result<Selection<T>> {
    cfg.validate()?;
    let n = signals.frame_count();
    match strategy {
        Strategy::Efs => Ok(run_efs(signals, cfg)?.selection),
        Strategy::Uniform => Ok(Selection::plain(uniform_sample(n, cfg.k))),
        Strategy::Topk => Ok(Selection::plain(topk_sample(signals.relevance(), cfg.k))),
        Strategy::Mmr => classic_mmr(signals, cfg.k, cfg.lambda),
        Strategy::Fixed => fixed_threshold_greedy(signals, cfg.k, cfg.tau),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub mean: f64,
    pub std: f64,
    pub theta_strict: f64,
    pub theta_loose: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PassReport {
    pub pass: usize,
    pub threshold: f64,
    pub admitted: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MmrStepReport {
    pub frame: usize,
    pub score: f64,
}

/// JSON-facing description of a selection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionReport {
    pub strategy: Strategy,
    pub n_frames: usize,
    pub fps: f64,
    pub query: String,
    pub source: String,
    pub selected: Vec<usize>,
    /// `index / fps` seconds.
    pub timestamps: Vec<f64>,
    /// Relevance of each selected frame.
    pub relevance: Vec<f64>,
    pub anchors: Vec<usize>,
    pub events: Vec<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<ThresholdReport>,
    pub passes: Vec<PassReport>,
    pub filled: Vec<usize>,
    pub dropped_anchors: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub mmr_steps: Vec<MmrStepReport>,
    pub config: EfsConfig,
}

impl SelectionReport {
    pub fn new<T: Scalar>(signals: &SignalSet<T>, strategy: Strategy, cfg: &EfsConfig, sel: &Selection<T>) -> Self {
        let mut report = SelectionReport {
            strategy,
            n_frames: signals.frame_count(),
            fps: signals.fps(),
            query: signals.metadata().query.clone(),
            source: signals.metadata().source.clone(),
            selected: sel.indices.clone(),
            timestamps: sel.indices.iter().map(|&i| signals.timestamp(i)).collect(),
            relevance: sel.indices.iter().map(|&i| signals.relevance()[i].as_f64()).collect(),
            anchors: sel.anchors.clone(),
            events: sel
                .partition
                .as_ref()
                .map(|p| p.segments().iter().map(|s| [s.start, s.end]).collect())
                .unwrap_or_default(),
            thresholds: None,
            passes: Vec::new(),
            filled: Vec::new(),
            dropped_anchors: Vec::new(),
            mmr_steps: Vec::new(),
            config: cfg.clone(),
        };
        match &sel.trace {
            Trace::None => {}
            Trace::Refine(t) => {
                report.thresholds = t.stats.map(|s| ThresholdReport {
                    mean: s.mean.as_f64(),
                    std: s.std.as_f64(),
                    theta_strict: s.strict.as_f64(),
                    theta_loose: s.loose.as_f64(),
                });
                report.passes = t
                    .passes
                    .iter()
                    .map(|p| PassReport { pass: p.pass, threshold: p.threshold.as_f64(), admitted: p.admitted.clone() })
                    .collect();
                report.filled = t.filled.clone();
                report.dropped_anchors = t.dropped_anchors.clone();
            }
            Trace::Mmr { steps } => {
                report.mmr_steps =
                    steps.iter().map(|s| MmrStepReport { frame: s.frame, score: s.score.as_f64() }).collect();
            }
        }
        report
    }
}

/// Runs `strategy` and describes the result.
pub fn select_report<T: Scalar>(signals: &SignalSet<T>, strategy: Strategy, cfg: &EfsConfig) -> Result<SelectionReport> {
    let sel = run_strategy(signals, strategy, cfg)?;
    Ok(SelectionReport::new(signals, strategy, cfg, &sel))
}
