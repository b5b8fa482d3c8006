use serde::{Deserialize, Serialize};

use crate::error::{EfsError, Result};

/// What to do when refinement stops short of the frame budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillPolicy {
    /// Top up with the most relevant frames not yet selected.
    #[default]
    FillByRelevance,
    /// Return whatever refinement admitted.
    AllowUnderfill,
}

/// Every tunable of the selection pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EfsConfig {
    /// Keyframe budget.
    pub k: usize,
    /// Maximum number of events kept after merging.
    pub m_target: usize,
    /// Half-width of the temporal similarity window.
    pub window: usize,
    /// Threshold relaxation factor: thresholds sit `alpha` standard deviations
    /// either side of the mean candidate-to-anchor similarity.
    pub alpha: f64,
    /// Threshold increment between refinement passes.
    pub delta: f64,
    pub fill_policy: FillPolicy,
    /// Relevance/diversity tradeoff of the classic MMR baseline.
    pub lambda: f64,
    /// Diversity threshold of the fixed-threshold baseline.
    pub tau: f64,
    /// Seed for the randomized baselines.
    pub seed: u64,
}

impl EfsConfig {
    pub const DEFAULT_K: usize = 16;
    pub const DEFAULT_M: usize = 10;
    pub const DEFAULT_WINDOW: usize = 3;
    pub const DEFAULT_ALPHA: f64 = 0.5;
    pub const DEFAULT_DELTA: f64 = 0.05;
    pub const DEFAULT_LAMBDA: f64 = 0.5;
    pub const DEFAULT_TAU: f64 = 0.6;

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_m_target(mut self, m: usize) -> Self {
        self.m_target = m;
        self
    }

    pub fn with_fill_policy(mut self, fill: FillPolicy) -> Self {
        self.fill_policy = fill;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(EfsError::BudgetZero);
        }
        let bad = |msg: String| Err(EfsError::InvalidConfig(msg));
        if self.m_target == 0 {
            return bad("m_target must be at least 1".into());
        }
        if self.window == 0 {
            return Err(EfsError::WindowTooSmall(0));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return bad(format!("alpha must be finite and >= 0, got {}", self.alpha));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return bad(format!("delta must be finite and > 0, got {}", self.delta));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return bad(format!("lambda must lie in [0, 1], got {}", self.lambda));
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return bad(format!("tau must lie in [0, 1], got {}", self.tau));
        }
        Ok(())
    }
}

impl Default for EfsConfig {
    fn default() -> Self {
        Self {
            k: Self::DEFAULT_K,
            m_target: Self::DEFAULT_M,
            window: Self::DEFAULT_WINDOW,
            alpha: Self::DEFAULT_ALPHA,
            delta: Self::DEFAULT_DELTA,
            fill_policy: FillPolicy::default(),
            lambda: Self::DEFAULT_LAMBDA,
            tau: Self::DEFAULT_TAU,
            seed: 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = EfsConfig::default();
        assert_eq!((cfg.window, cfg.m_target, cfg.alpha), (3, 10, 0.5));
        assert_eq!(cfg.fill_policy, FillPolicy::FillByRelevance);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(EfsConfig::default().with_k(0).validate(), Err(EfsError::BudgetZero)));
        assert!(EfsConfig { delta: 0.0, ..Default::default() }.validate().is_err());
        assert!(EfsConfig { alpha: -0.1, ..Default::default() }.validate().is_err());
        assert!(EfsConfig { lambda: 1.5, ..Default::default() }.validate().is_err());
        assert!(EfsConfig { tau: f64::NAN, ..Default::default() }.validate().is_err());
        assert!(EfsConfig { m_target: 0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn ablation_taus_are_valid() {
        for tau in [0.4, 0.6, 0.8] {
            EfsConfig { tau, ..Default::default() }.validate().unwrap();
        }
    }

    #[test]
    fn partial_json_fills_defaults() {
        let cfg: EfsConfig = serde_json::from_str(r#"{"k": 8, "fill_policy": "allow_underfill"}"#).unwrap();
        assert_eq!(cfg.k, 8);
        assert_eq!(cfg.m_target, 10);
        assert_eq!(cfg.fill_policy, FillPolicy::AllowUnderfill);
    }
}
