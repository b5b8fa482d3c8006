//! Seeded synthetic signal sets with known event structure.
//!
//! Each event gets a random unit centroid; its frames are the centroid plus
//! isotropic Gaussian noise, re-normalized. Frames of "relevant" events score
//! in `[0.6, 1.0)`, all others in `[0.0, 0.4)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{EfsError, Result};
use crate::partition::EventPartition;
use crate::scalar::Scalar;
use crate::signals::{validate_signals, Metadata, RawSignals, SignalSet, DEFAULT_FPS};

/// Metadata key holding the ground-truth event ranges.
pub const GROUND_TRUTH_KEY: &str = "ground_truth_events";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_frames: usize,
    pub dim: usize,
    pub n_events: usize,
    pub relevant_events: Vec<usize>,
    /// Expected norm of the per-frame perturbation relative to the unit centroid.
    pub noise: f64,
    pub seed: u64,
    #[serde(default = "default_fps")]
    pub fps: f64,
}

fn default_fps() -> f64 {
    DEFAULT_FPS
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(EfsError::InvalidSpec(msg));
        if self.n_frames == 0 || self.dim == 0 {
            return bad("n_frames and dim must be positive".into());
        }
        if self.n_events == 0 || self.n_events > self.n_frames {
            return bad(format!("n_events must lie in 1..={}, got {}", self.n_frames, self.n_events));
        }
        if let Some(e) = self.relevant_events.iter().find(|&&e| e >= self.n_events) {
            return bad(format!("relevant event {e} out of range for {} events", self.n_events));
        }
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            return bad(format!("noise must be finite and >= 0, got {}", self.noise));
        }
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return bad(format!("fps must be positive, got {}", self.fps));
        }
        Ok(())
    }

    /// Equal-width events: event `e` covers `[e*n/E, (e+1)*n/E)`.
    pub fn ground_truth(&self) -> EventPartition {
        let starts: Vec<usize> = (0..self.n_events).map(|e| e * self.n_frames / self.n_events).collect();
        EventPartition::from_starts(&starts, self.n_frames).expect("equal-width events tile the range")
    }
}

fn unit_gaussian(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Generates the signal set and its ground-truth partition. The ground truth
/// is also stored in the metadata under [`GROUND_TRUTH_KEY`].
pub fn gen_synthetic<T: Scalar>(spec: &SyntheticSpec) -> Result<(SignalSet<T>, EventPartition)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let truth = spec.ground_truth();
    let centroids: Vec<Vec<f64>> = (0..spec.n_events).map(|_| unit_gaussian(&mut rng, spec.dim)).collect();
    let scale = spec.noise / (spec.dim as f64).sqrt();

    let mut embeddings = Vec::with_capacity(spec.n_frames * spec.dim);
    let mut relevance = Vec::with_capacity(spec.n_frames);
    for (e, seg) in truth.segments().iter().enumerate() {
        let relevant = spec.relevant_events.contains(&e);
        for _ in seg.clone() {
            let mut row: Vec<f64> = centroids[e].clone();
            if scale > 0.0 {
                for v in row.iter_mut() {
                    *v += scale * rng.sample::<f64, _>(StandardNormal);
                }
                let n = row.iter().map(|x| x * x).sum::<f64>().sqrt();
                row.iter_mut().for_each(|v| *v /= n);
            }
            embeddings.extend(row.into_iter().map(T::lit));
            let u: f64 = rng.random();
            relevance.push(T::lit(if relevant { 0.6 + 0.4 * u } else { 0.4 * u }));
        }
    }

    let mut metadata = Metadata {
        query: "synthetic".into(),
        source: format!("synthetic:seed={}", spec.seed),
        ..Default::default()
    };
    metadata.extra.insert(
        GROUND_TRUTH_KEY.into(),
        serde_json::to_value(truth.segments().iter().map(|s| [s.start, s.end]).collect::<Vec<_>>())
            .expect("ranges serialize"),
    );
    metadata.extra.insert(
        "relevant_events".into(),
        serde_json::to_value(&spec.relevant_events).expect("indices serialize"),
    );

    let (signals, _) = validate_signals(RawSignals {
        frame_count: spec.n_frames,
        dim: spec.dim,
        embeddings,
        relevance,
        fps: spec.fps,
        metadata,
    })?;
    Ok((signals, truth))
}

/// Reads the ground-truth partition back out of a signal set's metadata.
pub fn ground_truth_from_metadata(metadata: &Metadata, n: usize) -> Result<EventPartition> {
    let value = metadata
        .extra
        .get(GROUND_TRUTH_KEY)
        .ok_or_else(|| EfsError::MissingGroundTruth(format!("metadata has no {GROUND_TRUTH_KEY:?}")))?;
    let ranges: Vec<[usize; 2]> =
        serde_json::from_value(value.clone()).map_err(|e| EfsError::InvalidMetadata(e.to_string()))?;
    EventPartition::new(ranges.into_iter().map(|[a, b]| a..b).collect(), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::temporal_similarity;

    fn spec(noise: f64, seed: u64) -> SyntheticSpec {
        SyntheticSpec { n_frames: 100, dim: 8, n_events: 10, relevant_events: vec![2, 5], noise, seed, fps: 1.0 }
    }

    #[test]
    fn deterministic_given_seed() {
        let (a, _) = gen_synthetic::<f64>(&spec(0.3, 7)).unwrap();
        let (b, _) = gen_synthetic::<f64>(&spec(0.3, 7)).unwrap();
        assert_eq!(a, b);
        let (c, _) = gen_synthetic::<f64>(&spec(0.3, 8)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn equal_width_ground_truth() {
        let (_, truth) = gen_synthetic::<f64>(&spec(0.3, 1)).unwrap();
        assert_eq!(truth.len(), 10);
        assert!(truth.segments().iter().all(|s| s.len() == 10));
    }

    #[test]
    fn zero_noise_gives_identical_frames_within_events() {
        let (s, truth) = gen_synthetic::<f64>(&spec(0.0, 3)).unwrap();
        for seg in truth.segments() {
            for i in seg.clone() {
                assert_eq!(s.row(i), s.row(seg.start));
            }
        }
        let curve = temporal_similarity(&s, 1).unwrap();
        for seg in truth.segments() {
            // interior frames only see their own event with l = 1
            for i in seg.start + 1..seg.end - 1 {
                assert!((curve.values[i] - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn relevance_bands() {
        let (s, truth) = gen_synthetic::<f64>(&spec(0.2, 4)).unwrap();
        for (e, seg) in truth.segments().iter().enumerate() {
            for i in seg.clone() {
                let r = s.relevance()[i];
                if [2, 5].contains(&e) {
                    assert!((0.6..1.0).contains(&r));
                } else {
                    assert!((0.0..0.4).contains(&r));
                }
            }
        }
    }

    #[test]
    fn ground_truth_roundtrips_through_metadata() {
        let (s, truth) = gen_synthetic::<f32>(&spec(0.2, 4)).unwrap();
        assert_eq!(ground_truth_from_metadata(s.metadata(), 100).unwrap(), truth);
    }

    #[test]
    fn invalid_specs() {
        let mut bad = spec(0.1, 0);
        bad.n_events = 101;
        assert!(matches!(gen_synthetic::<f64>(&bad), Err(EfsError::InvalidSpec(_))));
        let mut bad = spec(0.1, 0);
        bad.relevant_events = vec![10];
        assert!(matches!(gen_synthetic::<f64>(&bad), Err(EfsError::InvalidSpec(_))));
        let mut bad = spec(-1.0, 0);
        bad.noise = -1.0;
        assert!(gen_synthetic::<f64>(&bad).is_err());
    }
}
