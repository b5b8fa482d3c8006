//! Independent reference implementations used as test oracles.
//!
//! These are written for obviousness, not speed, and do not call into the
//! selection, partition or curve code they check. Frame-to-frame similarity
//! in the selection oracles goes through `SignalSet::cosine`, the shared
//! similarity primitive, so that exact-duplicate frames compare identically
//! on both sides.

#![allow(dead_code)]

use efs_core::{FillPolicy, SignalSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Random signal set. With `dup_prob > 0` some rows repeat the previous row.
pub fn random_signals(rng: &mut ChaCha8Rng, n: usize, dim: usize, dup_prob: f64) -> SignalSet<f64> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 && rng.random_bool(dup_prob) {
            rows.push(rows[i - 1].clone());
        } else {
            rows.push(random_unit(rng, dim));
        }
    }
    let rel = (0..n).map(|_| rng.random_range(-2.0..3.0)).collect();
    SignalSet::from_rows(&rows, rel).unwrap().0
}

pub fn naive_dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// Weighted temporal similarity evaluated straight from its definition.
pub fn naive_curve(s: &SignalSet<f64>, l: usize) -> Vec<f64> {
    let n = s.frame_count() as i64;
    let mut out = Vec::new();
    for i in 0..n {
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..n {
            let d = (i - j).unsigned_abs() as usize;
            if d >= 1 && d <= l {
                let w = (l + 1 - d) as f64;
                num += w * naive_dot(s.row(i as usize), s.row(j as usize));
                den += w;
            }
        }
        out.push(if den == 0.0 { 1.0 } else { num / den });
    }
    out
}

/// Interior minima by brute force: `i` starts a run of equal values whose
/// nearest differing neighbours on both sides are larger.
pub fn naive_minima(v: &[f64]) -> Vec<usize> {
    let n = v.len();
    let mut out = Vec::new();
    for i in 1..n.saturating_sub(1) {
        if v[i - 1] == v[i] {
            continue;
        }
        let mut j = i;
        while j < n && v[j] == v[i] {
            j += 1;
        }
        if j < n && v[i - 1] > v[i] && v[j] > v[i] {
            out.push(i);
        }
    }
    out
}

pub fn naive_unit_mean(s: &SignalSet<f64>, range: std::ops::Range<usize>) -> Vec<f64> {
    let mut m = vec![0.0; s.dim()];
    for i in range.clone() {
        for (a, b) in m.iter_mut().zip(s.row(i)) {
            *a += b;
        }
    }
    let count = range.len() as f64;
    for a in m.iter_mut() {
        *a /= count;
    }
    let n = naive_dot(&m, &m).sqrt();
    m.into_iter().map(|a| a / n).collect()
}

/// Exhaustive argmax over adjacent pairs (earliest on ties), plus all pair cosines.
pub fn best_adjacent_pair(s: &SignalSet<f64>, segments: &[std::ops::Range<usize>]) -> (usize, Vec<f64>) {
    let means: Vec<Vec<f64>> = segments.iter().map(|r| naive_unit_mean(s, r.clone())).collect();
    let cos: Vec<f64> = (0..segments.len() - 1).map(|i| naive_dot(&means[i], &means[i + 1])).collect();
    let mut best = 0;
    for i in 0..cos.len() {
        if cos[i] > cos[best] {
            best = i;
        }
    }
    (best, cos)
}

pub struct OracleRefine {
    pub indices: Vec<usize>,
    pub passes: usize,
    pub std: f64,
}

/// Line-by-line transcription of the anchor-guided refinement loop, with the
/// termination guard (one pass at the loose threshold at most), population
/// std, and fill-by-relevance.
pub fn oracle_refine(
    s: &SignalSet<f64>,
    anchors: &[usize],
    k: usize,
    alpha: f64,
    delta: f64,
    fill: FillPolicy,
) -> OracleRefine {
    let n = s.frame_count();
    let rel = s.relevance();
    let cos = |a: usize, b: usize| s.cosine(a, b);

    // K <- K_init; sort C descending by relevance (smaller index first on ties)
    let mut kset: Vec<usize> = anchors.to_vec();
    let mut c: Vec<usize> = (0..n).collect();
    c.sort_by(|&a, &b| rel[b].partial_cmp(&rel[a]).unwrap().then(a.cmp(&b)));

    if kset.len() > k {
        let mut a = kset.clone();
        a.sort_by(|&x, &y| rel[y].partial_cmp(&rel[x]).unwrap().then(x.cmp(&y)));
        a.truncate(k);
        a.sort();
        return OracleRefine { indices: a, passes: 0, std: f64::NAN };
    }

    // mu, sigma of max similarity to K_init over all of C
    let m: Vec<f64> = c
        .iter()
        .map(|&i| anchors.iter().map(|&j| cos(i, j)).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let mu = if m.iter().all(|&x| x == m[0]) { m[0] } else { m.iter().sum::<f64>() / m.len() as f64 };
    let sigma = (m.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / m.len() as f64).sqrt();
    let strict = (mu - alpha * sigma).clamp(0.0, 1.0);
    let loose = (mu + alpha * sigma).clamp(0.0, 1.0);

    let mut theta = strict;
    let mut passes = 0;
    while kset.len() < k && theta <= loose {
        passes += 1;
        for &ic in &c {
            if kset.contains(&ic) {
                continue;
            }
            if kset.len() >= k {
                break;
            }
            let max_sim = kset.iter().map(|&j| cos(ic, j)).fold(f64::NEG_INFINITY, f64::max);
            if max_sim < theta {
                kset.push(ic);
            }
        }
        if theta == loose {
            break;
        }
        theta = (theta + delta).min(loose);
    }

    if fill == FillPolicy::FillByRelevance {
        for &ic in &c {
            if kset.len() >= k.min(n) {
                break;
            }
            if !kset.contains(&ic) {
                kset.push(ic);
            }
        }
    }
    kset.sort();
    OracleRefine { indices: kset, passes, std: sigma }
}

/// Exhaustive evaluation of one MMR step given the already-selected set.
pub fn mmr_step_argmax(s: &SignalSet<f64>, selected: &[usize], lambda: f64) -> (usize, f64) {
    let mut best: Option<(usize, f64)> = None;
    for i in 0..s.frame_count() {
        if selected.contains(&i) {
            continue;
        }
        let div = if selected.is_empty() {
            0.0
        } else {
            selected.iter().map(|&j| s.cosine(i, j)).fold(f64::NEG_INFINITY, f64::max)
        };
        let score = lambda * s.relevance()[i] - (1.0 - lambda) * div;
        match best {
            Some((_, b)) if score <= b => {}
            _ => best = Some((i, score)),
        }
    }
    best.unwrap()
}
