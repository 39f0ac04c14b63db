#![allow(dead_code)]

use divsim::measures::MeasureContext;
use divsim::{SparseDistribution, VerbId};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random distribution with support size in `sizes` drawn from `0..vocab`.
pub fn random_dist(rng: &mut ChaCha8Rng, vocab: usize, sizes: std::ops::RangeInclusive<usize>) -> SparseDistribution {
    let size = rng.random_range(sizes).min(vocab);
    let mut ids = sample(rng, vocab, size).into_vec();
    ids.sort_unstable();
    SparseDistribution::from_weights(ids.into_iter().map(|v| (VerbId(v as u32), rng.random_range(0.01..1.0))))
        .unwrap()
}

/// Random distribution supported on a nonempty subset of `outer`'s support.
pub fn nested_dist(rng: &mut ChaCha8Rng, outer: &SparseDistribution) -> SparseDistribution {
    let size = rng.random_range(1..=outer.len());
    let mut picks = sample(rng, outer.len(), size).into_vec();
    picks.sort_unstable();
    SparseDistribution::from_weights(picks.into_iter().map(|i| (outer.support()[i], rng.random_range(0.01..1.0))))
        .unwrap()
}

/// Strictly positive unigram over `0..vocab`.
pub fn random_unigram(rng: &mut ChaCha8Rng, vocab: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..vocab).map(|_| rng.random_range(0.1..1.0)).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

pub fn context(unigram: &[f64], prior: f64) -> MeasureContext<'_> {
    MeasureContext {
        verb_unigram: unigram,
        candidate_prior: prior,
        verb_vocab_size: unigram.len(),
    }
}

pub fn dense(d: &SparseDistribution, vocab: usize) -> Vec<f64> {
    let mut out = vec![0.0; vocab];
    for (v, p) in d.iter() {
        out[v.index()] = p;
    }
    out
}

/// Kendall's tau_a numerator and denominator by enumerating all ordered
/// pairs of the dense vectors.
pub fn dense_tau(q: &[f64], r: &[f64]) -> (i64, i64) {
    let n = q.len();
    let mut num = 0i64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let a = (q[i] - q[j]).partial_cmp(&0.0).unwrap() as i64;
                let b = (r[i] - r[j]).partial_cmp(&0.0).unwrap() as i64;
                num += a * b;
            }
        }
    }
    (num, (n * (n - 1)) as i64)
}

pub fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= abs.max(rel * a.abs().max(b.abs()))
}
