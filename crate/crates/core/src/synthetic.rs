//! Seeded latent-class cooccurrence corpora for desk-scale experiments.
//!
//! Each noun belongs to one of `classes` latent classes (`noun % classes`).
//! Every class draws verbs from a Zipfian profile over its own random
//! permutation of the verb vocabulary, so nouns within a class share one
//! conditional verb distribution. Nouns are drawn uniformly per token.

use std::fmt::Write as _;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{ingest_str, PairCounts};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatentClassCorpus {
    pub nouns: usize,
    pub classes: usize,
    pub verbs: usize,
    pub tokens: usize,
    pub zipf_exponent: f64,
}

impl Default for LatentClassCorpus {
    fn default() -> Self {
        Self {
            nouns: 200,
            classes: 10,
            verbs: 500,
            tokens: 50_000,
            zipf_exponent: 1.0,
        }
    }
}

impl LatentClassCorpus {
    pub fn noun_name(i: usize) -> String {
        format!("n{i:04}")
    }

    pub fn verb_name(i: usize) -> String {
        format!("v{i:04}")
    }

    pub fn class_of(&self, noun: usize) -> usize {
        noun % self.classes
    }

    /// Token stream as `(noun index, verb index)` pairs.
    pub fn sample(&self, seed: u64) -> Result<Vec<(usize, usize)>> {
        if self.nouns == 0 || self.classes == 0 || self.verbs == 0 {
            return Err(Error::Precondition("synthetic corpus needs nouns, classes and verbs".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let profiles = (0..self.classes)
            .map(|_| {
                let mut order: Vec<usize> = (0..self.verbs).collect();
                order.shuffle(&mut rng);
                let mut weights = vec![0.0; self.verbs];
                for (rank, &v) in order.iter().enumerate() {
                    weights[v] = 1.0 / ((rank + 1) as f64).powf(self.zipf_exponent);
                }
                WeightedIndex::new(&weights)
                    .map_err(|e| Error::Precondition(format!("class profile: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((0..self.tokens)
            .map(|_| {
                let n = rng.random_range(0..self.nouns);
                (n, profiles[self.class_of(n)].sample(&mut rng))
            })
            .collect())
    }

    /// One `noun<TAB>verb` line per token.
    pub fn to_tsv(&self, seed: u64) -> Result<String> {
        let mut out = String::with_capacity(self.tokens * 12);
        for (n, v) in self.sample(seed)? {
            let _ = writeln!(out, "{}\t{}", Self::noun_name(n), Self::verb_name(v));
        }
        Ok(out)
    }

    pub fn generate(&self, seed: u64) -> Result<PairCounts> {
        ingest_str(&self.to_tsv(seed)?)
    }
}
