//! Pseudoword test-set construction.
//!
//! Held-out tokens whose pair already occurs in training are dropped. Each
//! remaining `(n, v1)` token gets a decoy `v2` whose training frequency is
//! closest to that of `v1` in log space, subject to `v2 != v1`, a positive
//! training count, and `(n, v2)` being unseen in training. Ties on the log
//! distance go to the lexicographically smallest verb string.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusModel, PairCounts};
use crate::error::{Error, Result};
use crate::vocab::{NounId, VerbId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TestTriple {
    pub noun: NounId,
    /// The genuine cooccurrence.
    pub v1: VerbId,
    /// The frequency-matched decoy.
    pub v2: VerbId,
}

/// Counts of held-out tokens dropped while building test sets.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscardStats {
    pub seen_in_training: u64,
    pub unknown_noun: u64,
    pub untrained_verb: u64,
    pub no_decoy: u64,
}

/// Training verbs grouped by frequency for log-distance decoy lookup.
pub struct DecoyIndex<'a> {
    model: &'a CorpusModel,
    /// `(training count, verbs sorted by string)`, ascending count.
    groups: Vec<(u64, Vec<VerbId>)>,
}

impl<'a> DecoyIndex<'a> {
    pub fn new(model: &'a CorpusModel) -> Self {
        let counts = model.counts();
        let mut by_count: Vec<(u64, VerbId)> = model
            .training_verbs()
            .map(|v| (counts.verb_total(v), v))
            .collect();
        by_count.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| model.verb_str(a.1).cmp(model.verb_str(b.1))));
        let mut groups: Vec<(u64, Vec<VerbId>)> = Vec::new();
        for (c, v) in by_count {
            match groups.last_mut() {
                Some((gc, vs)) if *gc == c => vs.push(v),
                _ => groups.push((c, vec![v])),
            }
        }
        Self { model, groups }
    }

    fn first_eligible(&self, group: usize, n: NounId, v1: VerbId) -> Option<VerbId> {
        let q = self.model.conditional(n);
        self.groups[group]
            .1
            .iter()
            .copied()
            .find(|&v| v != v1 && !q.is_some_and(|d| d.contains(v)))
    }

    /// The decoy for `(n, v1)`, or `None` if no verb is eligible.
    pub fn decoy(&self, n: NounId, v1: VerbId) -> Option<VerbId> {
        let f1 = self.model.counts().verb_total(v1);
        if f1 == 0 {
            return None;
        }
        let home = self.groups.binary_search_by_key(&f1, |g| g.0).ok()?;
        if let Some(v) = self.first_eligible(home, n, v1) {
            return Some(v);
        }
        let mut lo = home.checked_sub(1);
        let mut hi = (home + 1 < self.groups.len()).then_some(home + 1);
        loop {
            // Compare f1/f_lo against f_hi/f1 exactly: f1^2 vs f_lo * f_hi.
            let (take_lo, take_hi) = match (lo, hi) {
                (None, None) => return None,
                (Some(_), None) => (true, false),
                (None, Some(_)) => (false, true),
                (Some(l), Some(h)) => {
                    let sq = f1 as u128 * f1 as u128;
                    let prod = self.groups[l].0 as u128 * self.groups[h].0 as u128;
                    (sq <= prod, sq >= prod)
                }
            };
            let cand_lo = if take_lo { self.first_eligible(lo.unwrap(), n, v1) } else { None };
            let cand_hi = if take_hi { self.first_eligible(hi.unwrap(), n, v1) } else { None };
            let best = match (cand_lo, cand_hi) {
                (Some(a), Some(b)) => {
                    Some(if self.model.verb_str(a) <= self.model.verb_str(b) { a } else { b })
                }
                (a, b) => a.or(b),
            };
            if best.is_some() {
                return best;
            }
            if take_lo {
                lo = lo.unwrap().checked_sub(1);
            }
            if take_hi {
                let next = hi.unwrap() + 1;
                hi = (next < self.groups.len()).then_some(next);
            }
        }
    }
}

/// Builds `partitions` test sets from held-out counts.
///
/// Surviving tokens (in ascending held-out `(noun, verb)` order) are shuffled
/// with ChaCha8 seeded from `seed` and dealt round-robin.
pub fn build_test_sets(
    model: &CorpusModel,
    heldout: &PairCounts,
    partitions: usize,
    seed: u64,
) -> Result<Vec<Vec<TestTriple>>> {
    build_test_sets_with_stats(model, heldout, partitions, seed).map(|(sets, _)| sets)
}

pub fn build_test_sets_with_stats(
    model: &CorpusModel,
    heldout: &PairCounts,
    partitions: usize,
    seed: u64,
) -> Result<(Vec<Vec<TestTriple>>, DiscardStats)> {
    if partitions < 2 {
        return Err(Error::Precondition(format!("partitions = {partitions} < 2")));
    }
    let index = DecoyIndex::new(model);
    let mut stats = DiscardStats::default();
    let mut decoys: HashMap<(NounId, VerbId), Option<VerbId>> = HashMap::new();
    let mut triples = Vec::new();
    for (hn, hv, count) in heldout.entries() {
        let Some(n) = model.noun_id(heldout.noun_str(hn)) else {
            stats.unknown_noun += count;
            continue;
        };
        let Some(v1) = model.verb_id(heldout.verb_str(hv)).filter(|&v| model.unigram(v) > 0.0) else {
            stats.untrained_verb += count;
            continue;
        };
        if model.counts().count(n, v1) > 0 {
            stats.seen_in_training += count;
            continue;
        }
        let decoy = *decoys.entry((n, v1)).or_insert_with(|| index.decoy(n, v1));
        match decoy {
            Some(v2) => triples.extend((0..count).map(|_| TestTriple { noun: n, v1, v2 })),
            None => {
                warn!(
                    "no eligible decoy for ({}, {}); dropping {count} token(s)",
                    model.noun_str(n),
                    model.verb_str(v1)
                );
                stats.no_decoy += count;
            }
        }
    }
    if triples.is_empty() {
        return Err(Error::Precondition(
            "no held-out pairs survived test-set construction".into(),
        ));
    }
    if triples.len() < partitions {
        return Err(Error::Precondition(format!(
            "{} surviving held-out pair(s) cannot fill {partitions} partitions",
            triples.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    triples.shuffle(&mut rng);
    let mut sets = vec![Vec::with_capacity(triples.len() / partitions + 1); partitions];
    for (i, t) in triples.into_iter().enumerate() {
        sets[i % partitions].push(t);
    }
    Ok((sets, stats))
}

/// Writes one `noun<TAB>v1<TAB>v2` line per triple.
pub fn write_triples<W: Write>(model: &CorpusModel, triples: &[TestTriple], mut out: W) -> Result<()> {
    let io = |e| Error::io("<test set>", e);
    for t in triples {
        writeln!(
            out,
            "{}\t{}\t{}",
            model.noun_str(t.noun),
            model.verb_str(t.v1),
            model.verb_str(t.v2)
        )
        .map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn read_triples<R: BufRead>(model: &CorpusModel, reader: R) -> Result<Vec<TestTriple>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [noun, v1, v2] = fields.as_slice() else {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        };
        out.push(TestTriple {
            noun: model.noun_id(noun).ok_or_else(|| Error::UnknownNoun(noun.to_string()))?,
            v1: model.verb_id(v1).ok_or_else(|| Error::UnknownVerb(v1.to_string()))?,
            v2: model.verb_id(v2).ok_or_else(|| Error::UnknownVerb(v2.to_string()))?,
        });
    }
    Ok(out)
}
