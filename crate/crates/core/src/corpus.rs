//! Cooccurrence counts and the unsmoothed relative-frequency base model.
//!
//! Pair streams are read as UTF-8 TSV, one `noun<TAB>verb` token or
//! `noun<TAB>verb<TAB>count` aggregate per line. Counts are kept as `u64`
//! tokens keyed by interned noun and verb ids; every stage after ingestion
//! (noun filtering, train/held-out splitting) preserves both interning
//! tables so ids stay comparable across the resulting corpora.

use std::collections::BTreeMap;
use std::io::BufRead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::SparseDistribution;
use crate::error::{Error, Result};
use crate::vocab::{Interner, NounId, VerbId};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairCounts {
    nouns: Interner,
    verbs: Interner,
    entries: BTreeMap<(NounId, VerbId), u64>,
    noun_totals: Vec<u64>,
    verb_totals: Vec<u64>,
}

impl PairCounts {
    pub fn new() -> Self {
        Self::default()
    }

    /// Empty counts sharing the interning tables of `self`.
    fn empty_like(&self) -> Self {
        Self {
            nouns: self.nouns.clone(),
            verbs: self.verbs.clone(),
            entries: BTreeMap::new(),
            noun_totals: vec![0; self.nouns.len()],
            verb_totals: vec![0; self.verbs.len()],
        }
    }

    pub fn add(&mut self, noun: &str, verb: &str, count: u64) {
        let n = NounId(self.nouns.intern(noun));
        let v = VerbId(self.verbs.intern(verb));
        self.noun_totals.resize(self.nouns.len(), 0);
        self.verb_totals.resize(self.verbs.len(), 0);
        self.add_ids(n, v, count);
    }

    fn add_ids(&mut self, n: NounId, v: VerbId, count: u64) {
        if count == 0 {
            return;
        }
        *self.entries.entry((n, v)).or_insert(0) += count;
        self.noun_totals[n.index()] += count;
        self.verb_totals[v.index()] += count;
    }

    pub fn nouns(&self) -> &Interner {
        &self.nouns
    }

    pub fn verbs(&self) -> &Interner {
        &self.verbs
    }

    /// Nonzero entries in ascending `(noun, verb)` id order.
    pub fn entries(&self) -> impl Iterator<Item = (NounId, VerbId, u64)> + '_ {
        self.entries.iter().map(|(&(n, v), &c)| (n, v, c))
    }

    pub fn count(&self, n: NounId, v: VerbId) -> u64 {
        self.entries.get(&(n, v)).copied().unwrap_or(0)
    }

    pub fn count_str(&self, noun: &str, verb: &str) -> u64 {
        match (self.nouns.get(noun), self.verbs.get(verb)) {
            (Some(n), Some(v)) => self.count(NounId(n), VerbId(v)),
            _ => 0,
        }
    }

    pub fn noun_total(&self, n: NounId) -> u64 {
        self.noun_totals.get(n.index()).copied().unwrap_or(0)
    }

    pub fn verb_total(&self, v: VerbId) -> u64 {
        self.verb_totals.get(v.index()).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.noun_totals.iter().sum()
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn noun_str(&self, n: NounId) -> &str {
        self.nouns.resolve(n.0).unwrap_or("<unknown>")
    }

    pub fn verb_str(&self, v: VerbId) -> &str {
        self.verbs.resolve(v.0).unwrap_or("<unknown>")
    }

    /// Nouns with at least one token, in id order.
    pub fn active_nouns(&self) -> Vec<NounId> {
        (0..self.nouns.len() as u32)
            .map(NounId)
            .filter(|&n| self.noun_total(n) > 0)
            .collect()
    }

    pub fn to_file(&self) -> CountsFile {
        CountsFile {
            format: COUNTS_FORMAT.to_owned(),
            version: COUNTS_VERSION,
            nouns: self.nouns.strings().to_vec(),
            verbs: self.verbs.strings().to_vec(),
            entries: self.entries().map(|(n, v, c)| (n.0, v.0, c)).collect(),
        }
    }

    pub fn from_file(file: CountsFile) -> Result<Self> {
        if file.format != COUNTS_FORMAT {
            return Err(Error::Format(format!("unexpected format tag {:?}", file.format)));
        }
        if file.version != COUNTS_VERSION {
            return Err(Error::Format(format!("unsupported version {}", file.version)));
        }
        let nouns = Interner::from_strings(file.nouns)
            .ok_or_else(|| Error::Format("duplicate noun string".into()))?;
        let verbs = Interner::from_strings(file.verbs)
            .ok_or_else(|| Error::Format("duplicate verb string".into()))?;
        let mut out = Self {
            noun_totals: vec![0; nouns.len()],
            verb_totals: vec![0; verbs.len()],
            nouns,
            verbs,
            entries: BTreeMap::new(),
        };
        for (n, v, c) in file.entries {
            if n as usize >= out.nouns.len() || v as usize >= out.verbs.len() {
                return Err(Error::Format(format!("entry ({n}, {v}) out of range")));
            }
            if c == 0 {
                return Err(Error::Format(format!("zero count stored for ({n}, {v})")));
            }
            if out.entries.contains_key(&(NounId(n), VerbId(v))) {
                return Err(Error::Format(format!("duplicate entry ({n}, {v})")));
            }
            out.add_ids(NounId(n), VerbId(v), c);
        }
        Ok(out)
    }
}

pub const COUNTS_FORMAT: &str = "divsim-counts";
pub const COUNTS_VERSION: u32 = 1;

/// On-disk form of [`PairCounts`]: string tables indexed by id plus
/// `[noun_id, verb_id, count]` triples in ascending id order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsFile {
    pub format: String,
    pub version: u32,
    pub nouns: Vec<String>,
    pub verbs: Vec<String>,
    pub entries: Vec<(u32, u32, u64)>,
}

/// Reads `noun<TAB>verb[<TAB>count]` lines, aggregating duplicates.
pub fn ingest_pairs<R: BufRead>(reader: R) -> Result<PairCounts> {
    let mut counts = PairCounts::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let (noun, verb, count) = match fields.as_slice() {
            [noun, verb] => (*noun, *verb, 1),
            [noun, verb, count] => {
                let count: i64 = count.trim().parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("count {count:?} is not an integer"),
                })?;
                if count < 0 {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("negative count {count}"),
                    });
                }
                (*noun, *verb, count as u64)
            }
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected 2 or 3 tab-separated fields, found {}", fields.len()),
                })
            }
        };
        if noun.is_empty() || verb.is_empty() {
            return Err(Error::Parse {
                line: lineno,
                message: "empty noun or verb field".into(),
            });
        }
        counts.add(noun, verb, count);
    }
    Ok(counts)
}

pub fn ingest_str(text: &str) -> Result<PairCounts> {
    ingest_pairs(text.as_bytes())
}

/// Keeps only the pairs of the `f` most frequent nouns; ties go to the
/// lexicographically smaller noun string.
pub fn select_top_nouns(counts: &PairCounts, f: usize) -> Result<PairCounts> {
    if f == 0 {
        return Err(Error::Precondition("noun cutoff must be at least 1".into()));
    }
    let mut nouns = counts.active_nouns();
    nouns.sort_by(|&a, &b| {
        counts
            .noun_total(b)
            .cmp(&counts.noun_total(a))
            .then_with(|| counts.noun_str(a).cmp(counts.noun_str(b)))
    });
    nouns.truncate(f);
    let mut keep = vec![false; counts.nouns.len()];
    for n in nouns {
        keep[n.index()] = true;
    }
    let mut out = counts.empty_like();
    for (n, v, c) in counts.entries() {
        if keep[n.index()] {
            out.add_ids(n, v, c);
        }
    }
    Ok(out)
}

/// Assigns every count unit to the training side independently with
/// probability `train_fraction`.
///
/// Randomness comes from ChaCha8 (`rand_chacha`) seeded through
/// `SeedableRng::seed_from_u64`, consuming one Bernoulli draw per token
/// while walking entries in ascending `(noun, verb)` id order.
pub fn split_corpus(
    counts: &PairCounts,
    train_fraction: f64,
    seed: u64,
) -> Result<(PairCounts, PairCounts)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Precondition(format!(
            "train fraction {train_fraction} must lie strictly between 0 and 1"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = counts.empty_like();
    let mut heldout = counts.empty_like();
    for (n, v, c) in counts.entries() {
        let mut to_train = 0;
        for _ in 0..c {
            if rng.random_bool(train_fraction) {
                to_train += 1;
            }
        }
        train.add_ids(n, v, to_train);
        heldout.add_ids(n, v, c - to_train);
    }
    Ok((train, heldout))
}

/// Unsmoothed relative-frequency base language model.
///
/// Immutable once built. `conditional(n)` is `P(V|n)`, `verb_unigram` is
/// `P(v)` and `noun_marginal` is `P(n)`, all from the training counts.
#[derive(Debug, Clone)]
pub struct CorpusModel {
    counts: PairCounts,
    conditionals: Vec<Option<SparseDistribution>>,
    verb_unigram: Vec<f64>,
    noun_marginal: Vec<f64>,
    noun_set: Vec<NounId>,
    verb_vocab_size: usize,
}

pub fn build_model(train: PairCounts) -> Result<CorpusModel> {
    if train.is_empty() {
        return Err(Error::Precondition("training set is empty".into()));
    }
    let total = train.total() as f64;
    let mut rows: Vec<Vec<(VerbId, u64)>> = vec![Vec::new(); train.nouns.len()];
    for (n, v, c) in train.entries() {
        rows[n.index()].push((v, c));
    }
    let conditionals = rows
        .into_iter()
        .map(|row| {
            if row.is_empty() {
                Ok(None)
            } else {
                SparseDistribution::from_counts(row).map(Some)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let verb_unigram: Vec<f64> = train.verb_totals.iter().map(|&c| c as f64 / total).collect();
    let noun_marginal: Vec<f64> = train.noun_totals.iter().map(|&c| c as f64 / total).collect();
    let noun_set = train.active_nouns();
    let verb_vocab_size = train.verb_totals.iter().filter(|&&c| c > 0).count();
    Ok(CorpusModel {
        counts: train,
        conditionals,
        verb_unigram,
        noun_marginal,
        noun_set,
        verb_vocab_size,
    })
}

impl CorpusModel {
    pub fn counts(&self) -> &PairCounts {
        &self.counts
    }

    /// `P(V|n)`; `None` for nouns without training tokens.
    pub fn conditional(&self, n: NounId) -> Option<&SparseDistribution> {
        self.conditionals.get(n.index()).and_then(Option::as_ref)
    }

    /// `P(v|n)`, zero for unseen pairs and unknown nouns.
    pub fn cond_prob(&self, n: NounId, v: VerbId) -> f64 {
        self.conditional(n).map_or(0.0, |d| d.prob(v))
    }

    /// `P(v)` indexed by verb id.
    pub fn verb_unigram(&self) -> &[f64] {
        &self.verb_unigram
    }

    pub fn unigram(&self, v: VerbId) -> f64 {
        self.verb_unigram.get(v.index()).copied().unwrap_or(0.0)
    }

    pub fn noun_marginal(&self, n: NounId) -> f64 {
        self.noun_marginal.get(n.index()).copied().unwrap_or(0.0)
    }

    /// Nouns with at least one training token, ascending id.
    pub fn noun_set(&self) -> &[NounId] {
        &self.noun_set
    }

    pub fn contains_noun(&self, n: NounId) -> bool {
        self.noun_set.binary_search(&n).is_ok()
    }

    /// Number of verbs with positive training frequency.
    pub fn verb_vocab_size(&self) -> usize {
        self.verb_vocab_size
    }

    pub fn noun_id(&self, noun: &str) -> Option<NounId> {
        self.counts.nouns.get(noun).map(NounId).filter(|&n| self.contains_noun(n))
    }

    pub fn verb_id(&self, verb: &str) -> Option<VerbId> {
        self.counts.verbs.get(verb).map(VerbId)
    }

    pub fn noun_str(&self, n: NounId) -> &str {
        self.counts.noun_str(n)
    }

    pub fn verb_str(&self, v: VerbId) -> &str {
        self.counts.verb_str(v)
    }

    /// All interned verb ids with positive training frequency.
    pub fn training_verbs(&self) -> impl Iterator<Item = VerbId> + '_ {
        (0..self.verb_unigram.len() as u32)
            .map(VerbId)
            .filter(|&v| self.counts.verb_total(v) > 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregates_duplicates() {
        let c = ingest_str("make\tcoffee\nmake\tcoffee\ndrink\tcoffee\n").unwrap();
        assert_eq!(c.count_str("make", "coffee"), 2);
        assert_eq!(c.count_str("drink", "coffee"), 1);
        assert_eq!(c.num_entries(), 2);
        assert_eq!(c.nouns().strings(), &["make".to_string(), "drink".to_string()]);
    }

    #[test]
    fn empty_stream() {
        let c = ingest_str("").unwrap();
        assert!(c.is_empty());
        assert_eq!(c, PairCounts::new());
    }

    #[test]
    fn explicit_counts_and_blank_lines() {
        let c = ingest_str("a\tx\t3\n\n\r\na\tx\na\ty\t0\n").unwrap();
        assert_eq!(c.count_str("a", "x"), 4);
        assert_eq!(c.count_str("a", "y"), 0);
        assert_eq!(c.num_entries(), 1);
    }

    #[test]
    fn malformed_lines_report_line_number() {
        match ingest_str("a\tb\nmake coffee tea extra\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match ingest_str("a\tb\tc\td\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(ingest_str("a\tb\tx\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(ingest_str("a\tb\n\na\tb\t-2\n"), Err(Error::Parse { line: 3, .. })));
    }

    fn totals(spec: &[(&str, u64)]) -> PairCounts {
        let mut c = PairCounts::new();
        for (n, t) in spec {
            c.add(n, "v", *t);
        }
        c
    }

    fn kept(c: &PairCounts) -> Vec<&str> {
        let mut v: Vec<&str> = c.active_nouns().into_iter().map(|n| c.noun_str(n)).collect();
        v.sort();
        v
    }

    #[test]
    fn top_nouns() {
        let c = totals(&[("a", 5), ("b", 3), ("c", 1)]);
        assert_eq!(kept(&select_top_nouns(&c, 2).unwrap()), vec!["a", "b"]);
        assert_eq!(kept(&select_top_nouns(&c, 10).unwrap()), vec!["a", "b", "c"]);
        assert!(select_top_nouns(&c, 0).is_err());
    }

    #[test]
    fn top_nouns_tie_is_lexicographic() {
        let c = totals(&[("b", 5), ("a", 5), ("c", 1)]);
        assert_eq!(kept(&select_top_nouns(&c, 1).unwrap()), vec!["a"]);
    }

    #[test]
    fn split_is_reproducible_partition() {
        let c = ingest_str("n\tv\t10\n").unwrap();
        let (t1, h1) = split_corpus(&c, 0.8, 42).unwrap();
        let (t2, h2) = split_corpus(&c, 0.8, 42).unwrap();
        assert_eq!(t1, t2);
        assert_eq!(h1, h2);
        assert_eq!(t1.total() + h1.total(), 10);
        assert!(split_corpus(&c, 1.0, 1).is_err());
        assert!(split_corpus(&c, 0.0, 1).is_err());
    }

    #[test]
    fn model_relative_frequencies() {
        let m = build_model(ingest_str("n1\ta\t3\nn1\tb\t1\n").unwrap()).unwrap();
        let n1 = m.noun_id("n1").unwrap();
        let q = m.conditional(n1).unwrap();
        assert_eq!(q.prob(m.verb_id("a").unwrap()), 0.75);
        assert_eq!(q.prob(m.verb_id("b").unwrap()), 0.25);
    }

    #[test]
    fn model_uniform_marginals() {
        let m = build_model(ingest_str("n1\ta\nn2\tb\n").unwrap()).unwrap();
        for v in ["a", "b"] {
            assert_eq!(m.unigram(m.verb_id(v).unwrap()), 0.5);
        }
        for n in ["n1", "n2"] {
            assert_eq!(m.noun_marginal(m.noun_id(n).unwrap()), 0.5);
        }
        assert_eq!(m.verb_vocab_size(), 2);
    }

    #[test]
    fn model_degenerate_single_pair() {
        let m = build_model(ingest_str("n1\ta\n").unwrap()).unwrap();
        let a = m.verb_id("a").unwrap();
        assert_eq!(m.conditional(m.noun_id("n1").unwrap()).unwrap().prob(a), 1.0);
        assert_eq!(m.unigram(a), 1.0);
    }

    #[test]
    fn model_rejects_empty() {
        assert!(build_model(PairCounts::new()).is_err());
    }

    #[test]
    fn filtered_nouns_leave_noun_set() {
        let c = ingest_str("a\tx\t5\nb\tx\t1\n").unwrap();
        let m = build_model(select_top_nouns(&c, 1).unwrap()).unwrap();
        assert_eq!(m.noun_set().len(), 1);
        assert!(m.noun_id("b").is_none());
    }

    #[test]
    fn counts_file_round_trip() {
        let c = ingest_str("make\tcoffee\t2\ndrink\ttea\nmake\ttea\n").unwrap();
        let json = serde_json::to_string(&c.to_file()).unwrap();
        let back = PairCounts::from_file(serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
