//! Sparse probability distributions over verb ids.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::vocab::VerbId;

/// Tolerance on the total mass of a distribution.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A probability distribution stored as a strictly increasing list of verb ids
/// with parallel strictly positive probabilities summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseDistribution {
    support: Vec<VerbId>,
    probs: Vec<f64>,
}

impl SparseDistribution {
    pub fn new(support: Vec<VerbId>, probs: Vec<f64>) -> Result<Self> {
        if support.len() != probs.len() {
            return Err(Error::Precondition(format!(
                "support has {} ids but {} probabilities",
                support.len(),
                probs.len()
            )));
        }
        if support.is_empty() {
            return Err(Error::Precondition("empty distribution".into()));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition(
                "support ids must be strictly increasing".into(),
            ));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::Precondition(format!(
                "probability {p} is not strictly positive"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Precondition(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { support, probs })
    }

    /// Builds from unsorted `(verb, probability)` pairs. Zero entries are
    /// dropped; duplicate ids are an error.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VerbId, f64)>,
    {
        let mut pairs: Vec<(VerbId, f64)> = pairs.into_iter().filter(|(_, p)| *p != 0.0).collect();
        pairs.sort_by_key(|(v, _)| *v);
        let (support, probs) = pairs.into_iter().unzip();
        Self::new(support, probs)
    }

    /// Relative frequencies `count / total`.
    pub fn from_counts<I>(counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VerbId, u64)>,
    {
        let counts: Vec<(VerbId, u64)> = counts.into_iter().filter(|(_, c)| *c > 0).collect();
        let total: u64 = counts.iter().map(|(_, c)| c).sum();
        if total == 0 {
            return Err(Error::Precondition("no positive counts".into()));
        }
        let total = total as f64;
        Self::from_pairs(counts.into_iter().map(|(v, c)| (v, c as f64 / total)))
    }

    /// Normalizes arbitrary nonnegative weights.
    pub fn from_weights<I>(weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VerbId, f64)>,
    {
        let weights: Vec<(VerbId, f64)> = weights.into_iter().filter(|(_, w)| *w > 0.0).collect();
        let total: f64 = weights.iter().map(|(_, w)| w).sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Precondition("weights have no positive mass".into()));
        }
        Self::from_pairs(weights.into_iter().map(|(v, w)| (v, w / total)))
    }

    pub fn support(&self) -> &[VerbId] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VerbId, f64)> + '_ {
        self.support.iter().copied().zip(self.probs.iter().copied())
    }

    /// Probability of `verb`, zero off the support.
    pub fn prob(&self, verb: VerbId) -> f64 {
        match self.support.binary_search(&verb) {
            Ok(i) => self.probs[i],
            Err(_) => 0.0,
        }
    }

    pub fn contains(&self, verb: VerbId) -> bool {
        self.support.binary_search(&verb).is_ok()
    }
}

/// One position of a merge-join over two supports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aligned {
    pub verb: VerbId,
    pub q: f64,
    pub r: f64,
}

/// Walks the union of both supports in increasing verb order, yielding the
/// value of each distribution (zero where absent).
pub fn merge_union<'a>(
    q: &'a SparseDistribution,
    r: &'a SparseDistribution,
) -> impl Iterator<Item = Aligned> + 'a {
    let mut i = 0;
    let mut j = 0;
    std::iter::from_fn(move || {
        let a = q.support.get(i);
        let b = r.support.get(j);
        match (a, b) {
            (None, None) => None,
            (Some(&v), None) => {
                i += 1;
                Some(Aligned { verb: v, q: q.probs[i - 1], r: 0.0 })
            }
            (None, Some(&v)) => {
                j += 1;
                Some(Aligned { verb: v, q: 0.0, r: r.probs[j - 1] })
            }
            (Some(&va), Some(&vb)) => match va.cmp(&vb) {
                Ordering::Less => {
                    i += 1;
                    Some(Aligned { verb: va, q: q.probs[i - 1], r: 0.0 })
                }
                Ordering::Greater => {
                    j += 1;
                    Some(Aligned { verb: vb, q: 0.0, r: r.probs[j - 1] })
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    Some(Aligned { verb: va, q: q.probs[i - 1], r: r.probs[j - 1] })
                }
            },
        }
    })
}
