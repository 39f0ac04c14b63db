//! Distributional similarity and dissimilarity functions.

pub mod functions;
pub mod kendall;
pub mod support;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distribution::SparseDistribution;
use crate::error::{Error, Result};

pub use functions::{confusion, cosine, jaccard, jensen_shannon, kl, l1, l2, skew};
pub use kendall::{kendall_tau, kendall_tau_ratio, TauRatio};
pub use support::{evaluate_support_form, SupportProfile};

pub const DEFAULT_ALPHA: f64 = 0.99;
pub const DEFAULT_BETA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    L1,
    L2,
    Cosine,
    Jaccard,
    JensenShannon,
    Kl,
    Confusion,
    KendallTau,
    Skew,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Similarity,
    Dissimilarity,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 9] = [
        MeasureKind::L1,
        MeasureKind::L2,
        MeasureKind::Cosine,
        MeasureKind::Jaccard,
        MeasureKind::JensenShannon,
        MeasureKind::Kl,
        MeasureKind::Confusion,
        MeasureKind::KendallTau,
        MeasureKind::Skew,
    ];

    /// Stable lowercase identifier used on the command line and in reports.
    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::L1 => "l1",
            MeasureKind::L2 => "l2",
            MeasureKind::Cosine => "cosine",
            MeasureKind::Jaccard => "jaccard",
            MeasureKind::JensenShannon => "js",
            MeasureKind::Kl => "kl",
            MeasureKind::Confusion => "confusion",
            MeasureKind::KendallTau => "tau",
            MeasureKind::Skew => "skew",
        }
    }

    pub fn orientation(self) -> Orientation {
        match self {
            MeasureKind::Cosine
            | MeasureKind::Jaccard
            | MeasureKind::Confusion
            | MeasureKind::KendallTau => Orientation::Similarity,
            _ => Orientation::Dissimilarity,
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeasureKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownMeasure(s.to_owned()))
    }
}

/// A measure plus its parameters. `alpha` only affects [`MeasureKind::Skew`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub kind: MeasureKind,
    pub alpha: f64,
}

impl MeasureSpec {
    pub fn new(kind: MeasureKind) -> Self {
        Self {
            kind,
            alpha: DEFAULT_ALPHA,
        }
    }

    pub fn skew(alpha: f64) -> Result<Self> {
        functions::check_alpha(alpha)?;
        Ok(Self {
            kind: MeasureKind::Skew,
            alpha,
        })
    }

    pub fn with_alpha(kind: MeasureKind, alpha: f64) -> Result<Self> {
        functions::check_alpha(alpha)?;
        Ok(Self { kind, alpha })
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn orientation(&self) -> Orientation {
        self.kind.orientation()
    }

    /// True when `a` ranks strictly better than `b` under this measure.
    pub fn better(&self, a: f64, b: f64) -> bool {
        match self.orientation() {
            Orientation::Similarity => a > b,
            Orientation::Dissimilarity => a < b,
        }
    }

    /// Evaluates the definitional form with `q` as the target distribution
    /// and `r` as the candidate.
    pub fn evaluate(
        &self,
        q: &SparseDistribution,
        r: &SparseDistribution,
        ctx: &MeasureContext<'_>,
    ) -> Result<f64> {
        match self.kind {
            MeasureKind::L1 => Ok(l1(q, r)),
            MeasureKind::L2 => Ok(l2(q, r)),
            MeasureKind::Cosine => Ok(cosine(q, r)),
            MeasureKind::Jaccard => Ok(jaccard(q, r)),
            MeasureKind::JensenShannon => Ok(jensen_shannon(q, r)),
            MeasureKind::Kl => kl(q, r),
            MeasureKind::Confusion => confusion(q, r, ctx.candidate_prior, ctx.verb_unigram),
            MeasureKind::KendallTau => kendall_tau(q, r, ctx.verb_vocab_size),
            MeasureKind::Skew => skew(q, r, self.alpha),
        }
    }
}

/// Model-derived inputs some measures need beyond the two distributions.
#[derive(Debug, Clone, Copy)]
pub struct MeasureContext<'a> {
    /// `P(v)` indexed by verb id (confusion probability).
    pub verb_unigram: &'a [f64],
    /// `P(m)` of the candidate noun (confusion probability).
    pub candidate_prior: f64,
    /// `|V|` (Kendall's tau).
    pub verb_vocab_size: usize,
}

impl MeasureContext<'static> {
    /// Context without unigram information, for measures that need only `|V|`.
    pub fn standalone(verb_vocab_size: usize) -> Self {
        Self {
            verb_unigram: &[],
            candidate_prior: 0.0,
            verb_vocab_size,
        }
    }
}

/// Maps a measure value to a nonnegative weight for distance-weighted
/// averaging.
///
/// Cosine, Jaccard and confusion pass through; tau maps to `(tau + 1) / 2`
/// so that -1 gives weight 0; dissimilarities `d` map to `exp(-beta d)`.
pub fn to_similarity_weight(spec: &MeasureSpec, value: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Precondition(format!("beta {beta} must be positive")));
    }
    let w = match spec.kind {
        MeasureKind::Cosine | MeasureKind::Jaccard | MeasureKind::Confusion => value,
        MeasureKind::KendallTau => (value + 1.0) / 2.0,
        _ => (-beta * value).exp(),
    };
    if w.is_nan() || w < 0.0 {
        return Err(Error::Internal(format!(
            "negative weight {w} from {} value {value}",
            spec.name()
        )));
    }
    Ok(w)
}

/// Parses a comma-separated list of measure names, applying `alpha` to skew.
pub fn parse_measure_list(list: &str, alpha: f64) -> Result<Vec<MeasureSpec>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| MeasureSpec::with_alpha(s.parse()?, alpha))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in MeasureKind::ALL {
            assert_eq!(k.name().parse::<MeasureKind>().unwrap(), k);
        }
        assert!(matches!("dice".parse::<MeasureKind>(), Err(Error::UnknownMeasure(_))));
    }

    #[test]
    fn orientations() {
        use MeasureKind::*;
        for k in [Cosine, Jaccard, Confusion, KendallTau] {
            assert_eq!(k.orientation(), Orientation::Similarity);
        }
        for k in [L1, L2, JensenShannon, Kl, Skew] {
            assert_eq!(k.orientation(), Orientation::Dissimilarity);
        }
    }

    #[test]
    fn weights() {
        let skew = MeasureSpec::skew(0.99).unwrap();
        assert_eq!(to_similarity_weight(&skew, 0.0, 3.0).unwrap(), 1.0);
        let tau = MeasureSpec::new(MeasureKind::KendallTau);
        assert_eq!(to_similarity_weight(&tau, -1.0, 1.0).unwrap(), 0.0);
        let l1 = MeasureSpec::new(MeasureKind::L1);
        let w = to_similarity_weight(&l1, 0.5, 2.0).unwrap();
        assert!((w - 0.367_879_441_171_442_3).abs() < 1e-15);
        let cos = MeasureSpec::new(MeasureKind::Cosine);
        assert_eq!(to_similarity_weight(&cos, 0.25, 1.0).unwrap(), 0.25);
        assert!(to_similarity_weight(&cos, -0.25, 1.0).is_err());
        assert!(to_similarity_weight(&l1, 0.5, 0.0).is_err());
        assert_eq!(to_similarity_weight(&l1, f64::INFINITY, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn measure_lists() {
        let specs = parse_measure_list("l1, js,skew", 0.5).unwrap();
        assert_eq!(specs.len(), 3);
        assert_eq!(specs[2].alpha, 0.5);
        assert!(parse_measure_list("l1,bogus", 0.99).is_err());
        assert!(parse_measure_list("skew", 1.5).is_err());
    }
}
