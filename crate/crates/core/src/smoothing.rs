//! Nearest-neighbor rankings, decision evidence and distance-weighted
//! averaging estimates.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::corpus::CorpusModel;
use crate::error::{Error, Result};
use crate::measures::{to_similarity_weight, MeasureContext, MeasureSpec, Orientation};
use crate::vocab::{NounId, VerbId};

/// Candidate nouns ordered best-first under one measure.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborRanking {
    pub target: NounId,
    pub measure: MeasureSpec,
    /// `(noun, raw measure value)`, best first, ties by ascending noun id.
    pub entries: Vec<(NounId, f64)>,
}

impl NeighborRanking {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nouns(&self) -> impl Iterator<Item = NounId> + '_ {
        self.entries.iter().map(|(n, _)| *n)
    }
}

/// Scores every noun in the model (the target included) against `n`.
///
/// KL values that are undefined because of an absolute-continuity violation
/// are recorded as `+inf`, placing those candidates after every finite one.
pub fn rank_neighbors(model: &CorpusModel, spec: &MeasureSpec, n: NounId) -> Result<NeighborRanking> {
    let q = model
        .conditional(n)
        .ok_or_else(|| Error::UnknownNoun(n.to_string()))?;
    let mut entries = Vec::with_capacity(model.noun_set().len());
    for &m in model.noun_set() {
        let r = model
            .conditional(m)
            .ok_or_else(|| Error::Internal(format!("noun {m} has no distribution")))?;
        let ctx = MeasureContext {
            verb_unigram: model.verb_unigram(),
            candidate_prior: model.noun_marginal(m),
            verb_vocab_size: model.verb_vocab_size(),
        };
        let value = match spec.evaluate(q, r, &ctx) {
            Ok(v) => v,
            Err(Error::KlUndefined { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        entries.push((m, value));
    }
    let orientation = spec.orientation();
    entries.sort_by(|a, b| compare_values(orientation, a.1, b.1).then(a.0.cmp(&b.0)));
    Ok(NeighborRanking {
        target: n,
        measure: *spec,
        entries,
    })
}

fn compare_values(orientation: Orientation, a: f64, b: f64) -> Ordering {
    match orientation {
        Orientation::Dissimilarity => a.total_cmp(&b),
        Orientation::Similarity => b.total_cmp(&a),
    }
}

/// The `k` best-ranked nouns.
pub fn top_k(ranking: &NeighborRanking, k: usize) -> Result<Vec<NounId>> {
    if k == 0 || k > ranking.len() {
        return Err(Error::Precondition(format!(
            "k = {k} outside [1, {}]",
            ranking.len()
        )));
    }
    Ok(ranking.entries[..k].iter().map(|(n, _)| *n).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub for_v1: u32,
    pub for_v2: u32,
    pub k: u32,
}

/// Counts neighbors with `P(v1|m) > P(v2|m)` and the reverse. Equal
/// probabilities (including both zero) count for neither side.
pub fn evidence(model: &CorpusModel, neighbors: &[NounId], v1: VerbId, v2: VerbId) -> Evidence {
    let mut e = Evidence {
        for_v1: 0,
        for_v2: 0,
        k: neighbors.len() as u32,
    };
    for &m in neighbors {
        let (p1, p2) = (model.cond_prob(m, v1), model.cond_prob(m, v2));
        match p1.partial_cmp(&p2) {
            Some(Ordering::Greater) => e.for_v1 += 1,
            Some(Ordering::Less) => e.for_v2 += 1,
            _ => {}
        }
    }
    e
}

/// Outcome of a binary decision between `v1` and `v2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Decision {
    V1,
    V2,
    Tie,
}

/// Picks the verb with the larger unigram probability.
pub fn unigram_baseline_decide(model: &CorpusModel, v1: VerbId, v2: VerbId) -> Decision {
    match model.unigram(v1).partial_cmp(&model.unigram(v2)) {
        Some(Ordering::Greater) => Decision::V1,
        Some(Ordering::Less) => Decision::V2,
        _ => Decision::Tie,
    }
}

/// Weighted neighborhood for distance-weighted averaging, target excluded.
#[derive(Debug, Clone)]
pub struct WeightedNeighbors {
    neighbors: Vec<(NounId, f64)>,
    total_weight: f64,
}

impl WeightedNeighbors {
    pub fn from_ranking(ranking: &NeighborRanking, k: usize, beta: f64) -> Result<Self> {
        let candidates: Vec<(NounId, f64)> = ranking
            .entries
            .iter()
            .copied()
            .filter(|(m, _)| *m != ranking.target)
            .collect();
        if k == 0 || k > candidates.len() {
            return Err(Error::Precondition(format!(
                "k = {k} outside [1, {}] for estimation",
                candidates.len()
            )));
        }
        let neighbors = candidates[..k]
            .iter()
            .map(|&(m, value)| Ok((m, to_similarity_weight(&ranking.measure, value, beta)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_weights(neighbors)
    }

    /// Explicit `(noun, weight)` pairs.
    pub fn from_weights(neighbors: Vec<(NounId, f64)>) -> Result<Self> {
        if let Some((m, w)) = neighbors.iter().find(|(_, w)| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Precondition(format!("invalid weight {w} for {m}")));
        }
        let total_weight: f64 = neighbors.iter().map(|(_, w)| w).sum();
        if total_weight <= 0.0 {
            return Err(Error::NoUsableNeighbors);
        }
        Ok(Self {
            neighbors,
            total_weight,
        })
    }

    pub fn neighbors(&self) -> &[(NounId, f64)] {
        &self.neighbors
    }

    /// `sum_m w(m) P(v|m) / sum_m w(m)`.
    pub fn estimate(&self, model: &CorpusModel, v: VerbId) -> f64 {
        let num: f64 = self
            .neighbors
            .iter()
            .map(|&(m, w)| w * model.cond_prob(m, v))
            .sum();
        (num / self.total_weight).clamp(0.0, 1.0)
    }
}

/// Distance-weighted averaging estimate of `P(v|n)` over the `k` nearest
/// neighbors of `n` (excluding `n`), weighted by [`to_similarity_weight`].
pub fn dwa_estimate(
    model: &CorpusModel,
    spec: &MeasureSpec,
    n: NounId,
    v: VerbId,
    k: usize,
    beta: f64,
) -> Result<f64> {
    let ranking = rank_neighbors(model, spec, n)?;
    let hood = WeightedNeighbors::from_ranking(&ranking, k, beta)?;
    Ok(hood.estimate(model, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_model, ingest_str};
    use crate::measures::MeasureKind;

    fn model(text: &str) -> CorpusModel {
        build_model(ingest_str(text).unwrap()).unwrap()
    }

    fn ids(m: &CorpusModel, names: &[&str]) -> Vec<NounId> {
        names.iter().map(|s| m.noun_id(s).unwrap()).collect()
    }

    #[test]
    fn l1_ranking_with_id_tie_break() {
        let m = model("n1\ta\nn2\ta\nn3\tb\n");
        let n1 = m.noun_id("n1").unwrap();
        let r = rank_neighbors(&m, &MeasureSpec::new(MeasureKind::L1), n1).unwrap();
        let want: Vec<(NounId, f64)> = ids(&m, &["n1", "n2", "n3"]).into_iter().zip([0.0, 0.0, 2.0]).collect();
        assert_eq!(r.entries, want);
    }

    #[test]
    fn similarity_ranking_is_descending() {
        let m = model("n1\ta\t3\nn1\tb\nn2\tb\nn3\ta\nn3\tb\n");
        let n1 = m.noun_id("n1").unwrap();
        let r = rank_neighbors(&m, &MeasureSpec::new(MeasureKind::Cosine), n1).unwrap();
        assert_eq!(r.entries[0].0, n1);
        assert!(r.entries.windows(2).all(|w| w[0].1 >= w[1].1));
    }

    #[test]
    fn kl_undefined_ranks_last() {
        let m = model("n1\ta\nn1\tb\nn2\ta\nn3\ta\nn3\tb\nn3\tc\n");
        let n1 = m.noun_id("n1").unwrap();
        let r = rank_neighbors(&m, &MeasureSpec::new(MeasureKind::Kl), n1).unwrap();
        assert_eq!(r.entries[0].0, n1);
        assert_eq!(r.entries[1].0, m.noun_id("n3").unwrap());
        assert_eq!(r.entries[2], (m.noun_id("n2").unwrap(), f64::INFINITY));
    }

    #[test]
    fn unknown_noun() {
        let m = model("n1\ta\n");
        assert!(rank_neighbors(&m, &MeasureSpec::new(MeasureKind::L1), NounId(9)).is_err());
    }

    #[test]
    fn top_k_bounds() {
        let m = model("n1\ta\nn2\ta\nn3\tb\n");
        let r = rank_neighbors(&m, &MeasureSpec::new(MeasureKind::L1), NounId(0)).unwrap();
        assert_eq!(top_k(&r, 1).unwrap(), vec![NounId(0)]);
        assert_eq!(top_k(&r, 3).unwrap().len(), 3);
        assert!(top_k(&r, 0).is_err());
        assert!(top_k(&r, 4).is_err());
    }

    #[test]
    fn evidence_counts() {
        // P(v1|.) = (0.2, 0, 0), P(v2|.) = (0.1, 0.3, 0)
        let m = model("m1\tv1\t2\nm1\tv2\t1\nm1\tx\t7\nm2\tv2\t3\nm2\tx\t7\nm3\tx\n");
        let s = ids(&m, &["m1", "m2", "m3"]);
        let (v1, v2) = (m.verb_id("v1").unwrap(), m.verb_id("v2").unwrap());
        assert_eq!(evidence(&m, &s, v1, v2), Evidence { for_v1: 1, for_v2: 1, k: 3 });
        assert_eq!(evidence(&m, &s[2..], v1, v2), Evidence { for_v1: 0, for_v2: 0, k: 1 });
        assert_eq!(evidence(&m, &s[..1], v1, v2), Evidence { for_v1: 1, for_v2: 0, k: 1 });
    }

    #[test]
    fn baseline() {
        let m = model("a\tv1\nb\tv2\nc\tv3\t2\n");
        let v = |s| m.verb_id(s).unwrap();
        assert_eq!(unigram_baseline_decide(&m, v("v1"), v("v2")), Decision::Tie);
        assert_eq!(unigram_baseline_decide(&m, v("v3"), v("v1")), Decision::V1);
        assert_eq!(unigram_baseline_decide(&m, v("v1"), v("v3")), Decision::V2);
    }

    #[test]
    fn weighted_average_fixtures() {
        // P(v|m1) = 0.2, P(v|m2) = 0.6, P(v|m3) = 0.4
        let m = model("m1\tv\nm1\tx\t4\nm2\tv\t3\nm2\tx\t2\nm3\tv\t2\nm3\tx\t3\n");
        let v = m.verb_id("v").unwrap();
        let [m1, m2, m3] = [0, 1, 2].map(NounId);
        let one = WeightedNeighbors::from_weights(vec![(m3, 1.0)]).unwrap();
        assert!((one.estimate(&m, v) - 0.4).abs() < 1e-15);
        let even = WeightedNeighbors::from_weights(vec![(m1, 1.0), (m2, 1.0)]).unwrap();
        assert!((even.estimate(&m, v) - 0.4).abs() < 1e-15);
        let skewed = WeightedNeighbors::from_weights(vec![(m1, 0.75), (m2, 0.25)]).unwrap();
        assert!((skewed.estimate(&m, v) - 0.3).abs() < 1e-15);
        assert!(matches!(
            WeightedNeighbors::from_weights(vec![(m1, 0.0)]),
            Err(Error::NoUsableNeighbors)
        ));
    }

    #[test]
    fn estimate_excludes_target() {
        let m = model("n1\ta\nn2\ta\t3\nn2\tb\nn3\tb\n");
        let n1 = m.noun_id("n1").unwrap();
        let a = m.verb_id("a").unwrap();
        let spec = MeasureSpec::new(MeasureKind::L1);
        // nearest other noun is n2 with P(a|n2) = 0.75
        let p = dwa_estimate(&m, &spec, n1, a, 1, 1.0).unwrap();
        assert!((p - 0.75).abs() < 1e-15);
        assert!(dwa_estimate(&m, &spec, n1, a, 3, 1.0).is_err());
    }

    #[test]
    fn all_zero_weights() {
        // tau = -1 between n1 and n2 gives weight 0
        let m = model("n1\ta\t3\nn1\tb\t2\nn2\ta\t2\nn2\tb\t3\n");
        let spec = MeasureSpec::new(MeasureKind::KendallTau);
        let a = m.verb_id("a").unwrap();
        assert!(matches!(
            dwa_estimate(&m, &spec, NounId(0), a, 1, 1.0),
            Err(Error::NoUsableNeighbors)
        ));
    }
}
