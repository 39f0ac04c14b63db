//! The measures rewritten as sums over the support sets `V_q`, `V_r` and
//! `V_qr = V_q ∩ V_r`.
//!
//! These forms are an independent evaluation route: each iterates only over
//! the sets it names and looks distribution values up by id, so agreement
//! with the merge-join definitions in [`super::functions`] is a meaningful
//! cross-check.

use std::f64::consts::LN_2;

use crate::distribution::SparseDistribution;
use crate::error::{Error, Result};
use crate::vocab::VerbId;

use super::{MeasureContext, MeasureKind, MeasureSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportProfile {
    pub v_q: Vec<VerbId>,
    pub v_r: Vec<VerbId>,
    pub v_qr: Vec<VerbId>,
}

impl SupportProfile {
    pub fn new(q: &SparseDistribution, r: &SparseDistribution) -> Self {
        let v_q = q.support().to_vec();
        let v_r = r.support().to_vec();
        let v_qr = v_q.iter().copied().filter(|v| r.contains(*v)).collect();
        Self { v_q, v_r, v_qr }
    }

    /// `|V_q ∪ V_r|` by inclusion-exclusion.
    pub fn union_len(&self) -> usize {
        self.v_q.len() + self.v_r.len() - self.v_qr.len()
    }
}

fn entropy_term(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.ln()
    } else {
        0.0
    }
}

fn sum_sq(d: &SparseDistribution, set: &[VerbId]) -> f64 {
    set.iter().map(|&v| d.prob(v).powi(2)).sum()
}

fn dot_on(q: &SparseDistribution, r: &SparseDistribution, set: &[VerbId]) -> f64 {
    set.iter().map(|&v| q.prob(v) * r.prob(v)).sum()
}

/// Evaluates `spec` on `(q, r)` through its support-set rewrite.
///
/// Supported kinds are L1, L2, cosine, Jaccard, Jensen-Shannon and
/// confusion. L1 uses `2 + sum_{V_qr} (|q - r| - q - r)`; JS uses
/// `ln 2 + 1/2 sum_{V_qr} (h(q + r) - h(q) - h(r))` with `h(x) = -x ln x`.
pub fn evaluate_support_form(
    spec: &MeasureSpec,
    q: &SparseDistribution,
    r: &SparseDistribution,
    ctx: &MeasureContext<'_>,
) -> Result<f64> {
    let s = SupportProfile::new(q, r);
    match spec.kind {
        MeasureKind::L2 => {
            let sq = sum_sq(q, &s.v_q) - 2.0 * dot_on(q, r, &s.v_qr) + sum_sq(r, &s.v_r);
            Ok(sq.max(0.0).sqrt())
        }
        MeasureKind::L1 => Ok(2.0
            + s.v_qr
                .iter()
                .map(|&v| {
                    let (a, b) = (q.prob(v), r.prob(v));
                    (a - b).abs() - a - b
                })
                .sum::<f64>()),
        MeasureKind::Cosine => {
            Ok(dot_on(q, r, &s.v_qr) / (sum_sq(q, &s.v_q) * sum_sq(r, &s.v_r)).sqrt())
        }
        MeasureKind::Jaccard => Ok(s.v_qr.len() as f64 / s.union_len() as f64),
        MeasureKind::JensenShannon => Ok(LN_2
            + 0.5
                * s.v_qr
                    .iter()
                    .map(|&v| {
                        let (a, b) = (q.prob(v), r.prob(v));
                        entropy_term(a + b) - entropy_term(a) - entropy_term(b)
                    })
                    .sum::<f64>()),
        MeasureKind::Confusion => {
            let mut sum = 0.0;
            for &v in &s.v_qr {
                let pv = ctx.verb_unigram.get(v.index()).copied().unwrap_or(0.0);
                if pv <= 0.0 {
                    return Err(Error::Internal(format!("zero unigram probability for {v}")));
                }
                sum += q.prob(v) * r.prob(v) / pv;
            }
            Ok(ctx.candidate_prior * sum)
        }
        other => Err(Error::Precondition(format!(
            "no support-set form for measure {}",
            other.name()
        ))),
    }
}
