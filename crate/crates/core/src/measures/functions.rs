//! Definitional forms of the distributional similarity functions.
//!
//! Every binary function takes the target distribution `q` first and the
//! candidate `r` second. Logarithms are natural; `0 ln 0` is taken as 0.

use crate::distribution::{merge_union, SparseDistribution};
use crate::error::{Error, Result};
use crate::vocab::VerbId;

/// Euclidean distance.
pub fn l2(q: &SparseDistribution, r: &SparseDistribution) -> f64 {
    merge_union(q, r)
        .map(|a| (a.q - a.r) * (a.q - a.r))
        .sum::<f64>()
        .sqrt()
}

/// L1 norm of the difference.
pub fn l1(q: &SparseDistribution, r: &SparseDistribution) -> f64 {
    merge_union(q, r).map(|a| (a.q - a.r).abs()).sum()
}

pub fn cosine(q: &SparseDistribution, r: &SparseDistribution) -> f64 {
    let mut dot = 0.0;
    let mut qq = 0.0;
    let mut rr = 0.0;
    for a in merge_union(q, r) {
        dot += a.q * a.r;
        qq += a.q * a.q;
        rr += a.r * a.r;
    }
    // Nonempty supports keep both norms positive.
    dot / (qq.sqrt() * rr.sqrt())
}

/// Size of the support intersection over the size of the support union.
pub fn jaccard(q: &SparseDistribution, r: &SparseDistribution) -> f64 {
    let mut inter = 0usize;
    let mut union = 0usize;
    for a in merge_union(q, r) {
        union += 1;
        if a.q > 0.0 && a.r > 0.0 {
            inter += 1;
        }
    }
    inter as f64 / union as f64
}

/// `D(p1 || p2) = sum_v p1(v) ln(p1(v) / p2(v))`.
///
/// Fails with [`Error::KlUndefined`] unless the support of `p1` is contained
/// in the support of `p2`.
pub fn kl(p1: &SparseDistribution, p2: &SparseDistribution) -> Result<f64> {
    let mut sum = 0.0;
    for a in merge_union(p1, p2) {
        if a.q > 0.0 {
            if a.r == 0.0 {
                return Err(Error::KlUndefined { verb: a.verb.0 });
            }
            sum += a.q * (a.q / a.r).ln();
        }
    }
    Ok(sum.max(0.0))
}

/// Total divergence to the average, `(D(q||avg) + D(r||avg)) / 2`.
pub fn jensen_shannon(q: &SparseDistribution, r: &SparseDistribution) -> f64 {
    let mut to_q = 0.0;
    let mut to_r = 0.0;
    for a in merge_union(q, r) {
        let avg = 0.5 * (a.q + a.r);
        if a.q > 0.0 {
            to_q += a.q * (a.q / avg).ln();
        }
        if a.r > 0.0 {
            to_r += a.r * (a.r / avg).ln();
        }
    }
    (0.5 * (to_q + to_r)).max(0.0)
}

/// Confusion probability `P(m) * sum_v q(v) r(v) / P(v)`, where `unigram` is
/// indexed by verb id and `p_m` is the candidate noun's marginal.
pub fn confusion(
    q: &SparseDistribution,
    r: &SparseDistribution,
    p_m: f64,
    unigram: &[f64],
) -> Result<f64> {
    let mut sum = 0.0;
    for a in merge_union(q, r) {
        if a.q > 0.0 && a.r > 0.0 {
            let pv = unigram.get(a.verb.index()).copied().unwrap_or(0.0);
            if pv <= 0.0 {
                return Err(Error::Internal(format!(
                    "verb {} has conditional mass but zero unigram probability",
                    a.verb
                )));
            }
            sum += a.q * a.r / pv;
        }
    }
    Ok(p_m * sum)
}

/// Skew divergence `s_alpha(q, r) = D(r || alpha q + (1 - alpha) r)`.
///
/// Always defined for `alpha < 1`; at `alpha = 1` it is `D(r || q)` and
/// fails when `r` has mass outside the support of `q`.
pub fn skew(q: &SparseDistribution, r: &SparseDistribution, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let mut sum = 0.0;
    for a in merge_union(q, r) {
        if a.r > 0.0 {
            let mix = alpha * a.q + (1.0 - alpha) * a.r;
            if mix == 0.0 {
                return Err(Error::KlUndefined { verb: a.verb.0 });
            }
            sum += a.r * (a.r / mix).ln();
        }
    }
    Ok(sum.max(0.0))
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("alpha {alpha} outside [0, 1]")))
    }
}

/// Convenience for tests and callers holding plain `(id, prob)` slices.
pub fn dist(pairs: &[(u32, f64)]) -> Result<SparseDistribution> {
    SparseDistribution::from_pairs(pairs.iter().map(|&(v, p)| (VerbId(v), p)))
}
