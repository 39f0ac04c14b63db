//! Kendall's tau_a over a finite verb vocabulary.
//!
//! Verbs outside both supports have value zero under both distributions.
//! A pair of two such verbs is tied and contributes nothing; a pair of one
//! outside verb and one union verb `v` contributes `sign(q(v) r(v))`, which
//! is 1 exactly when `v` lies in the support intersection. Only pairs inside
//! the support union need explicit counting, done here in `O(u log u)` with
//! Knight's merge-sort method.

use std::cmp::Ordering;

use crate::distribution::{merge_union, SparseDistribution};
use crate::error::{Error, Result};

/// Tau as an exact ratio over ordered verb pairs:
/// `numerator = sum_{v1 != v2} sign[(q(v1)-q(v2)) (r(v1)-r(v2))]` and
/// `denominator = |V| (|V| - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TauRatio {
    pub numerator: i64,
    pub denominator: i64,
}

impl TauRatio {
    pub fn value(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

pub fn kendall_tau(q: &SparseDistribution, r: &SparseDistribution, v_size: usize) -> Result<f64> {
    kendall_tau_ratio(q, r, v_size).map(TauRatio::value)
}

pub fn kendall_tau_ratio(
    q: &SparseDistribution,
    r: &SparseDistribution,
    v_size: usize,
) -> Result<TauRatio> {
    let mut points: Vec<(f64, f64)> = merge_union(q, r).map(|a| (a.q, a.r)).collect();
    let union = points.len();
    if v_size < 2 {
        return Err(Error::Precondition(format!("verb vocabulary size {v_size} < 2")));
    }
    if v_size < union {
        return Err(Error::Precondition(format!(
            "verb vocabulary size {v_size} is smaller than the support union ({union})"
        )));
    }
    let intersection = points.iter().filter(|(a, b)| *a > 0.0 && *b > 0.0).count() as i64;
    let outside = (v_size - union) as i64;
    let within = concordance_balance(&mut points);
    let n = v_size as i64;
    Ok(TauRatio {
        numerator: 2 * within + 2 * intersection * outside,
        denominator: n * (n - 1),
    })
}

/// Concordant minus discordant unordered pairs, ties counting zero.
fn concordance_balance(points: &mut [(f64, f64)]) -> i64 {
    let n = points.len() as i64;
    let total = n * (n - 1) / 2;
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let mut tied_first = 0i64;
    let mut tied_joint = 0i64;
    for group in points.chunk_by(|a, b| a.0 == b.0) {
        tied_first += pairs(group.len());
        for joint in group.chunk_by(|a, b| a.1 == b.1) {
            tied_joint += pairs(joint.len());
        }
    }

    let mut second: Vec<f64> = points.iter().map(|p| p.1).collect();
    let mut scratch = vec![0.0; second.len()];
    let swaps = merge_count(&mut second, &mut scratch);

    let tied_second: i64 = second.chunk_by(|a, b| a == b).map(|g| pairs(g.len())).sum();
    total - tied_first - tied_second + tied_joint - 2 * swaps
}

fn pairs(t: usize) -> i64 {
    let t = t as i64;
    t * (t - 1) / 2
}

/// Sorts ascending and returns the number of strict inversions.
fn merge_count(xs: &mut [f64], scratch: &mut [f64]) -> i64 {
    let len = xs.len();
    if len < 2 {
        return 0;
    }
    let mid = len / 2;
    let mut swaps = {
        let (left, right) = xs.split_at_mut(mid);
        let (sl, sr) = scratch.split_at_mut(mid);
        merge_count(left, sl) + merge_count(right, sr)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < len {
        if xs[j].total_cmp(&xs[i]) == Ordering::Less {
            scratch[k] = xs[j];
            swaps += (mid - i) as i64;
            j += 1;
        } else {
            scratch[k] = xs[i];
            i += 1;
        }
        k += 1;
    }
    scratch[k..k + (mid - i)].copy_from_slice(&xs[i..mid]);
    k += mid - i;
    scratch[k..k + (len - j)].copy_from_slice(&xs[j..len]);
    xs.copy_from_slice(&scratch[..len]);
    swaps
}
