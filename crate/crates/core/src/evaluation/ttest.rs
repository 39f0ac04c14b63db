use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Two-sided paired t-test result. `degenerate` marks zero-variance
/// differences with a nonzero mean, where `t` is infinite and `p` is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    #[serde(with = "nonfinite")]
    pub t: f64,
    pub p: f64,
    pub df: u32,
    pub degenerate: bool,
}

/// Paired t-test on `a[i] - b[i]`: `t = mean / (sd / sqrt(n))`, `df = n - 1`,
/// `p = 2 P(T_df > |t|)`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::Precondition(format!(
            "paired samples differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::Precondition(format!("need at least 2 pairs, got {n}")));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let df = (n - 1) as u32;
    if var == 0.0 {
        return Ok(if mean == 0.0 {
            TTest { t: 0.0, p: 1.0, df, degenerate: false }
        } else {
            TTest {
                t: f64::INFINITY.copysign(mean),
                p: 0.0,
                df,
                degenerate: true,
            }
        });
    }
    let t = mean / (var.sqrt() / (n as f64).sqrt());
    Ok(TTest { t, p: two_sided_p(t, df)?, df, degenerate: false })
}

/// `2 P(T_df > |t|)` under Student's t.
pub fn two_sided_p(t: f64, df: u32) -> Result<f64> {
    let dist = StudentsT::new(0.0, 1.0, df as f64)
        .map_err(|e| Error::Precondition(format!("t distribution: {e}")))?;
    Ok((2.0 * dist.sf(t.abs())).min(1.0))
}

/// Serializes infinite values as the strings `"inf"` / `"-inf"`, which JSON
/// numbers cannot represent.
pub(crate) mod nonfinite {
    use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else if *v < 0.0 {
            s.serialize_str("-inf")
        } else {
            s.serialize_str("nan")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(de::Error::custom(format!("bad number {other:?}"))),
            },
        }
    }
}
