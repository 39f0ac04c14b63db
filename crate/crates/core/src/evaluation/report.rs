use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifest::RunManifest;
use crate::measures::MeasureSpec;

use super::ttest::{nonfinite, paired_t_test};

pub const CSV_HEADER: &str = "measure,k,partition,error_rate,n_triples";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub measure: String,
    pub k: usize,
    pub partition: usize,
    pub error_rate: f64,
    pub n_triples: u64,
}

/// Mean and min/max error rate over partitions for one `(measure, k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeRow {
    pub measure: String,
    pub k: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRow {
    pub partition: usize,
    pub error_rate: f64,
    pub n_triples: u64,
}

/// Paired t-test of per-partition error rates, `a` minus `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TTestRow {
    pub a: String,
    pub b: String,
    pub k: usize,
    #[serde(with = "nonfinite")]
    pub t: f64,
    pub p: f64,
    pub df: u32,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub manifest: RunManifest,
    pub measures: Vec<MeasureSpec>,
    pub k_grid: Vec<usize>,
    pub rows: Vec<ReportRow>,
    pub ranges: Vec<RangeRow>,
    pub baseline: Vec<BaselineRow>,
    pub ttests: Vec<TTestRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Precondition(format!("unknown report format {other:?}"))),
        }
    }
}

impl EvaluationReport {
    /// Per-partition error rates of `measure` at `k`, in partition order.
    pub fn series(&self, measure: &str, k: usize) -> Vec<f64> {
        let mut rows: Vec<&ReportRow> = self
            .rows
            .iter()
            .filter(|r| r.measure == measure && r.k == k)
            .collect();
        rows.sort_by_key(|r| r.partition);
        rows.into_iter().map(|r| r.error_rate).collect()
    }

    pub fn mean_error(&self, measure: &str, k: usize) -> Option<f64> {
        self.ranges
            .iter()
            .find(|r| r.measure == measure && r.k == k)
            .map(|r| r.mean)
    }

    pub fn baseline_mean(&self) -> Option<f64> {
        if self.baseline.is_empty() {
            return None;
        }
        Some(self.baseline.iter().map(|b| b.error_rate).sum::<f64>() / self.baseline.len() as f64)
    }

    pub fn measure_names(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for r in &self.rows {
            if !seen.contains(&r.measure) {
                seen.push(r.measure.clone());
            }
        }
        seen
    }

    pub fn compute_ranges(&self) -> Vec<RangeRow> {
        let mut groups: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
        let names = self.measure_names();
        for r in &self.rows {
            let mi = names.iter().position(|n| *n == r.measure).expect("listed measure");
            groups.entry((mi, r.k)).or_default().push(r.error_rate);
        }
        groups
            .into_iter()
            .map(|((mi, k), v)| RangeRow {
                measure: names[mi].clone(),
                k,
                mean: v.iter().sum::<f64>() / v.len() as f64,
                min: v.iter().copied().fold(f64::INFINITY, f64::min),
                max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            })
            .collect()
    }

    /// Paired test of `a` against `b` at `k` over partitions.
    pub fn ttest(&self, a: &str, b: &str, k: usize) -> Result<TTestRow> {
        let (xa, xb) = (self.series(a, k), self.series(b, k));
        if xa.is_empty() || xb.is_empty() {
            return Err(Error::Precondition(format!("no rows for {a} / {b} at k = {k}")));
        }
        let t = paired_t_test(&xa, &xb)?;
        Ok(TTestRow {
            a: a.to_owned(),
            b: b.to_owned(),
            k,
            t: t.t,
            p: t.p,
            df: t.df,
            degenerate: t.degenerate,
        })
    }

    pub fn compute_ttests(&self) -> Result<Vec<TTestRow>> {
        let names = self.measure_names();
        let mut out = Vec::new();
        for (i, a) in names.iter().enumerate() {
            for b in &names[i + 1..] {
                for &k in &self.k_grid {
                    out.push(self.ttest(a, b, k)?);
                }
            }
        }
        Ok(out)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            // `{}` on f64 is locale-independent and round-trips exactly.
            let _ = writeln!(s, "{},{},{},{},{}", r.measure, r.k, r.partition, r.error_rate, r.n_triples);
        }
        s
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Parses the CSV produced by [`EvaluationReport::to_csv`].
pub fn parse_csv_rows(text: &str) -> Result<Vec<ReportRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        _ => return Err(Error::Parse { line: 1, message: "missing CSV header".into() }),
    }
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let bad = |what: &str| Error::Parse { line: i + 1, message: format!("bad {what}") };
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 5 {
                return Err(bad("field count"));
            }
            Ok(ReportRow {
                measure: f[0].to_owned(),
                k: f[1].parse().map_err(|_| bad("k"))?,
                partition: f[2].parse().map_err(|_| bad("partition"))?,
                error_rate: f[3].parse().map_err(|_| bad("error_rate"))?,
                n_triples: f[4].parse().map_err(|_| bad("n_triples"))?,
            })
        })
        .collect()
}

pub fn emit_report(report: &EvaluationReport, format: ReportFormat, path: &Path) -> Result<()> {
    let text = match format {
        ReportFormat::Csv => report.to_csv(),
        ReportFormat::Json => report.to_json()?,
    };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(rows: Vec<ReportRow>) -> EvaluationReport {
        let mut r = EvaluationReport {
            manifest: RunManifest::new("test"),
            measures: vec![],
            k_grid: vec![1],
            rows,
            ranges: vec![],
            baseline: vec![],
            ttests: vec![],
        };
        r.ranges = r.compute_ranges();
        r
    }

    fn row(measure: &str, partition: usize, error_rate: f64) -> ReportRow {
        ReportRow { measure: measure.into(), k: 1, partition, error_rate, n_triples: 4 }
    }

    #[test]
    fn header_only_csv() {
        assert_eq!(report(vec![]).to_csv(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn one_row_csv() {
        let csv = report(vec![row("js", 0, 0.375)]).to_csv();
        assert_eq!(csv, format!("{CSV_HEADER}\njs,1,0,0.375,4\n"));
        assert_eq!(parse_csv_rows(&csv).unwrap(), vec![row("js", 0, 0.375)]);
    }

    #[test]
    fn ranges_over_partitions() {
        let r = report(vec![row("js", 0, 0.2), row("js", 1, 0.4), row("l1", 0, 0.5), row("l1", 1, 0.5)]);
        assert_eq!(r.ranges.len(), 2);
        assert_eq!(r.ranges[0].measure, "js");
        assert!((r.ranges[0].mean - 0.3).abs() < 1e-15);
        assert_eq!((r.ranges[0].min, r.ranges[0].max), (0.2, 0.4));
        let t = r.ttest("js", "l1", 1).unwrap();
        assert_eq!(t.df, 1);
        assert!(r.ttest("js", "tau", 1).is_err());
    }

    #[test]
    fn json_round_trip() {
        let r = report(vec![row("js", 0, 0.1 + 0.2), row("js", 1, 1.0 / 3.0)]);
        assert_eq!(EvaluationReport::from_json(&r.to_json().unwrap()).unwrap(), r);
    }
}
