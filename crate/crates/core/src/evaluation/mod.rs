//! The pseudoword decision task: test sets, evidence-based decisions,
//! tie-aware error rates and paired significance tests between measures.

pub mod report;
pub mod testsets;
pub mod ttest;

use std::collections::HashMap;

use crate::corpus::CorpusModel;
use crate::error::{Error, Result};
use crate::manifest::RunManifest;
use crate::measures::MeasureSpec;
use crate::smoothing::{rank_neighbors, unigram_baseline_decide, Decision, Evidence};
use crate::vocab::NounId;

pub use report::{emit_report, BaselineRow, EvaluationReport, RangeRow, ReportFormat, ReportRow, TTestRow};
pub use testsets::{build_test_sets, build_test_sets_with_stats, DecoyIndex, DiscardStats, TestTriple};
pub use ttest::{paired_t_test, TTest};

/// Picks the alternative with more evidence; equal evidence is a tie.
pub fn decide(e: Evidence) -> Decision {
    decide_counts(e.for_v1, e.for_v2)
}

fn decide_counts(for_v1: u32, for_v2: u32) -> Decision {
    use std::cmp::Ordering::*;
    match for_v1.cmp(&for_v2) {
        Greater => Decision::V1,
        Less => Decision::V2,
        Equal => Decision::Tie,
    }
}

/// Running decision counts. `v1` is always the correct answer.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub v1: u64,
    pub v2: u64,
    pub tie: u64,
}

impl Tally {
    pub fn push(&mut self, d: Decision) {
        match d {
            Decision::V1 => self.v1 += 1,
            Decision::V2 => self.v2 += 1,
            Decision::Tie => self.tie += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.v1 + self.v2 + self.tie
    }

    /// `(incorrect + ties / 2) / total`.
    pub fn error_rate(&self) -> Result<f64> {
        if self.total() == 0 {
            return Err(Error::Precondition("error rate of zero decisions".into()));
        }
        Ok((self.v2 as f64 + self.tie as f64 / 2.0) / self.total() as f64)
    }
}

pub fn error_rate(decisions: &[Decision]) -> Result<f64> {
    let mut t = Tally::default();
    decisions.iter().for_each(|&d| t.push(d));
    t.error_rate()
}

/// `{1, 5, 10, 25, 50, 100, 200, 400, 700}` restricted to `k < |N|`, plus `|N|`.
pub fn default_k_grid(num_nouns: usize) -> Vec<usize> {
    let mut grid: Vec<usize> = [1, 5, 10, 25, 50, 100, 200, 400, 700]
        .into_iter()
        .filter(|&k| k < num_nouns)
        .collect();
    grid.push(num_nouns);
    grid
}

fn normalize_grid(model: &CorpusModel, k_grid: &[usize]) -> Result<Vec<usize>> {
    let n = model.noun_set().len();
    let mut grid = k_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    if grid.is_empty() {
        return Err(Error::Precondition("empty k grid".into()));
    }
    if let Some(&k) = grid.iter().find(|&&k| k == 0 || k > n) {
        return Err(Error::Precondition(format!("k = {k} outside [1, {n}]")));
    }
    Ok(grid)
}

/// Neighbor orderings (best first) for every noun occurring in the test sets.
fn rank_targets(
    model: &CorpusModel,
    spec: &MeasureSpec,
    test_sets: &[Vec<TestTriple>],
) -> Result<HashMap<NounId, Vec<NounId>>> {
    let mut targets: Vec<NounId> = test_sets.iter().flatten().map(|t| t.noun).collect();
    targets.sort_unstable();
    targets.dedup();
    targets
        .into_iter()
        .map(|n| Ok((n, rank_neighbors(model, spec, n)?.nouns().collect())))
        .collect()
}

/// Error rate per (k, partition) for one measure. Rows come out ordered by
/// ascending k, then partition index.
pub fn run_curve(
    model: &CorpusModel,
    spec: &MeasureSpec,
    test_sets: &[Vec<TestTriple>],
    k_grid: &[usize],
) -> Result<Vec<ReportRow>> {
    let grid = normalize_grid(model, k_grid)?;
    let kmax = *grid.last().expect("nonempty grid");
    let rankings = rank_targets(model, spec, test_sets)?;

    let mut tallies = vec![vec![Tally::default(); test_sets.len()]; grid.len()];
    for (p, set) in test_sets.iter().enumerate() {
        for t in set {
            let order = &rankings[&t.noun];
            let (mut f1, mut f2) = (0u32, 0u32);
            let mut gi = 0;
            for (i, &m) in order[..kmax].iter().enumerate() {
                let (p1, p2) = (model.cond_prob(m, t.v1), model.cond_prob(m, t.v2));
                if p1 > p2 {
                    f1 += 1;
                } else if p2 > p1 {
                    f2 += 1;
                }
                while gi < grid.len() && grid[gi] == i + 1 {
                    tallies[gi][p].push(decide_counts(f1, f2));
                    gi += 1;
                }
            }
        }
    }

    let mut rows = Vec::with_capacity(grid.len() * test_sets.len());
    for (gi, &k) in grid.iter().enumerate() {
        for (p, tally) in tallies[gi].iter().enumerate() {
            rows.push(ReportRow {
                measure: spec.name().to_owned(),
                k,
                partition: p,
                error_rate: tally.error_rate()?,
                n_triples: tally.total(),
            });
        }
    }
    Ok(rows)
}

/// Error rate of the unigram-frequency baseline on each partition.
pub fn run_baseline(model: &CorpusModel, test_sets: &[Vec<TestTriple>]) -> Result<Vec<BaselineRow>> {
    test_sets
        .iter()
        .enumerate()
        .map(|(p, set)| {
            let mut tally = Tally::default();
            for t in set {
                tally.push(unigram_baseline_decide(model, t.v1, t.v2));
            }
            Ok(BaselineRow {
                partition: p,
                error_rate: tally.error_rate()?,
                n_triples: tally.total(),
            })
        })
        .collect()
}

/// Runs every measure over the grid, summarizes ranges over partitions,
/// the unigram baseline, and paired t-tests for every measure pair and k.
pub fn evaluate(
    model: &CorpusModel,
    specs: &[MeasureSpec],
    test_sets: &[Vec<TestTriple>],
    k_grid: &[usize],
    manifest: RunManifest,
) -> Result<EvaluationReport> {
    if test_sets.len() < 2 {
        return Err(Error::Precondition("need at least 2 test partitions".into()));
    }
    if specs.is_empty() {
        return Err(Error::Precondition("no measures requested".into()));
    }
    let grid = normalize_grid(model, k_grid)?;
    let mut rows = Vec::new();
    for spec in specs {
        rows.extend(run_curve(model, spec, test_sets, &grid)?);
    }
    let baseline = run_baseline(model, test_sets)?;
    let mut report = EvaluationReport {
        manifest,
        measures: specs.to_vec(),
        k_grid: grid,
        rows,
        ranges: Vec::new(),
        baseline,
        ttests: Vec::new(),
    };
    report.ranges = report.compute_ranges();
    report.ttests = report.compute_ttests()?;
    Ok(report)
}
