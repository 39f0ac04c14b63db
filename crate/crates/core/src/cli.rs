//! Command-line front end. Every artifact it writes gets a sidecar
//! `*.manifest.json` recording the seed, parameters, input digests and tool
//! version; report JSON also embeds its manifest.

use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::info;

use crate::corpus::{build_model, ingest_pairs, select_top_nouns, split_corpus, CorpusModel, CountsFile, PairCounts};
use crate::error::{Error, Result};
use crate::evaluation::testsets::{build_test_sets_with_stats, read_triples, write_triples};
use crate::evaluation::{default_k_grid, emit_report, evaluate, EvaluationReport, ReportFormat, TestTriple};
use crate::manifest::RunManifest;
use crate::measures::{MeasureKind, MeasureSpec, DEFAULT_ALPHA, DEFAULT_BETA};
use crate::smoothing::{rank_neighbors, WeightedNeighbors};
use crate::synthetic::LatentClassCorpus;

#[derive(Debug, Parser)]
#[command(name = "divsim", version, about = "Distributional similarity measures and pseudoword evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded latent-class pair corpus as TSV.
    Synth(SynthArgs),
    /// Aggregate a noun/verb TSV stream into a counts file.
    Ingest(IngestArgs),
    /// Keep only the most frequent nouns.
    FilterNouns(FilterArgs),
    /// Split pair tokens into training and held-out counts.
    Split(SplitArgs),
    /// Build the relative-frequency model from training counts.
    BuildModel(BuildArgs),
    /// Construct pseudoword test sets from held-out counts.
    MakeTestsets(TestsetArgs),
    /// Rank nouns by similarity to one noun.
    Rank(RankArgs),
    /// Distance-weighted averaging estimate of P(verb | noun).
    Estimate(EstimateArgs),
    /// Run the decision task for a set of measures over a k grid.
    Evaluate(EvaluateArgs),
    /// Paired t-tests between two measures of a report.
    Ttest(TtestArgs),
    /// Re-emit a JSON report as CSV or JSON.
    Report(ReportArgs),
    /// Run ingest through evaluation in one go.
    Pipeline(PipelineArgs),
}

fn parse_kind(s: &str) -> std::result::Result<MeasureKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// One of l1, l2, cosine, jaccard, js, kl, confusion, tau, skew.
    #[arg(long, value_parser = parse_kind)]
    pub measure: MeasureKind,
    /// Skew divergence mixing weight.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
}

impl MeasureArgs {
    fn spec(&self) -> Result<MeasureSpec> {
        MeasureSpec::with_alpha(self.measure, self.alpha)
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub nouns: usize,
    #[arg(long, default_value_t = 10)]
    pub classes: usize,
    #[arg(long, default_value_t = 500)]
    pub verbs: usize,
    #[arg(long, default_value_t = 50_000)]
    pub tokens: usize,
    #[arg(long, default_value_t = 1.0)]
    pub zipf: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub top: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub heldout: PathBuf,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TestsetArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub heldout: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub partitions: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[arg(long)]
    pub noun: String,
    /// Number of rows to print (all nouns by default).
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[arg(long)]
    pub noun: String,
    #[arg(long)]
    pub verb: String,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_BETA)]
    pub beta: f64,
}

#[derive(Debug, Args)]
pub struct EvalOptions {
    /// Comma-separated measure names (all nine by default).
    #[arg(long, value_delimiter = ',', value_parser = parse_kind)]
    pub measures: Vec<MeasureKind>,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Comma-separated neighborhood sizes.
    #[arg(long, value_delimiter = ',')]
    pub k_grid: Vec<usize>,
}

impl EvalOptions {
    fn specs(&self) -> Result<Vec<MeasureSpec>> {
        let kinds: Vec<MeasureKind> = if self.measures.is_empty() {
            MeasureKind::ALL.to_vec()
        } else {
            self.measures.clone()
        };
        kinds.into_iter().map(|k| MeasureSpec::with_alpha(k, self.alpha)).collect()
    }

    fn grid(&self, model: &CorpusModel) -> Vec<usize> {
        if self.k_grid.is_empty() {
            default_k_grid(model.noun_set().len())
        } else {
            self.k_grid.clone()
        }
    }
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Directory written by `make-testsets`.
    #[arg(long)]
    pub testsets: PathBuf,
    #[command(flatten)]
    pub options: EvalOptions,
    /// Recorded in the manifest; defaults to the test-set seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// CSV output path.
    #[arg(long)]
    pub out: PathBuf,
    /// JSON output path (defaults to the CSV path with a .json extension).
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TtestArgs {
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, value_parser = parse_kind)]
    pub a: MeasureKind,
    #[arg(long, value_parser = parse_kind)]
    pub b: MeasureKind,
    /// Restrict to one neighborhood size.
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, default_value = "csv")]
    pub format: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Pair TSV input.
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub top_nouns: usize,
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    #[arg(long, default_value_t = 5)]
    pub partitions: usize,
    #[command(flatten)]
    pub options: EvalOptions,
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Loads counts from TSV (`.tsv`/`.txt`) or the JSON counts format.
pub fn load_counts(path: &Path) -> Result<PairCounts> {
    let bytes = read_file(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("tsv") | Some("txt") => ingest_pairs(BufReader::new(bytes.as_slice())),
        _ => PairCounts::from_file(serde_json::from_slice::<CountsFile>(&bytes)?),
    }
}

pub fn counts_json(counts: &PairCounts) -> Result<String> {
    let mut s = serde_json::to_string(&counts.to_file())?;
    s.push('\n');
    Ok(s)
}

fn write_counts(path: &Path, counts: &PairCounts, manifest: &RunManifest) -> Result<()> {
    write_file(path, counts_json(counts)?)?;
    manifest.write_sidecar(path)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<CorpusModel> {
    build_model(load_counts(path)?)
}

fn partition_path(dir: &Path, i: usize) -> PathBuf {
    dir.join(format!("partition-{i}.tsv"))
}

fn write_testsets(
    dir: &Path,
    model: &CorpusModel,
    sets: &[Vec<TestTriple>],
    manifest: &RunManifest,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (i, set) in sets.iter().enumerate() {
        let path = partition_path(dir, i);
        let mut buf = Vec::new();
        write_triples(model, set, &mut buf)?;
        write_file(&path, buf)?;
    }
    write_file(&dir.join("manifest.json"), manifest.to_json()?)
}

/// Reads `partition-0.tsv`, `partition-1.tsv`, ... until the first gap.
/// Returns the sets plus each file's bytes for digesting.
/// Test sets with the raw bytes of each partition file.
type LoadedTestsets = (Vec<Vec<TestTriple>>, Vec<Vec<u8>>);

fn read_testsets(dir: &Path, model: &CorpusModel) -> Result<LoadedTestsets> {
    let mut sets = Vec::new();
    let mut raw = Vec::new();
    loop {
        let path = partition_path(dir, sets.len());
        if !path.exists() {
            break;
        }
        let bytes = read_file(&path)?;
        sets.push(read_triples(model, bytes.as_slice())?);
        raw.push(bytes);
    }
    if sets.is_empty() {
        return Err(Error::Precondition(format!("no partition files in {}", dir.display())));
    }
    Ok((sets, raw))
}

fn testset_manifest(model_bytes: &[u8], heldout_bytes: &[u8], partitions: usize, seed: u64) -> RunManifest {
    let mut m = RunManifest::new("make-testsets")
        .with_seed(seed)
        .param("partitions", partitions);
    m.add_input_bytes("model", model_bytes);
    m.add_input_bytes("heldout", heldout_bytes);
    m
}

fn make_testsets(
    model: &CorpusModel,
    heldout: &PairCounts,
    partitions: usize,
    seed: u64,
    mut manifest: RunManifest,
    out: &Path,
) -> Result<Vec<Vec<TestTriple>>> {
    let (sets, stats) = build_test_sets_with_stats(model, heldout, partitions, seed)?;
    manifest.set_param("discarded_seen_in_training", stats.seen_in_training);
    manifest.set_param("discarded_unknown_noun", stats.unknown_noun);
    manifest.set_param("discarded_untrained_verb", stats.untrained_verb);
    manifest.set_param("discarded_no_decoy", stats.no_decoy);
    write_testsets(out, model, &sets, &manifest)?;
    Ok(sets)
}

fn evaluation_manifest(specs: &[MeasureSpec], grid: &[usize], alpha: f64, seed: Option<u64>) -> RunManifest {
    let names: Vec<&str> = specs.iter().map(MeasureSpec::name).collect();
    let grid: Vec<String> = grid.iter().map(usize::to_string).collect();
    let mut m = RunManifest::new("evaluate")
        .param("measures", names.join(","))
        .param("alpha", alpha)
        .param("k_grid", grid.join(","));
    m.seed = seed;
    m
}

fn write_report(report: &EvaluationReport, csv: &Path, json: &Path) -> Result<()> {
    write_file(csv, report.to_csv())?;
    write_file(json, report.to_json()?)?;
    report.manifest.write_sidecar(csv)?;
    report.manifest.write_sidecar(json)?;
    Ok(())
}

fn noun_of(model: &CorpusModel, noun: &str) -> Result<crate::vocab::NounId> {
    model.noun_id(noun).ok_or_else(|| Error::UnknownNoun(noun.to_owned()))
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    let out_err = |e| Error::io("<stdout>", e);
    match cli.command {
        Command::Synth(a) => {
            let cfg = LatentClassCorpus {
                nouns: a.nouns,
                classes: a.classes,
                verbs: a.verbs,
                tokens: a.tokens,
                zipf_exponent: a.zipf,
            };
            write_file(&a.out, cfg.to_tsv(a.seed)?)?;
            RunManifest::new("synth")
                .with_seed(a.seed)
                .param("nouns", a.nouns)
                .param("classes", a.classes)
                .param("verbs", a.verbs)
                .param("tokens", a.tokens)
                .param("zipf", a.zipf)
                .write_sidecar(&a.out)?;
        }
        Command::Ingest(a) => {
            let bytes = read_file(&a.input)?;
            let counts = ingest_pairs(BufReader::new(bytes.as_slice()))?;
            let mut m = RunManifest::new("ingest");
            m.add_input_bytes("input", &bytes);
            write_counts(&a.out, &counts, &m)?;
            info!("{} tokens, {} pair types", counts.total(), counts.num_entries());
        }
        Command::FilterNouns(a) => {
            let counts = load_counts(&a.input)?;
            let mut m = RunManifest::new("filter-nouns").param("top", a.top);
            m.add_input_file("input", &a.input)?;
            write_counts(&a.out, &select_top_nouns(&counts, a.top)?, &m)?;
        }
        Command::Split(a) => {
            let counts = load_counts(&a.input)?;
            let (train, heldout) = split_corpus(&counts, a.train_fraction, a.seed)?;
            let mut m = RunManifest::new("split")
                .with_seed(a.seed)
                .param("train_fraction", a.train_fraction);
            m.add_input_file("input", &a.input)?;
            write_counts(&a.train, &train, &m)?;
            write_counts(&a.heldout, &heldout, &m)?;
            info!("{} training tokens, {} held-out tokens", train.total(), heldout.total());
        }
        Command::BuildModel(a) => {
            let train = load_counts(&a.train)?;
            let model = build_model(train)?;
            let mut m = RunManifest::new("build-model");
            m.add_input_file("train", &a.train)?;
            write_counts(&a.out, model.counts(), &m)?;
            info!("{} nouns, {} verbs", model.noun_set().len(), model.verb_vocab_size());
        }
        Command::MakeTestsets(a) => {
            let model_bytes = read_file(&a.model)?;
            let heldout_bytes = read_file(&a.heldout)?;
            let model = load_model(&a.model)?;
            let heldout = load_counts(&a.heldout)?;
            let m = testset_manifest(&model_bytes, &heldout_bytes, a.partitions, a.seed);
            make_testsets(&model, &heldout, a.partitions, a.seed, m, &a.out)?;
        }
        Command::Rank(a) => {
            let model = load_model(&a.model)?;
            let n = noun_of(&model, &a.noun)?;
            let ranking = rank_neighbors(&model, &a.measure.spec()?, n)?;
            let k = a.k.unwrap_or(ranking.len()).min(ranking.len());
            for (i, (m, v)) in ranking.entries[..k].iter().enumerate() {
                writeln!(stdout, "{}\t{}\t{}", i + 1, model.noun_str(*m), v).map_err(out_err)?;
            }
        }
        Command::Estimate(a) => {
            let model = load_model(&a.model)?;
            let n = noun_of(&model, &a.noun)?;
            let v = model
                .verb_id(&a.verb)
                .ok_or_else(|| Error::UnknownVerb(a.verb.clone()))?;
            let ranking = rank_neighbors(&model, &a.measure.spec()?, n)?;
            let p = WeightedNeighbors::from_ranking(&ranking, a.k, a.beta)?.estimate(&model, v);
            writeln!(stdout, "{p}").map_err(out_err)?;
        }
        Command::Evaluate(a) => {
            let model_bytes = read_file(&a.model)?;
            let model = load_model(&a.model)?;
            let (sets, raw) = read_testsets(&a.testsets, &model)?;
            let seed = a.seed.or_else(|| {
                let text = fs::read_to_string(a.testsets.join("manifest.json")).ok()?;
                serde_json::from_str::<RunManifest>(&text).ok()?.seed
            });
            let specs = a.options.specs()?;
            let grid = a.options.grid(&model);
            let mut m = evaluation_manifest(&specs, &grid, a.options.alpha, seed);
            m.add_input_bytes("model", &model_bytes);
            for (i, bytes) in raw.iter().enumerate() {
                m.add_input_bytes(&format!("partition-{i}"), bytes);
            }
            let report = evaluate(&model, &specs, &sets, &grid, m)?;
            let json = a.json.unwrap_or_else(|| a.out.with_extension("json"));
            write_report(&report, &a.out, &json)?;
        }
        Command::Ttest(a) => {
            let report = EvaluationReport::read_json(&a.report)?;
            writeln!(stdout, "k\tt\tp\tdf").map_err(out_err)?;
            let grid: Vec<usize> = match a.k {
                Some(k) => vec![k],
                None => report.k_grid.clone(),
            };
            for k in grid {
                let t = report.ttest(a.a.name(), a.b.name(), k)?;
                writeln!(stdout, "{}\t{}\t{}\t{}", k, t.t, t.p, t.df).map_err(out_err)?;
            }
        }
        Command::Report(a) => {
            let report = EvaluationReport::read_json(&a.report)?;
            let format: ReportFormat = a.format.parse()?;
            emit_report(&report, format, &a.out)?;
            report.manifest.write_sidecar(&a.out)?;
        }
        Command::Pipeline(a) => run_pipeline(&a)?,
    }
    Ok(())
}

/// ingest, filter, split, build, make test sets and evaluate, writing every
/// intermediate artifact under `args.out`.
pub fn run_pipeline(a: &PipelineArgs) -> Result<()> {
    let dir = &a.out;
    let input = read_file(&a.input)?;
    let counts = ingest_pairs(BufReader::new(input.as_slice()))?;
    let mut m = RunManifest::new("ingest");
    m.add_input_bytes("input", &input);
    write_counts(&dir.join("counts.json"), &counts, &m)?;

    let filtered = select_top_nouns(&counts, a.top_nouns)?;
    let mut m = RunManifest::new("filter-nouns").param("top", a.top_nouns);
    m.add_input_bytes("input", counts_json(&counts)?.as_bytes());
    write_counts(&dir.join("filtered.json"), &filtered, &m)?;

    let (train, heldout) = split_corpus(&filtered, a.train_fraction, a.seed)?;
    let mut m = RunManifest::new("split")
        .with_seed(a.seed)
        .param("train_fraction", a.train_fraction);
    m.add_input_bytes("input", counts_json(&filtered)?.as_bytes());
    write_counts(&dir.join("heldout.json"), &heldout, &m)?;

    let model = build_model(train)?;
    let model_json = counts_json(model.counts())?;
    let mut m = RunManifest::new("build-model");
    m.add_input_bytes("train", model_json.as_bytes());
    write_counts(&dir.join("model.json"), model.counts(), &m)?;

    let heldout_json = counts_json(&heldout)?;
    let m = testset_manifest(model_json.as_bytes(), heldout_json.as_bytes(), a.partitions, a.seed);
    let testsets_dir = dir.join("testsets");
    let sets = make_testsets(&model, &heldout, a.partitions, a.seed, m, &testsets_dir)?;

    let specs = a.options.specs()?;
    let grid = a.options.grid(&model);
    let mut m = evaluation_manifest(&specs, &grid, a.options.alpha, Some(a.seed))
        .param("top_nouns", a.top_nouns)
        .param("train_fraction", a.train_fraction)
        .param("partitions", a.partitions);
    m.add_input_bytes("input", &input);
    m.add_input_bytes("model", model_json.as_bytes());
    for i in 0..sets.len() {
        m.add_input_file(&format!("partition-{i}"), &partition_path(&testsets_dir, i))?;
    }
    let report = evaluate(&model, &specs, &sets, &grid, m)?;
    write_report(&report, &dir.join("report.csv"), &dir.join("report.json"))
}
