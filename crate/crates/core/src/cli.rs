//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage errors and bad input, 2 when
//! writing output fails. Every output file is written to a temporary file
//! next to its destination and renamed into place.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::corpus::{corpus_stats, gold_by_case, load_annotations, load_corpus, prelabel_negatives, Decision};
use crate::detection::{detect, select_sentence_rule_based};
use crate::error::{ApeError, Result};
use crate::evaluation::punishment_histogram;
use crate::extraction::{extract, ExtractionConfig, ExtractionResult};
use crate::lexicon::Lexicon;
use crate::supervised::{
    argmax_probabilities, candidate_probabilities, cross_validate, train, training_records, CVConfig, Method,
    ModelKind, TrainedModel,
};

/// Environment variable naming the lexicon used when `--lexicon` is absent.
pub const LEXICON_ENV: &str = "APE_LEXICON";

#[derive(Debug, Parser)]
#[command(name = "ape", version, about = "Extract actual imprisonment terms from Hebrew sentencing decisions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split decisions into sentences (one JSON line per sentence).
    Segment {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Mark sentences without a filter keyword as automatic negatives.
    Prelabel {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        settings: Settings,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Select the punishment sentence of each decision with the rules.
    Detect {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        settings: Settings,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fit a model on all annotated decisions and write the model file.
    Train {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        settings: Settings,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Extract the actual term of every decision (one JSON line each).
    #[command(group = clap::ArgGroup::new("selector").required(true).args(["rule_based", "model_path"]))]
    Extract {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        rule_based: bool,
        #[arg(long)]
        model_path: Option<PathBuf>,
        /// Also write a histogram of extracted terms as CSV.
        #[arg(long)]
        histogram: Option<PathBuf>,
        #[arg(long, default_value_t = 12)]
        bucket_months: u32,
        #[command(flatten)]
        settings: Settings,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Cross-validate a method on the annotated decisions.
    Eval {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::RuleBased)]
        method: MethodArg,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        stage1_threshold: f64,
        #[command(flatten)]
        settings: Settings,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Corpus size and sentence length statistics.
    Stats {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct CorpusArgs {
    /// Directory of `.txt` decisions.
    #[arg(long)]
    corpus: PathBuf,
    /// Metadata file; defaults to `metadata.json` inside the corpus directory.
    #[arg(long)]
    metadata: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Settings {
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Rule score threshold (overrides the lexicon value).
    #[arg(long)]
    threshold: Option<f64>,
    /// Override any configuration field, e.g. `lexicon.structure.fine_penalty=1`,
    /// `extraction.weights.actual_marker=3` or `training.forest.n_trees=50`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Svm,
    Rf,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Svm => ModelKind::LinearMargin,
            ModelArg::Rf => ModelKind::TreeEnsemble,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    RuleBased,
    Svm,
    Rf,
}

enum Failure {
    Input(ApeError),
    Internal(String),
}

impl From<ApeError> for Failure {
    fn from(e: ApeError) -> Self {
        Failure::Input(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Runs the CLI on `argv` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            1
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            2
        }
    }
}

struct Resolved {
    lexicon: Lexicon,
    extraction: ExtractionConfig,
    training: CVConfig,
}

fn resolve(settings: &Settings) -> Result<Resolved> {
    let lexicon_json = match settings
        .lexicon
        .clone()
        .or_else(|| std::env::var_os(LEXICON_ENV).map(PathBuf::from))
    {
        Some(path) => std::fs::read_to_string(&path).map_err(|e| ApeError::io(&path, e))?,
        None => Lexicon::default_json().to_string(),
    };
    let mut lexicon_value: Value = serde_json::from_str(&lexicon_json).map_err(|e| ApeError::Parse {
        what: "lexicon".into(),
        message: e.to_string(),
    })?;
    let mut extraction = serde_json::to_value(ExtractionConfig::default()).expect("config serializes");
    let mut training = serde_json::to_value(CVConfig::default()).expect("config serializes");

    for item in &settings.overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| ApeError::Config(format!("override `{item}` is not KEY=VALUE")))?;
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let (target, path) = match key.split_once('.') {
            Some(("lexicon", rest)) => (&mut lexicon_value, rest),
            Some(("extraction", rest)) => (&mut extraction, rest),
            Some(("training", rest)) => (&mut training, rest),
            _ => {
                return Err(ApeError::Config(format!(
                    "override key `{key}` must start with lexicon., extraction. or training."
                )))
            }
        };
        set_path(target, path, value)?;
    }
    if let Some(t) = settings.threshold {
        lexicon_value["threshold"] = Value::from(t);
    }

    let config_err = |what: &str, e: serde_json::Error| ApeError::Config(format!("{what}: {e}"));
    Ok(Resolved {
        lexicon: Lexicon::from_json_str(&lexicon_value.to_string())?,
        extraction: serde_json::from_value(extraction).map_err(|e| config_err("extraction", e))?,
        training: serde_json::from_value(training).map_err(|e| config_err("training", e))?,
    })
}

fn set_path(target: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut cur = target;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let Value::Object(map) = cur else {
            return Err(ApeError::Config(format!("`{path}` does not name a field")));
        };
        if !map.contains_key(*part) {
            return Err(ApeError::Config(format!("unknown field `{part}` in `{path}`")));
        }
        if i + 1 == parts.len() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        cur = map.get_mut(*part).expect("checked above");
    }
    Ok(())
}

fn load(args: &CorpusArgs) -> Result<Vec<Decision>> {
    let metadata = args.metadata.clone().unwrap_or_else(|| args.corpus.join("metadata.json"));
    let loaded = load_corpus(&args.corpus, &metadata)?;
    for e in &loaded.errors {
        eprintln!("warning: skipped {}: {}", e.path.display(), e.message);
    }
    Ok(loaded.decisions)
}

/// Maps `f` over the decisions on a pool of `jobs` threads, keeping input order.
fn par_map<T, F>(decisions: &[Decision], jobs: Option<usize>, f: F) -> CliResult<Vec<T>>
where
    T: Send,
    F: Fn(&Decision) -> Result<T> + Sync,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(ApeError::Config("--jobs must be at least 1".into()).into());
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Failure::Internal(e.to_string()))?;
    Ok(pool.install(|| decisions.par_iter().map(&f).collect::<Result<Vec<T>>>())?)
}

fn jsonl<T: Serialize>(items: &[T]) -> String {
    items
        .iter()
        .map(|i| serde_json::to_string(i).expect("record serializes") + "\n")
        .collect()
}

fn emit(out: Option<&Path>, contents: &str) -> CliResult<()> {
    match out {
        Some(path) => write_atomic(path, contents.as_bytes()).map_err(|e| {
            Failure::Internal(format!("writing {}: {e}", path.display()))
        }),
        None => std::io::stdout()
            .write_all(contents.as_bytes())
            .map_err(|e| Failure::Internal(format!("writing stdout: {e}"))),
    }
}

/// Writes via a temporary file in the destination directory and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[derive(Serialize)]
struct SegmentRecord<'a> {
    case_id: &'a str,
    index: usize,
    text: &'a str,
    token_count: usize,
    relative_position: f64,
}

#[derive(Serialize)]
struct PrelabelRecord {
    case_id: String,
    sentence_index: usize,
    auto_negative: bool,
}

fn load_model(path: &Path) -> Result<TrainedModel> {
    let raw = std::fs::read_to_string(path).map_err(|e| ApeError::io(path, e))?;
    TrainedModel::from_json(&raw)
}

fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Segment { corpus, output } => {
            let decisions = load(&corpus)?;
            let mut records = Vec::new();
            for d in &decisions {
                for s in &d.sentences {
                    records.push(SegmentRecord {
                        case_id: &d.case_id,
                        index: s.index,
                        text: &s.text,
                        token_count: s.token_count,
                        relative_position: s.relative_position,
                    });
                }
            }
            emit(output.out.as_deref(), &jsonl(&records))
        }
        Command::Prelabel { corpus, settings, output } => {
            let r = resolve(&settings)?;
            let decisions = load(&corpus)?;
            let labels = par_map(&decisions, corpus.jobs, |d| Ok(prelabel_negatives(d, &r.lexicon)))?;
            let records: Vec<PrelabelRecord> = decisions
                .iter()
                .zip(labels)
                .flat_map(|(d, l)| {
                    l.into_iter().map(|(i, neg)| PrelabelRecord {
                        case_id: d.case_id.clone(),
                        sentence_index: i,
                        auto_negative: neg,
                    })
                })
                .collect();
            emit(output.out.as_deref(), &jsonl(&records))
        }
        Command::Detect { corpus, settings, output } => {
            let r = resolve(&settings)?;
            let decisions = load(&corpus)?;
            let found = par_map(&decisions, corpus.jobs, |d| Ok(detect(d, &r.lexicon)))?;
            emit(output.out.as_deref(), &jsonl(&found))
        }
        Command::Train {
            corpus,
            annotations,
            model,
            seed,
            settings,
            output,
        } => {
            let mut r = resolve(&settings)?;
            r.training.seed = seed;
            let decisions = load(&corpus)?;
            let gold = gold_by_case(&load_annotations(&annotations)?);
            let records = training_records(&decisions, &gold, &r.lexicon);
            let fitted = train(&records, model.into(), &r.training)?;
            emit(output.out.as_deref(), &(fitted.to_json() + "\n"))
        }
        Command::Extract {
            corpus,
            rule_based,
            model_path,
            histogram,
            bucket_months,
            settings,
            output,
        } => {
            let r = resolve(&settings)?;
            let model = match (&model_path, rule_based) {
                (Some(p), false) => Some(load_model(p)?),
                (None, true) => None,
                _ => return Err(ApeError::Config("give exactly one of --rule-based or --model-path".into()).into()),
            };
            let decisions = load(&corpus)?;
            let results: Vec<ExtractionResult> = par_map(&decisions, corpus.jobs, |d| {
                let selected = match &model {
                    Some(m) => argmax_probabilities(&candidate_probabilities(m, d, &r.lexicon)?),
                    None => select_sentence_rule_based(d, &r.lexicon),
                };
                Ok(extract(d, selected, &r.lexicon, &r.extraction))
            })?;
            if let Some(path) = histogram {
                let h = punishment_histogram(&results, bucket_months)?;
                emit(Some(&path), &h.to_csv())?;
            }
            emit(output.out.as_deref(), &jsonl(&results))
        }
        Command::Eval {
            corpus,
            annotations,
            method,
            folds,
            seed,
            stage1_threshold,
            settings,
            output,
        } => {
            let mut r = resolve(&settings)?;
            r.training.num_folds = folds;
            r.training.seed = seed;
            r.training.stage1_threshold = stage1_threshold;
            let decisions = load(&corpus)?;
            let records = load_annotations(&annotations)?;
            let method = match method {
                MethodArg::RuleBased => Method::RuleBased,
                MethodArg::Svm => Method::Supervised(ModelKind::LinearMargin),
                MethodArg::Rf => Method::Supervised(ModelKind::TreeEnsemble),
            };
            let report = cross_validate(&decisions, &records, &r.lexicon, method, &r.training, &r.extraction)?;
            emit(
                output.out.as_deref(),
                &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"),
            )
        }
        Command::Stats { corpus, output } => {
            let decisions = load(&corpus)?;
            let stats = corpus_stats(&decisions);
            emit(
                output.out.as_deref(),
                &(serde_json::to_string_pretty(&stats).expect("stats serialize") + "\n"),
            )
        }
    }
}
