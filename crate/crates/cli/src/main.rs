//! `offanchor`: the emoji-anchored offensive-language pipeline as one binary.
//!
//! Every command that writes a file also writes `<out>.manifest.json` with
//! the digests of its inputs and outputs. Exit codes: 0 success, 1 usage
//! error, 2 data error.

mod commands;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use offanchor::annotation::JOB_OFFENSIVE;
use offanchor::classifier::FeatureMode;
use offanchor::corpus::{CorpusFormat, HateTarget, SplitPart, SplitRatios};
use offanchor::lexicon::LexiconClass;

#[derive(Parser, Debug)]
#[command(name = "offanchor", version, about = "Emoji-anchored offensive language toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Normalization settings shared by text-processing commands.
#[derive(Args, Debug, Clone, Default)]
pub struct NormArgs {
    /// Normalization config file (key=value lines); see `normalize --print-defaults`.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Override one normalization key; repeatable, applied after --config.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

/// Corpus input.
#[derive(Args, Debug, Clone)]
pub struct CorpusIn {
    /// Corpus file (JSONL, or TSV when the name ends in .tsv).
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    /// Force the corpus format instead of guessing from the extension.
    #[arg(long, value_name = "jsonl|tsv")]
    pub format: Option<CorpusFormat>,
}

#[derive(Subcommand, Debug)]
pub(crate) enum Command {
    /// Keep documents containing at least one seed emoji.
    Collect {
        #[command(flatten)]
        corpus: CorpusIn,
        /// Seed emoji inventory TSV; the bundled inventory when omitted.
        #[arg(long, value_name = "FILE")]
        seeds: Option<PathBuf>,
        /// Output JSONL.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Drop exact duplicates, near duplicates and very short documents.
    Dedup {
        #[command(flatten)]
        corpus: CorpusIn,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Also write `doc_id, reason` rows for dropped documents.
        #[arg(long, value_name = "FILE")]
        dropped: Option<PathBuf>,
        /// Words per shingle [default: 2].
        #[arg(long)]
        shingle_size: Option<usize>,
        /// Jaccard similarity at or above which a document is a near duplicate [default: 0.8].
        #[arg(long)]
        threshold: Option<f64>,
        /// Documents with fewer content tokens are dropped [default: 3].
        #[arg(long)]
        min_tokens: Option<usize>,
        #[command(flatten)]
        norm: NormArgs,
    },
    /// Normalize document texts, or print the default normalization config.
    Normalize {
        #[arg(long = "in", value_name = "FILE", required_unless_present = "print_defaults")]
        input: Option<PathBuf>,
        #[arg(long, value_name = "jsonl|tsv")]
        format: Option<CorpusFormat>,
        #[arg(long, value_name = "FILE", required_unless_present = "print_defaults")]
        out: Option<PathBuf>,
        /// Print the default config to stdout and exit.
        #[arg(long, conflicts_with_all = ["input", "out", "config", "set"])]
        print_defaults: bool,
        #[command(flatten)]
        norm: NormArgs,
    },
    /// Stratified train/dev/test split on the offensive label.
    Split {
        #[arg(long, value_name = "FILE")]
        labels: PathBuf,
        /// Only split labels of documents in this corpus.
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Train, dev and test shares.
        #[arg(long, default_value = "0.7,0.1,0.2", value_name = "T,D,E")]
        ratios: SplitRatios,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Mine class-distinctive terms by valence.
    MineLexicon {
        #[command(flatten)]
        corpus: CorpusIn,
        #[arg(long, value_name = "FILE")]
        labels: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Positive class: offensive, hate, vulgar or violence.
        #[arg(long, default_value = "offensive")]
        class: LexiconClass,
        /// Inclusive valence threshold, as a decimal.
        #[arg(long, default_value = "0.8")]
        min_valence: String,
        /// Inclusive minimum total frequency.
        #[arg(long, default_value_t = 5)]
        min_freq: u64,
        /// Also write group shares of hate documents to this TSV.
        #[arg(long, value_name = "FILE")]
        targets_out: Option<PathBuf>,
        /// Group gazetteer TSV for --targets-out; the bundled religion gazetteer when omitted.
        #[arg(long, value_name = "FILE", requires = "targets_out")]
        gazetteer: Option<PathBuf>,
        /// Restrict --targets-out to hate documents with this annotated target.
        #[arg(long, requires = "targets_out")]
        target: Option<HateTarget>,
        #[command(flatten)]
        norm: NormArgs,
    },
    /// Per-emoji document counts and offensive / hate shares.
    EmojiStats {
        #[command(flatten)]
        corpus: CorpusIn,
        #[arg(long, value_name = "FILE")]
        labels: PathBuf,
        /// Inventory used for the category column; the bundled one when omitted.
        #[arg(long, value_name = "FILE")]
        seeds: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Draw up to k documents per seed emoji.
    Sample {
        #[command(flatten)]
        corpus: CorpusIn,
        #[arg(long, value_name = "FILE")]
        seeds: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output JSONL, one document per line with its anchor.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Find violence patterns in each document.
    MatchViolence {
        #[command(flatten)]
        corpus: CorpusIn,
        /// Lexical classes TSV; the bundled classes when omitted.
        #[arg(long, value_name = "FILE")]
        classes: Option<PathBuf>,
        /// Pattern rules TSV; the bundled rules when omitted.
        #[arg(long, value_name = "FILE")]
        rules: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        #[command(flatten)]
        norm: NormArgs,
    },
    /// Majority-vote crowd judgments into a labels file.
    Aggregate {
        #[arg(long, value_name = "FILE")]
        judgments: PathBuf,
        /// Output labels TSV.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Write non-unanimous items here for expert review.
        #[arg(long, value_name = "FILE")]
        queue: Option<PathBuf>,
        /// Filled-in review sheet whose override column replaces voted labels.
        #[arg(long, value_name = "FILE")]
        overrides: Option<PathBuf>,
        /// Gold test answers; annotators failing the gate are dropped along with the test items.
        #[arg(long, value_name = "FILE")]
        answers: Option<PathBuf>,
        /// Gate pass threshold on test-question accuracy.
        #[arg(long, default_value_t = 0.7, requires = "answers")]
        threshold: f64,
    },
    /// Average pairwise Cohen's kappa for one job.
    Kappa {
        #[arg(long, value_name = "FILE")]
        judgments: PathBuf,
        #[arg(long, default_value = JOB_OFFENSIVE)]
        job: String,
        /// Pairs sharing fewer documents are skipped.
        #[arg(long, default_value_t = offanchor::annotation::DEFAULT_MIN_SHARED)]
        min_shared: usize,
        /// Also write the per-pair table.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Score annotators on gold test questions.
    Gate {
        #[arg(long, value_name = "FILE")]
        judgments: PathBuf,
        #[arg(long, value_name = "FILE")]
        answers: PathBuf,
        #[arg(long, default_value_t = 0.7)]
        threshold: f64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Train a tf-idf n-gram linear SVM.
    Train {
        #[command(flatten)]
        corpus: CorpusIn,
        #[arg(long, value_name = "FILE")]
        labels: PathBuf,
        /// Split file; only the --part documents are used.
        #[arg(long, value_name = "FILE")]
        split: Option<PathBuf>,
        #[arg(long, default_value = "train", requires = "split")]
        part: SplitPart,
        #[arg(long, default_value = "offensive")]
        class: LexiconClass,
        /// char, word or char+word.
        #[arg(long, default_value = "char")]
        features: FeatureMode,
        #[arg(long, default_value = "2,5", value_parser = parse_range, value_name = "MIN,MAX")]
        char_range: (usize, usize),
        #[arg(long, default_value = "1,3", value_parser = parse_range, value_name = "MIN,MAX")]
        word_range: (usize, usize),
        /// Hinge loss weight.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1000)]
        max_epochs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output model file.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Also write the per-epoch optimization trace.
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
        #[command(flatten)]
        norm: NormArgs,
    },
    /// Score documents with a trained model.
    Predict {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        #[command(flatten)]
        corpus: CorpusIn,
        #[arg(long, value_name = "FILE")]
        split: Option<PathBuf>,
        #[arg(long, default_value = "test", requires = "split")]
        part: SplitPart,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Macro-averaged precision, recall and F1 of a predictions file.
    Evaluate {
        #[arg(long, value_name = "FILE")]
        labels: PathBuf,
        #[arg(long, value_name = "FILE")]
        predictions: PathBuf,
        #[arg(long, default_value = "offensive")]
        class: LexiconClass,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Token attributions for one document by masking.
    Explain {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        /// Corpus holding the document named by --doc-id.
        #[arg(long = "in", value_name = "FILE", requires = "doc_id", conflicts_with = "text")]
        input: Option<PathBuf>,
        #[arg(long, requires = "input")]
        doc_id: Option<String>,
        /// Explain this text instead of a corpus document.
        #[arg(long, required_unless_present = "input")]
        text: Option<String>,
        /// Inventory used for emoji aliases; the bundled one when omitted.
        #[arg(long, value_name = "FILE")]
        seeds: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0.25)]
        kernel_width: f64,
        #[arg(long, default_value_t = 1.0)]
        ridge: f64,
        #[arg(long, default_value_t = 10)]
        top_k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Collect class distribution, emoji stats, lexicon head and metrics in one text file.
    Report {
        #[arg(long, value_name = "FILE")]
        labels: PathBuf,
        /// Emoji stats TSV from `emoji-stats`.
        #[arg(long, value_name = "FILE")]
        emoji_stats: Option<PathBuf>,
        /// Lexicon TSV from `mine-lexicon`.
        #[arg(long, value_name = "FILE")]
        lexicon: Option<PathBuf>,
        /// Metrics TSV from `evaluate`.
        #[arg(long, value_name = "FILE")]
        metrics: Option<PathBuf>,
        /// Rows shown from the emoji and lexicon tables.
        #[arg(long, default_value_t = 20)]
        top: usize,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Generate a synthetic labeled corpus.
    Synth {
        /// enrichment, separable or pipeline.
        #[arg(long, value_parser = ["enrichment", "separable", "pipeline"])]
        kind: String,
        /// Number of documents [default: 10000 for enrichment, 200 separable, 3000 pipeline].
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output corpus JSONL.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Output labels TSV.
        #[arg(long, value_name = "FILE")]
        labels_out: PathBuf,
    },
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected MIN,MAX, got {s:?}"))?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("bad integer {x:?}"));
    let (a, b) = (p(a)?, p(b)?);
    if a == 0 || a > b {
        return Err(format!("need 1 <= MIN <= MAX, got {s}"));
    }
    Ok((a, b))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = format!("{e:#}").replace('\n', " ");
            if e.downcast_ref::<run::UsageError>().is_some() {
                eprintln!("error: {message} (see --help)");
                ExitCode::from(1)
            } else {
                eprintln!("error: {message}");
                ExitCode::from(2)
            }
        }
    }
}
