//! Command-line front end. Settings come from an optional TOML file and are
//! then overridden by flags.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::pipeline::{
    manifest, run_all, run_map, run_report, run_sentiment, PipelineConfig, PipelineError,
    TopicTerms,
};

#[derive(Debug, Parser)]
#[command(
    name = "tweetlens",
    version,
    about = "Interest maps and sentiment trends from tweet corpora"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// n-grams → truncated SVD → K-Means → t-SNE → map files
    Map,
    /// Per-document polarity and its aggregates over years and topics
    Sentiment,
    /// Plain-text summary of earlier map and sentiment outputs
    Report,
    /// map, sentiment and report in sequence
    All,
}

#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// TOML configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Corpus file, one JSON record per line
    #[arg(long = "input", global = true)]
    pub input_path: Option<PathBuf>,
    /// Directory for output files
    #[arg(long = "out", global = true)]
    pub output_dir: Option<PathBuf>,
    /// Master seed; stages derive their own from it
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Skip malformed records instead of aborting
    #[arg(long, global = true)]
    pub lenient: bool,
    /// Longest n-gram, 1 to 3
    #[arg(long, global = true)]
    pub ngram_max: Option<usize>,
    /// Minimum document frequency of a feature
    #[arg(long, global = true)]
    pub min_df: Option<usize>,
    /// Retained SVD dimensions
    #[arg(long, global = true)]
    pub svd_rank: Option<usize>,
    /// Number of K-Means clusters
    #[arg(long = "k", global = true)]
    pub kmeans_k: Option<usize>,
    /// K-Means restarts; the lowest inertia wins
    #[arg(long = "restarts", global = true)]
    pub kmeans_restarts: Option<usize>,
    /// t-SNE target perplexity
    #[arg(long, global = true)]
    pub perplexity: Option<f64>,
    /// t-SNE step size
    #[arg(long, global = true)]
    pub learning_rate: Option<f64>,
    /// t-SNE iterations
    #[arg(long, global = true)]
    pub n_iter: Option<usize>,
    /// Factor applied to P during early iterations
    #[arg(long, global = true)]
    pub early_exaggeration: Option<f64>,
    /// Iterations with exaggerated P
    #[arg(long, global = true)]
    pub exaggeration_iters: Option<usize>,
    /// Momentum while exaggerating
    #[arg(long, global = true)]
    pub momentum_early: Option<f64>,
    /// Momentum afterwards
    #[arg(long, global = true)]
    pub momentum_late: Option<f64>,
    /// Rows in the report's n-gram table
    #[arg(long, global = true)]
    pub top_k: Option<usize>,
    /// Sentiment lexicon (token TAB valence)
    #[arg(long = "lexicon", global = true)]
    pub lexicon_path: Option<PathBuf>,
    /// Stopword list, one per line
    #[arg(long = "stopwords", global = true)]
    pub stopwords_path: Option<PathBuf>,
    /// Lemmatizer exceptions and suffix rules
    #[arg(long = "lemma-rules", global = true)]
    pub lemma_rules_path: Option<PathBuf>,
    /// NAME=PHRASE[;PHRASE...], replaces a topic of the same name
    #[arg(long = "topic", global = true, value_parser = parse_topic)]
    pub topics: Vec<(String, Vec<String>)>,
}

fn parse_topic(s: &str) -> Result<(String, Vec<String>), String> {
    let (name, phrases) = s
        .split_once('=')
        .ok_or("expected NAME=PHRASE[;PHRASE...]")?;
    let terms: Vec<String> = phrases
        .split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect();
    if terms.is_empty() {
        return Err(format!("topic {name:?} has no phrases"));
    }
    Ok((name.trim().to_owned(), terms))
}

impl Overrides {
    pub fn apply(&self, config: &mut PipelineConfig) {
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = &self.$field {
                    config.$field = v.clone();
                })*
            };
        }
        set!(
            input_path,
            output_dir,
            seed,
            ngram_max,
            min_df,
            svd_rank,
            kmeans_k,
            kmeans_restarts,
            perplexity,
            learning_rate,
            n_iter,
            early_exaggeration,
            exaggeration_iters,
            momentum_early,
            momentum_late,
            top_k
        );
        for (field, value) in [
            (&mut config.lexicon_path, &self.lexicon_path),
            (&mut config.stopwords_path, &self.stopwords_path),
            (&mut config.lemma_rules_path, &self.lemma_rules_path),
        ] {
            if value.is_some() {
                field.clone_from(value);
            }
        }
        if self.lenient {
            config.strict = false;
        }
        for (name, terms) in &self.topics {
            config.topics.insert(
                name.clone(),
                TopicTerms {
                    terms: terms.clone(),
                },
            );
        }
    }
}

pub fn resolve_config(overrides: &Overrides) -> Result<PipelineConfig, PipelineError> {
    let mut config = match &overrides.config {
        Some(path) => PipelineConfig::from_toml_file(path)?,
        None => PipelineConfig::default(),
    };
    overrides.apply(&mut config);
    config.validate()?;
    Ok(config)
}

pub fn execute(command: Command, config: &PipelineConfig) -> Result<String, PipelineError> {
    let artifacts = match command {
        Command::Map => run_map(config)?,
        Command::Sentiment => run_sentiment(config)?,
        Command::Report => run_report(config)?,
        Command::All => run_all(config)?,
    };
    Ok(manifest(config, &artifacts))
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status: 0 success, 1 internal error, 2 invalid input or config.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match resolve_config(&cli.overrides).and_then(|c| execute(cli.command, &c)) {
        Ok(manifest) => {
            print!("{manifest}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
