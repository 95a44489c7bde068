//! End-to-end runs: the interest-map branch, the sentiment branch and the
//! plain-text report, driven by one configuration and one master seed.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analytics::{
    self, corpus_breakdown, keyterm_shares, sentiment_by_year, sentiment_evolution,
    tweets_per_year, whole_percent, AnalyticsError, SentimentBreakdown,
};
use crate::cluster::{best_of_restarts, ClusterError, KMeansConfig};
use crate::corpus::{deduplicate, keyterm_counts, load_corpus, Corpus, CorpusError, LoadMode};
use crate::decompose::{reduce, truncated_svd, SvdConfig, SvdError};
use crate::embed::{tsne, EmbedError, TsneConfig};
use crate::features::{build_matrix, build_vocabulary, FeatureError};
use crate::sentiment::{score_corpus, SentimentError, SentimentLexicon};
use crate::svg::{render_map, SvgStyle};
use crate::textprep::{english_stopwords, load_stopwords, LemmaRules, RulesError, TextPipeline};

pub const VOCABULARY_FILE: &str = "vocabulary.tsv";
pub const CLUSTERS_FILE: &str = "clusters.tsv";
pub const EMBEDDING_FILE: &str = "embedding.tsv";
pub const MAP_FILE: &str = "map.jsonl";
pub const MAP_SVG_FILE: &str = "map.svg";
pub const SCORES_FILE: &str = "scores.csv";
pub const BREAKDOWN_FILE: &str = "breakdown.csv";
pub const KEYTERMS_FILE: &str = "keyterms.csv";
pub const YEARLY_COUNTS_FILE: &str = "tweets_per_year.csv";
pub const YEARLY_SENTIMENT_FILE: &str = "sentiment_per_year.csv";
pub const REPORT_FILE: &str = "report.txt";

pub fn topic_file(name: &str) -> String {
    format!("topic_{name}.csv")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopicTerms {
    pub terms: Vec<String>,
}

/// Every knob of a run. Loaded from TOML: flat `key = value` lines plus one
/// `[topics.<name>]` table per topic with a `terms` array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub input_path: PathBuf,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Abort on the first malformed record instead of skipping it.
    pub strict: bool,
    pub ngram_max: usize,
    pub min_df: usize,
    /// Capped at min(features, documents) − 1 at run time.
    pub svd_rank: usize,
    pub kmeans_k: usize,
    pub kmeans_restarts: usize,
    pub perplexity: f64,
    pub learning_rate: f64,
    pub n_iter: usize,
    pub early_exaggeration: f64,
    pub exaggeration_iters: usize,
    pub momentum_early: f64,
    pub momentum_late: f64,
    /// Rows of the n-gram table in the report.
    pub top_k: usize,
    /// Bundled data is used when a path is unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lexicon_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stopwords_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemma_rules_path: Option<PathBuf>,
    pub topics: BTreeMap<String, TopicTerms>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let tsne = TsneConfig::default();
        Self {
            input_path: PathBuf::new(),
            output_dir: PathBuf::from("out"),
            seed: 42,
            strict: true,
            ngram_max: 3,
            min_df: 5,
            svd_rank: 50,
            kmeans_k: 12,
            kmeans_restarts: 10,
            perplexity: tsne.perplexity,
            learning_rate: tsne.learning_rate,
            n_iter: tsne.n_iter,
            early_exaggeration: tsne.early_exaggeration,
            exaggeration_iters: tsne.exaggeration_iters,
            momentum_early: tsne.momentum_early,
            momentum_late: tsne.momentum_late,
            top_k: 20,
            lexicon_path: None,
            stopwords_path: None,
            lemma_rules_path: None,
            topics: BTreeMap::new(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))
    }

    /// Relative paths inside the file are taken relative to the file's directory.
    pub fn from_toml_file(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let raw: toml::Table = toml::from_str(&text)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let mut config = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() && !p.as_os_str().is_empty() {
                *p = base.join(&*p);
            }
        };
        rebase(&mut config.input_path);
        if raw.contains_key("output_dir") {
            rebase(&mut config.output_dir);
        }
        for p in [
            &mut config.lexicon_path,
            &mut config.stopwords_path,
            &mut config.lemma_rules_path,
        ]
        .into_iter()
        .flatten()
        {
            rebase(p);
        }
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn tsne(&self) -> TsneConfig {
        TsneConfig {
            perplexity: self.perplexity,
            learning_rate: self.learning_rate,
            n_iter: self.n_iter,
            early_exaggeration: self.early_exaggeration,
            exaggeration_iters: self.exaggeration_iters,
            momentum_early: self.momentum_early,
            momentum_late: self.momentum_late,
            seed: self.seed.wrapping_add(2),
        }
    }

    pub fn svd(&self) -> SvdConfig {
        SvdConfig {
            seed: self.seed,
            ..SvdConfig::default()
        }
    }

    pub fn kmeans(&self) -> KMeansConfig {
        KMeansConfig::new(self.kmeans_k, self.seed.wrapping_add(1))
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::Config(m.to_owned()));
        if self.input_path.as_os_str().is_empty() {
            return bad("input_path is required");
        }
        if self.output_dir.as_os_str().is_empty() {
            return bad("output_dir must not be empty");
        }
        if !(1..=3).contains(&self.ngram_max) {
            return bad("ngram_max must be 1, 2 or 3");
        }
        for (name, v) in [
            ("min_df", self.min_df),
            ("svd_rank", self.svd_rank),
            ("kmeans_k", self.kmeans_k),
            ("kmeans_restarts", self.kmeans_restarts),
            ("top_k", self.top_k),
        ] {
            if v == 0 {
                return Err(PipelineError::Config(format!("{name} must be positive")));
            }
        }
        self.tsne()
            .validate(usize::MAX)
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        for (name, topic) in &self.topics {
            if name.is_empty()
                || !name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
            {
                return Err(PipelineError::Config(format!(
                    "topic name {name:?} must be non-empty ASCII letters, digits, '_' or '-'"
                )));
            }
            if topic
                .terms
                .iter()
                .all(|t| crate::textprep::clean(t).is_empty())
            {
                return Err(PipelineError::Config(format!(
                    "topic {name:?} has no usable terms"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Corpus,
    Textprep,
    Features,
    Decompose,
    Cluster,
    Embed,
    Sentiment,
    Analytics,
    Map,
    Report,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Corpus => "corpus",
            Stage::Textprep => "textprep",
            Stage::Features => "features",
            Stage::Decompose => "decompose",
            Stage::Cluster => "cluster",
            Stage::Embed => "embed",
            Stage::Sentiment => "sentiment",
            Stage::Analytics => "analytics",
            Stage::Map => "map",
            Stage::Report => "report",
        })
    }
}

#[derive(Debug, Error)]
pub enum StageError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Rules(#[from] RulesError),
    #[error(transparent)]
    Features(#[from] FeatureError),
    #[error(transparent)]
    Svd(#[from] SvdError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Sentiment(#[from] SentimentError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
}

impl StageError {
    /// Whether the failure traces back to the input data or configuration
    /// rather than to the numerics or the environment.
    fn is_invalid_input(&self) -> bool {
        match self {
            StageError::Corpus(e) => !matches!(e, CorpusError::Io { .. }),
            StageError::Rules(_) => true,
            StageError::Features(_) => true,
            StageError::Svd(e) => !matches!(e, SvdError::ConvergenceFailure { .. }),
            StageError::Cluster(e) => !matches!(e, ClusterError::NonFinite),
            StageError::Embed(e) => !matches!(
                e,
                EmbedError::NumericalOverflow { .. } | EmbedError::NonFinite
            ),
            StageError::Sentiment(e) => !matches!(e, SentimentError::OutOfRange(_)),
            StageError::Analytics(e) => matches!(e, AnalyticsError::NoTopicTerms),
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: StageError,
    },
    #[error("missing {} from the {stage} stage; run it first", path.display())]
    MissingArtifact { stage: Stage, path: PathBuf },
    #[error("malformed artifact {}: {reason}", path.display())]
    CorruptArtifact { path: PathBuf, reason: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl PipelineError {
    /// 2 for invalid input or configuration, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::MissingArtifact { .. } => 2,
            PipelineError::Stage { source, .. } if source.is_invalid_input() => 2,
            _ => 1,
        }
    }

    pub fn stage(&self) -> Option<Stage> {
        match self {
            PipelineError::Stage { stage, .. } | PipelineError::MissingArtifact { stage, .. } => {
                Some(*stage)
            }
            _ => None,
        }
    }
}

fn at<T, E: Into<StageError>>(stage: Stage, r: Result<T, E>) -> Result<T, PipelineError> {
    r.map_err(|e| PipelineError::Stage {
        stage,
        source: e.into(),
    })
}

/// A file written by a run, named relative to the output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub sha256: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Writes through a temporary file and a rename so a failed run never leaves
/// a half-written artifact behind.
fn write_artifact(dir: &Path, name: &str, bytes: &[u8]) -> Result<Artifact, PipelineError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| PipelineError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, &target).map_err(io_err(&target))?;
    Ok(Artifact {
        name: name.to_owned(),
        sha256: sha256_hex(bytes),
    })
}

fn render<F: FnOnce(&mut Vec<u8>) -> io::Result<()>>(f: F) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory cannot fail");
    buf
}

/// Config echo followed by one `sha256  name` line per artifact.
pub fn manifest(config: &PipelineConfig, artifacts: &[Artifact]) -> String {
    let mut out = String::from("# configuration\n");
    out.push_str(&config.to_toml());
    out.push_str("\n# artifacts\n");
    for a in artifacts {
        out.push_str(&format!("{}  {}\n", a.sha256, a.name));
    }
    out
}

/// Loads and deduplicates the input; load and dedup statistics go to stderr.
pub fn prepare_corpus(config: &PipelineConfig) -> Result<Corpus, PipelineError> {
    let mode = if config.strict {
        LoadMode::Strict
    } else {
        LoadMode::Lenient
    };
    let outcome = at(Stage::Corpus, load_corpus(&config.input_path, mode))?;
    let loaded = outcome.corpus.len();
    let corpus = deduplicate(&outcome.corpus);
    eprintln!(
        "corpus: {loaded} records loaded, {} skipped, {} undated; {} duplicates removed, {} kept",
        outcome.skipped.len(),
        outcome.undated,
        loaded - corpus.len(),
        corpus.len()
    );
    for (line, reason) in &outcome.skipped {
        eprintln!("  skipped line {line}: {reason}");
    }
    Ok(corpus)
}

fn text_pipeline(config: &PipelineConfig) -> Result<TextPipeline, PipelineError> {
    let rules = match &config.lemma_rules_path {
        Some(p) => at(Stage::Textprep, LemmaRules::from_file(p))?,
        None => LemmaRules::english(),
    };
    let stopwords = match &config.stopwords_path {
        Some(p) => at(Stage::Textprep, load_stopwords(p))?,
        None => english_stopwords(),
    };
    Ok(TextPipeline { rules, stopwords })
}

fn lexicon(config: &PipelineConfig) -> Result<SentimentLexicon, PipelineError> {
    match &config.lexicon_path {
        Some(p) => at(Stage::Sentiment, SentimentLexicon::from_file(p)),
        None => Ok(SentimentLexicon::vader()),
    }
}

/// corpus → textprep → features → decompose → cluster → embed → map.
pub fn run_map(config: &PipelineConfig) -> Result<Vec<Artifact>, PipelineError> {
    config.validate()?;
    let corpus = prepare_corpus(config)?;
    let docs = text_pipeline(config)?.process_corpus(&corpus);
    let vocab = at(
        Stage::Features,
        build_vocabulary(&docs, config.ngram_max, config.min_df),
    )?;
    let matrix = build_matrix(&docs, &vocab);
    let max_rank = matrix
        .n_rows()
        .min(matrix.n_cols())
        .saturating_sub(1)
        .max(1);
    let rank = config.svd_rank.min(max_rank);
    let svd = at(
        Stage::Decompose,
        truncated_svd(&matrix, rank, &config.svd()),
    )?;
    let points = reduce(&svd);
    let clusters = at(
        Stage::Cluster,
        best_of_restarts(&points, &config.kmeans(), config.kmeans_restarts),
    )?;
    let embedding = at(Stage::Embed, tsne(&points, &config.tsne()))?;
    let map = at(
        Stage::Analytics,
        analytics::assemble_map(&vocab, &embedding, &clusters),
    )?;
    eprintln!(
        "map: {} features x {} documents, rank {rank}, k {}, final KL {:.4}",
        matrix.n_rows(),
        matrix.n_cols(),
        clusters.k,
        embedding.final_kl
    );

    let labels: Vec<String> = vocab.entries().iter().map(|e| e.surface()).collect();
    let dir = &config.output_dir;
    Ok(vec![
        write_artifact(dir, VOCABULARY_FILE, &render(|w| vocab.write_tsv(w)))?,
        write_artifact(
            dir,
            CLUSTERS_FILE,
            &render(|w| clusters.write_tsv(&labels, w)),
        )?,
        write_artifact(
            dir,
            EMBEDDING_FILE,
            &render(|w| embedding.write_tsv(&labels, w)),
        )?,
        write_artifact(dir, MAP_FILE, &render(|w| map.write_jsonl(w)))?,
        write_artifact(
            dir,
            MAP_SVG_FILE,
            render_map(&map, &SvgStyle::default()).as_bytes(),
        )?,
    ])
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn breakdown_csv(b: &SentimentBreakdown, count: usize) -> Vec<u8> {
    format!(
        "neg_share,neu_share,pos_share,count\n{},{},{},{count}\n",
        b.share_negative, b.share_neutral, b.share_positive
    )
    .into_bytes()
}

/// corpus → sentiment → analytics.
pub fn run_sentiment(config: &PipelineConfig) -> Result<Vec<Artifact>, PipelineError> {
    config.validate()?;
    let corpus = prepare_corpus(config)?;
    let lex = lexicon(config)?;
    let scores = score_corpus(&corpus, &lex);
    let breakdown = at(Stage::Analytics, corpus_breakdown(&scores))?;
    let counts = keyterm_counts(&corpus);
    let shares = at(Stage::Analytics, keyterm_shares(&counts))?;
    let yearly = tweets_per_year(&corpus);
    let yearly_sentiment = at(Stage::Analytics, sentiment_by_year(corpus.iter(), &scores))?;
    let mut topics = Vec::new();
    for (name, topic) in &config.topics {
        let rows = at(
            Stage::Analytics,
            sentiment_evolution(&corpus, &scores, &topic.terms),
        )?;
        topics.push((name, rows));
    }
    eprintln!(
        "sentiment: {} documents, {}",
        scores.len(),
        breakdown.describe()
    );

    let dir = &config.output_dir;
    let scores_csv = render(|w| {
        writeln!(w, "id,negative,neutral,positive,compound,label")?;
        for (id, s) in &scores {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                csv_field(id),
                s.negative,
                s.neutral,
                s.positive,
                s.compound,
                s.label
            )?;
        }
        Ok(())
    });
    let keyterms_csv = render(|w| {
        writeln!(w, "query,count,share")?;
        for (q, c) in &counts {
            writeln!(w, "{},{c},{}", csv_field(q), shares[q])?;
        }
        Ok(())
    });
    let mut artifacts = vec![
        write_artifact(dir, SCORES_FILE, &scores_csv)?,
        write_artifact(
            dir,
            BREAKDOWN_FILE,
            &breakdown_csv(&breakdown, scores.len()),
        )?,
        write_artifact(dir, KEYTERMS_FILE, &keyterms_csv)?,
        write_artifact(dir, YEARLY_COUNTS_FILE, &render(|w| yearly.write_csv(w)))?,
        write_artifact(
            dir,
            YEARLY_SENTIMENT_FILE,
            &render(|w| analytics::write_evolution_csv(&yearly_sentiment, w)),
        )?,
    ];
    for (name, rows) in topics {
        artifacts.push(write_artifact(
            dir,
            &topic_file(name),
            &render(|w| analytics::write_evolution_csv(&rows, w)),
        )?);
    }
    Ok(artifacts)
}

fn read_artifact(dir: &Path, name: &str, stage: Stage) -> Result<String, PipelineError> {
    let path = dir.join(name);
    match fs::read_to_string(&path) {
        Ok(s) => Ok(s),
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            Err(PipelineError::MissingArtifact { stage, path })
        }
        Err(source) => Err(PipelineError::Io { path, source }),
    }
}

/// Parses comma-separated rows after the header, requiring `width` fields.
fn csv_rows(text: &str, width: usize, path: &Path) -> Result<Vec<Vec<String>>, PipelineError> {
    text.lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|line| {
            let fields = split_csv_line(line);
            if fields.len() == width {
                Ok(fields)
            } else {
                Err(PipelineError::CorruptArtifact {
                    path: path.to_path_buf(),
                    reason: format!("expected {width} fields in {line:?}"),
                })
            }
        })
        .collect()
}

fn split_csv_line(line: &str) -> Vec<String> {
    let mut fields = vec![String::new()];
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match (c, quoted) {
            ('"', true) if chars.peek() == Some(&'"') => {
                chars.next();
                fields.last_mut().unwrap().push('"');
            }
            ('"', _) => quoted = !quoted,
            (',', false) => fields.push(String::new()),
            _ => fields.last_mut().unwrap().push(c),
        }
    }
    fields
}

fn parse_num<T: std::str::FromStr>(s: &str, path: &Path) -> Result<T, PipelineError> {
    s.parse().map_err(|_| PipelineError::CorruptArtifact {
        path: path.to_path_buf(),
        reason: format!("bad number {s:?}"),
    })
}

/// One line per topic: document count, covered years and the positive share
/// at both ends of the series.
pub fn topic_trend(name: &str, rows: &[(i32, f64, usize)]) -> String {
    let total: usize = rows.iter().map(|r| r.2).sum();
    match (rows.first(), rows.last()) {
        (Some(first), Some(last)) if first.0 != last.0 => format!(
            "{name}: {total} documents {}-{}, positive share {}% -> {}%",
            first.0,
            last.0,
            whole_percent(first.1),
            whole_percent(last.1)
        ),
        (Some(only), _) => format!(
            "{name}: {total} documents in {}, positive share {}%",
            only.0,
            whole_percent(only.1)
        ),
        _ => format!("{name}: no dated matching documents"),
    }
}

/// Summarises the artifacts of earlier `map` and `sentiment` runs.
pub fn run_report(config: &PipelineConfig) -> Result<Vec<Artifact>, PipelineError> {
    config.validate()?;
    let dir = &config.output_dir;
    let vocab_text = read_artifact(dir, VOCABULARY_FILE, Stage::Map)?;
    let breakdown_text = read_artifact(dir, BREAKDOWN_FILE, Stage::Sentiment)?;
    let keyterms_text = read_artifact(dir, KEYTERMS_FILE, Stage::Sentiment)?;
    let mut topic_texts = Vec::new();
    for name in config.topics.keys() {
        topic_texts.push((
            name,
            read_artifact(dir, &topic_file(name), Stage::Sentiment)?,
        ));
    }

    let vocab_path = dir.join(VOCABULARY_FILE);
    let mut vocab_rows = Vec::new();
    for line in vocab_text.lines().filter(|l| !l.is_empty()) {
        let (surface, df) =
            line.rsplit_once('\t')
                .ok_or_else(|| PipelineError::CorruptArtifact {
                    path: vocab_path.clone(),
                    reason: format!("expected surface<TAB>df in {line:?}"),
                })?;
        vocab_rows.push((surface.to_owned(), parse_num::<usize>(df, &vocab_path)?));
    }

    let breakdown_path = dir.join(BREAKDOWN_FILE);
    let row = csv_rows(&breakdown_text, 4, &breakdown_path)?;
    let row = row.first().ok_or_else(|| PipelineError::CorruptArtifact {
        path: breakdown_path.clone(),
        reason: "no data row".into(),
    })?;
    let breakdown = SentimentBreakdown {
        share_negative: parse_num(&row[0], &breakdown_path)?,
        share_neutral: parse_num(&row[1], &breakdown_path)?,
        share_positive: parse_num(&row[2], &breakdown_path)?,
    };
    let n_docs: usize = parse_num(&row[3], &breakdown_path)?;

    let keyterms_path = dir.join(KEYTERMS_FILE);
    let mut keyterms = Vec::new();
    for r in csv_rows(&keyterms_text, 3, &keyterms_path)? {
        let count: usize = parse_num(&r[1], &keyterms_path)?;
        let share: f64 = parse_num(&r[2], &keyterms_path)?;
        keyterms.push((r[0].clone(), count, share));
    }
    keyterms.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let mut out = String::new();
    out.push_str(&format!("Interest map: {} features\n\n", vocab_rows.len()));
    out.push_str(&format!(
        "Top {} n-grams by document frequency\n",
        config.top_k.min(vocab_rows.len())
    ));
    let width = vocab_rows
        .iter()
        .take(config.top_k)
        .map(|r| r.0.len())
        .max()
        .unwrap_or(0);
    for (i, (surface, df)) in vocab_rows.iter().take(config.top_k).enumerate() {
        out.push_str(&format!("{:>4}  {surface:<width$}  {df}\n", i + 1));
    }
    out.push_str("\nKey-term shares\n");
    let width = keyterms.iter().map(|k| k.0.len()).max().unwrap_or(0);
    for (q, count, share) in &keyterms {
        out.push_str(&format!(
            "  {q:<width$}  {:>3}%  ({count})\n",
            whole_percent(*share)
        ));
    }
    out.push_str(&format!(
        "\nSentiment over {n_docs} documents: {}\n",
        breakdown.describe()
    ));
    if !topic_texts.is_empty() {
        out.push_str("\nTopics\n");
    }
    for (name, text) in &topic_texts {
        let path = dir.join(topic_file(name));
        let mut rows = Vec::new();
        for r in csv_rows(text, 5, &path)? {
            rows.push((
                parse_num::<i32>(&r[0], &path)?,
                parse_num::<f64>(&r[3], &path)?,
                parse_num::<usize>(&r[4], &path)?,
            ));
        }
        out.push_str(&format!("  {}\n", topic_trend(name, &rows)));
    }
    Ok(vec![write_artifact(dir, REPORT_FILE, out.as_bytes())?])
}

/// `run_map`, `run_sentiment`, then `run_report`.
pub fn run_all(config: &PipelineConfig) -> Result<Vec<Artifact>, PipelineError> {
    let mut artifacts = run_map(config)?;
    artifacts.extend(run_sentiment(config)?);
    artifacts.extend(run_report(config)?);
    Ok(artifacts)
}
