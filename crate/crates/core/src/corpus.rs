//! Document ingestion: line-delimited JSON records, validation, retweet-aware
//! deduplication and per-query entry counts.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::LazyLock;

use chrono::{DateTime, Datelike, SecondsFormat, Utc};
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("corpus contains no valid records")]
    EmptyCorpus,
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// How malformed input lines are treated by [`load_corpus`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadMode {
    /// The first malformed line aborts the load.
    Strict,
    /// Malformed lines are skipped and counted; undated records are kept with an unknown year.
    Lenient,
}

/// One tweet-like record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    /// `None` only for records admitted in lenient mode without a usable timestamp.
    pub created_at: Option<DateTime<Utc>>,
    pub text: String,
    pub query: String,
}

impl Document {
    pub fn year(&self) -> Option<i32> {
        self.created_at.map(|t| t.year())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub source_path: String,
}

impl Corpus {
    pub fn new(documents: Vec<Document>, source_path: impl Into<String>) -> Self {
        Self {
            documents,
            source_path: source_path.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Document> {
        self.documents.iter()
    }

    /// Writes the corpus in the same line-delimited layout [`load_corpus`] reads.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for doc in &self.documents {
            let record = RawRecord {
                id: Some(doc.id.clone()),
                created_at: doc
                    .created_at
                    .map(|t| t.to_rfc3339_opts(SecondsFormat::AutoSi, true)),
                text: Some(doc.text.clone()),
                query: Some(doc.query.clone()),
            };
            serde_json::to_writer(&mut out, &record)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Result of a load: the corpus plus what lenient mode had to drop or patch.
#[derive(Debug, Clone)]
pub struct LoadOutcome {
    pub corpus: Corpus,
    /// (1-based line number, reason) for every skipped line.
    pub skipped: Vec<(usize, String)>,
    /// Records kept without a usable timestamp.
    pub undated: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawRecord {
    id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    created_at: Option<String>,
    text: Option<String>,
    query: Option<String>,
}

enum LineError {
    Fatal(String),
    MissingDate(Document, String),
}

fn parse_line(line: &str) -> Result<Document, LineError> {
    let raw: RawRecord =
        serde_json::from_str(line).map_err(|e| LineError::Fatal(format!("invalid record: {e}")))?;
    let id = raw
        .id
        .filter(|s| !s.is_empty())
        .ok_or_else(|| LineError::Fatal("missing or empty \"id\"".into()))?;
    let text = raw
        .text
        .filter(|s| !s.trim().is_empty())
        .ok_or_else(|| LineError::Fatal("missing or blank \"text\"".into()))?;
    let query = raw
        .query
        .filter(|s| !s.trim().is_empty())
        .ok_or_else(|| LineError::Fatal("missing or empty \"query\"".into()))?;
    let mut doc = Document {
        id,
        created_at: None,
        text,
        query,
    };
    match raw.created_at {
        None => Err(LineError::MissingDate(doc, "missing \"created_at\"".into())),
        Some(s) => match DateTime::parse_from_rfc3339(&s) {
            Ok(t) => {
                doc.created_at = Some(t.with_timezone(&Utc));
                Ok(doc)
            }
            Err(e) => Err(LineError::MissingDate(
                doc,
                format!("unparseable \"created_at\" {s:?}: {e}"),
            )),
        },
    }
}

/// Parses line-delimited records from any reader. Blank lines are ignored.
pub fn read_corpus<R: BufRead>(
    reader: R,
    source: &str,
    mode: LoadMode,
) -> Result<LoadOutcome, CorpusError> {
    let mut documents = Vec::new();
    let mut seen_ids = HashSet::new();
    let mut skipped = Vec::new();
    let mut undated = 0;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let doc = match parse_line(&line) {
            Ok(doc) => doc,
            Err(LineError::MissingDate(doc, _)) if mode == LoadMode::Lenient => {
                undated += 1;
                doc
            }
            Err(LineError::Fatal(reason)) | Err(LineError::MissingDate(_, reason)) => {
                if mode == LoadMode::Strict {
                    return Err(CorpusError::Parse {
                        line: line_no,
                        reason,
                    });
                }
                skipped.push((line_no, reason));
                continue;
            }
        };
        if !seen_ids.insert(doc.id.clone()) {
            let reason = format!("duplicate id {:?}", doc.id);
            if mode == LoadMode::Strict {
                return Err(CorpusError::Parse {
                    line: line_no,
                    reason,
                });
            }
            if doc.created_at.is_none() {
                undated -= 1;
            }
            skipped.push((line_no, reason));
            continue;
        }
        documents.push(doc);
    }

    if documents.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    Ok(LoadOutcome {
        corpus: Corpus::new(documents, source),
        skipped,
        undated,
    })
}

pub fn load_corpus(path: impl AsRef<Path>, mode: LoadMode) -> Result<LoadOutcome, CorpusError> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => CorpusError::FileNotFound(path.to_path_buf()),
        _ => CorpusError::Io(e),
    })?;
    read_corpus(BufReader::new(file), &path.display().to_string(), mode)
}

static RETWEET_PREFIX: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^rt\s+@\w+:?\s*").expect("valid regex"));

/// Key under which two texts count as the same entry: NFC, lowercased, leading
/// `RT @handle:` prefixes removed, whitespace runs folded to one space.
pub fn dedup_key(text: &str) -> String {
    let mut key: String = text.nfc().collect::<String>().to_lowercase();
    key = key.split_whitespace().collect::<Vec<_>>().join(" ");
    while let Some(m) = RETWEET_PREFIX.find(&key) {
        key = key[m.end()..].to_string();
    }
    key
}

/// Keeps the first document for every dedup key, preserving order.
pub fn deduplicate(corpus: &Corpus) -> Corpus {
    let mut seen = HashSet::with_capacity(corpus.len());
    let documents = corpus
        .documents
        .iter()
        .filter(|d| seen.insert(dedup_key(&d.text)))
        .cloned()
        .collect();
    Corpus::new(documents, corpus.source_path.clone())
}

pub fn keyterm_counts(corpus: &Corpus) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for doc in &corpus.documents {
        *counts.entry(doc.query.clone()).or_insert(0) += 1;
    }
    counts
}
