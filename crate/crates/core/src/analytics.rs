//! Aggregations over the corpus and its scores: yearly volume, key-term shares,
//! topic sub-corpora and their sentiment over time, and the interest map join.

use std::collections::{BTreeMap, HashMap};
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::ClusterModel;
use crate::corpus::{Corpus, Document};
use crate::embed::Embedding2D;
use crate::features::Vocabulary;
use crate::sentiment::{Label, SentimentScore};
use crate::textprep::clean;

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticsError {
    #[error("no score for document {0:?}")]
    MissingScore(String),
    #[error("nothing to aggregate")]
    EmptyInput,
    #[error("topic has no search phrases")]
    NoTopicTerms,
    #[error("size mismatch: vocabulary {vocab}, embedding {embedding}, clusters {clusters}")]
    SizeMismatch {
        vocab: usize,
        embedding: usize,
        clusters: usize,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct YearSeries {
    /// Strictly increasing years.
    pub entries: Vec<(i32, usize)>,
    /// Documents without a timestamp.
    pub unknown: usize,
}

impl YearSeries {
    pub fn total(&self) -> usize {
        self.entries.iter().map(|(_, c)| c).sum::<usize>() + self.unknown
    }

    /// `year,count` with a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "year,count")?;
        for (y, c) in &self.entries {
            writeln!(out, "{y},{c}")?;
        }
        Ok(())
    }
}

pub fn tweets_per_year(corpus: &Corpus) -> YearSeries {
    let mut by_year = BTreeMap::new();
    let mut unknown = 0;
    for doc in corpus.iter() {
        match doc.year() {
            Some(y) => *by_year.entry(y).or_insert(0) += 1,
            None => unknown += 1,
        }
    }
    YearSeries {
        entries: by_year.into_iter().collect(),
        unknown,
    }
}

pub fn keyterm_shares(
    counts: &BTreeMap<String, usize>,
) -> Result<BTreeMap<String, f64>, AnalyticsError> {
    let total: usize = counts.values().sum();
    if total == 0 {
        return Err(AnalyticsError::EmptyInput);
    }
    Ok(counts
        .iter()
        .map(|(k, &c)| (k.clone(), c as f64 / total as f64))
        .collect())
}

/// Rounds a share in [0, 1] to a whole percentage for display.
pub fn whole_percent(share: f64) -> u32 {
    (share * 100.0).round() as u32
}

fn cleaned_phrases(terms: &[String]) -> Vec<String> {
    terms
        .iter()
        .map(|t| clean(t))
        .filter(|t| !t.is_empty())
        .collect()
}

fn matches(doc: &Document, phrases: &[String]) -> bool {
    let text = clean(&doc.text);
    phrases.iter().any(|p| text.contains(p.as_str()))
}

/// Documents whose cleaned text contains any of the phrases (case-insensitive,
/// whitespace-normalized substring match), in corpus order.
pub fn topic_filter(corpus: &Corpus, topic_terms: &[String]) -> Result<Corpus, AnalyticsError> {
    let phrases = cleaned_phrases(topic_terms);
    if phrases.is_empty() {
        return Err(AnalyticsError::NoTopicTerms);
    }
    let documents = corpus
        .iter()
        .filter(|d| matches(d, &phrases))
        .cloned()
        .collect();
    Ok(Corpus::new(documents, corpus.source_path.clone()))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SentimentBreakdown {
    pub share_negative: f64,
    pub share_neutral: f64,
    pub share_positive: f64,
}

impl SentimentBreakdown {
    pub fn from_labels<I: IntoIterator<Item = Label>>(labels: I) -> Result<Self, AnalyticsError> {
        let mut counts = [0usize; 3];
        for l in labels {
            counts[match l {
                Label::Negative => 0,
                Label::Neutral => 1,
                Label::Positive => 2,
            }] += 1;
        }
        let n: usize = counts.iter().sum();
        if n == 0 {
            return Err(AnalyticsError::EmptyInput);
        }
        let n = n as f64;
        Ok(Self {
            share_negative: counts[0] as f64 / n,
            share_neutral: counts[1] as f64 / n,
            share_positive: counts[2] as f64 / n,
        })
    }

    /// "7% negative, 48% neutral, 45% positive".
    pub fn describe(&self) -> String {
        format!(
            "{}% negative, {}% neutral, {}% positive",
            whole_percent(self.share_negative),
            whole_percent(self.share_neutral),
            whole_percent(self.share_positive)
        )
    }
}

pub fn corpus_breakdown(
    scores: &[(String, SentimentScore)],
) -> Result<SentimentBreakdown, AnalyticsError> {
    SentimentBreakdown::from_labels(scores.iter().map(|(_, s)| s.label))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YearSentiment {
    pub year: i32,
    pub breakdown: SentimentBreakdown,
    pub count: usize,
}

pub fn write_evolution_csv<W: Write>(rows: &[YearSentiment], mut out: W) -> io::Result<()> {
    writeln!(out, "year,neg_share,neu_share,pos_share,count")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.year,
            r.breakdown.share_negative,
            r.breakdown.share_neutral,
            r.breakdown.share_positive,
            r.count
        )?;
    }
    Ok(())
}

/// Per-year label shares of the given documents; undated documents and empty
/// years are left out.
pub fn sentiment_by_year<'a, I>(
    docs: I,
    scores: &[(String, SentimentScore)],
) -> Result<Vec<YearSentiment>, AnalyticsError>
where
    I: IntoIterator<Item = &'a Document>,
{
    let index: HashMap<&str, Label> = scores
        .iter()
        .map(|(id, s)| (id.as_str(), s.label))
        .collect();
    let mut by_year: BTreeMap<i32, Vec<Label>> = BTreeMap::new();
    for doc in docs {
        let label = *index
            .get(doc.id.as_str())
            .ok_or_else(|| AnalyticsError::MissingScore(doc.id.clone()))?;
        if let Some(y) = doc.year() {
            by_year.entry(y).or_default().push(label);
        }
    }
    by_year
        .into_iter()
        .map(|(year, labels)| {
            Ok(YearSentiment {
                year,
                count: labels.len(),
                breakdown: SentimentBreakdown::from_labels(labels)?,
            })
        })
        .collect()
}

pub fn sentiment_evolution(
    corpus: &Corpus,
    scores: &[(String, SentimentScore)],
    topic_terms: &[String],
) -> Result<Vec<YearSentiment>, AnalyticsError> {
    let sub = topic_filter(corpus, topic_terms)?;
    sentiment_by_year(sub.iter(), scores)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapPoint {
    pub surface: String,
    pub x: f64,
    pub y: f64,
    pub cluster: usize,
    /// Marker size for renderers.
    pub df: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InterestMap {
    pub points: Vec<MapPoint>,
}

impl InterestMap {
    /// One JSON object per line with fields surface, x, y, cluster, df.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for p in &self.points {
            serde_json::to_writer(&mut out, p)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl(text: &str) -> Result<Self, serde_json::Error> {
        let points = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<_, _>>()?;
        Ok(Self { points })
    }

    pub fn n_clusters(&self) -> usize {
        self.points.iter().map(|p| p.cluster + 1).max().unwrap_or(0)
    }
}

pub fn assemble_map(
    vocab: &Vocabulary,
    embedding: &Embedding2D,
    clusters: &ClusterModel,
) -> Result<InterestMap, AnalyticsError> {
    let (v, e, c) = (
        vocab.len(),
        embedding.coords.len(),
        clusters.assignments.len(),
    );
    if v != e || v != c {
        return Err(AnalyticsError::SizeMismatch {
            vocab: v,
            embedding: e,
            clusters: c,
        });
    }
    let points = vocab
        .entries()
        .iter()
        .zip(&embedding.coords)
        .zip(&clusters.assignments)
        .map(|((entry, [x, y]), &cluster)| MapPoint {
            surface: entry.surface(),
            x: *x,
            y: *y,
            cluster,
            df: entry.document_frequency,
        })
        .collect();
    Ok(InterestMap { points })
}
