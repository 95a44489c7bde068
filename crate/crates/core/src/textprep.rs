//! Text cleaning and lemmatization for the interest-map branch.
//!
//! The lemmatizer is table driven: an exception table of irregular forms is
//! consulted first, then an ordered list of suffix rules. A suffix rule is only
//! accepted when its output is itself stable under the table, which makes
//! [`LemmaRules::lemmatize`] idempotent for any rule table.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use thiserror::Error;

const DEFAULT_LEMMA_RULES: &str = include_str!("../data/lemma_rules.tsv");
const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");

#[derive(Debug, Error)]
pub enum RulesError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("lemma rules line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

static URL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(?:https?://|www\.)\S*").expect("valid regex"));
static MENTION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"@\w+").expect("valid regex"));

/// Strips URLs, @mentions and symbols, lowercases, and folds whitespace.
///
/// Hashtag markers are dropped but the tag word is kept. Apostrophes are
/// deleted rather than split on, so "don't" becomes "dont".
pub fn clean(text: &str) -> String {
    let without_urls = URL.replace_all(text, " ");
    let without_mentions = MENTION.replace_all(&without_urls, " ");
    let lowered = without_mentions.to_lowercase();
    let mut out = String::with_capacity(lowered.len());
    for ch in lowered.chars() {
        if ch.is_alphanumeric() {
            out.push(ch);
        } else if ch == '\'' || ch == '\u{2019}' {
            continue;
        } else {
            out.push(' ');
        }
    }
    out.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_owned).collect()
}

pub fn remove_stopwords(tokens: &[String], stopwords: &HashSet<String>) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| !stopwords.contains(t.as_str()))
        .cloned()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixRule {
    pub suffix: String,
    pub replacement: String,
    /// Minimum number of characters left once the suffix is removed.
    pub min_stem: usize,
}

#[derive(Debug, Clone, Default)]
pub struct LemmaRules {
    pub exceptions: HashMap<String, String>,
    pub suffix_rules: Vec<SuffixRule>,
}

impl LemmaRules {
    /// Parses the `[exceptions]` / `[suffix]` tab-separated format. `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, RulesError> {
        #[derive(PartialEq)]
        enum Section {
            None,
            Exceptions,
            Suffix,
        }
        let mut rules = LemmaRules::default();
        let mut section = Section::None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            match line.trim() {
                "[exceptions]" => {
                    section = Section::Exceptions;
                    continue;
                }
                "[suffix]" => {
                    section = Section::Suffix;
                    continue;
                }
                _ => {}
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let err = |reason: &str| RulesError::Parse {
                line: line_no,
                reason: reason.to_owned(),
            };
            match section {
                Section::None => return Err(err("entry before any section header")),
                Section::Exceptions => {
                    let [form, lemma] = fields[..] else {
                        return Err(err("expected `inflected TAB lemma`"));
                    };
                    if form.is_empty() || lemma.is_empty() {
                        return Err(err("empty exception field"));
                    }
                    rules
                        .exceptions
                        .insert(form.to_lowercase(), lemma.to_lowercase());
                }
                Section::Suffix => {
                    let [suffix, replacement, min_stem] = fields[..] else {
                        return Err(err("expected `suffix TAB replacement TAB min-stem-length`"));
                    };
                    if suffix.is_empty() {
                        return Err(err("empty suffix"));
                    }
                    let min_stem: usize = min_stem
                        .trim()
                        .parse()
                        .map_err(|_| err("min-stem-length is not a count"))?;
                    if min_stem == 0 && replacement.is_empty() {
                        return Err(err("rule could produce an empty lemma"));
                    }
                    rules.suffix_rules.push(SuffixRule {
                        suffix: suffix.to_owned(),
                        replacement: replacement.to_owned(),
                        min_stem,
                    });
                }
            }
        }
        Ok(rules)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, RulesError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| RulesError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// The shipped English table.
    pub fn english() -> Self {
        Self::parse(DEFAULT_LEMMA_RULES).expect("bundled lemma rules parse")
    }

    fn apply_rule(rule: &SuffixRule, token: &str) -> Option<String> {
        let stem = token.strip_suffix(rule.suffix.as_str())?;
        if stem.chars().count() < rule.min_stem {
            return None;
        }
        let out = format!("{stem}{}", rule.replacement);
        (!out.is_empty()).then_some(out)
    }

    /// One unconditional pass: exception, else first matching suffix rule.
    fn single_pass(&self, token: &str) -> String {
        if let Some(lemma) = self.exceptions.get(token) {
            return lemma.clone();
        }
        self.suffix_rules
            .iter()
            .find_map(|r| Self::apply_rule(r, token))
            .unwrap_or_else(|| token.to_owned())
    }

    pub fn lemmatize(&self, token: &str) -> String {
        if let Some(lemma) = self.exceptions.get(token) {
            return lemma.clone();
        }
        for rule in &self.suffix_rules {
            if let Some(candidate) = Self::apply_rule(rule, token) {
                if self.single_pass(&candidate) == candidate {
                    return candidate;
                }
            }
        }
        token.to_owned()
    }
}

pub fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

pub fn load_stopwords(path: impl AsRef<Path>) -> Result<HashSet<String>, RulesError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| RulesError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_stopwords(&text))
}

pub fn english_stopwords() -> HashSet<String> {
    parse_stopwords(DEFAULT_STOPWORDS)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedDocument {
    pub doc_id: String,
    pub lemmas: Vec<String>,
}

/// Cleaning, tokenization, stopword removal and lemmatization bundled together.
#[derive(Debug, Clone)]
pub struct TextPipeline {
    pub rules: LemmaRules,
    pub stopwords: HashSet<String>,
}

impl Default for TextPipeline {
    fn default() -> Self {
        Self {
            rules: LemmaRules::english(),
            stopwords: english_stopwords(),
        }
    }
}

impl TextPipeline {
    /// Stopwords are removed both before lemmatizing and after, so that a form
    /// like "does" cannot reappear as a stopword lemma.
    pub fn lemmas(&self, text: &str) -> Vec<String> {
        let tokens = tokenize(&clean(text));
        remove_stopwords(&tokens, &self.stopwords)
            .iter()
            .map(|t| self.rules.lemmatize(t))
            .filter(|l| !self.stopwords.contains(l))
            .collect()
    }

    pub fn process(&self, doc_id: &str, text: &str) -> TokenizedDocument {
        TokenizedDocument {
            doc_id: doc_id.to_owned(),
            lemmas: self.lemmas(text),
        }
    }

    pub fn process_corpus(&self, corpus: &crate::corpus::Corpus) -> Vec<TokenizedDocument> {
        corpus
            .iter()
            .map(|d| self.process(&d.id, &d.text))
            .collect()
    }
}
