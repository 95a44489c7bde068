//! Lexicon-and-rules sentiment intensity scoring of raw document text.
//!
//! This is a port of the VADER rule set: lexicon valences adjusted for degree
//! boosters, negation, capitalization emphasis, contrastive "but", and
//! exclamation/question emphasis, normalized into a compound score in [-1, 1].
//! Idiom and emoji tables are not included.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Corpus;

const DEFAULT_LEXICON: &str = include_str!("../data/vader_lexicon.tsv");

#[derive(Debug, Error)]
pub enum SentimentError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("lexicon line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("compound score {0} outside [-1, 1]")]
    OutOfRange(f64),
}

/// Every constant the rules use, in one place.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleConstants {
    /// Increment contributed by an intensifying booster word (negative for dampeners).
    pub booster_increment: f64,
    /// Extra emphasis for an ALL-CAPS word in mixed-case text.
    pub caps_increment: f64,
    pub negation_scalar: f64,
    /// Booster scale by distance: 1, 2 or 3 tokens before the sentiment word.
    pub booster_decay: [f64; 3],
    pub exclamation_increment: f64,
    pub max_exclamations: usize,
    pub question_increment: f64,
    pub question_cap: f64,
    pub but_before: f64,
    pub but_after: f64,
    /// Multiplier for "never so/this ..." constructions.
    pub never_so_scalar: f64,
    pub alpha: f64,
    pub positive_threshold: f64,
    pub negative_threshold: f64,
}

pub const RULES: RuleConstants = RuleConstants {
    booster_increment: 0.293,
    caps_increment: 0.733,
    negation_scalar: -0.74,
    booster_decay: [1.0, 0.95, 0.90],
    exclamation_increment: 0.292,
    max_exclamations: 4,
    question_increment: 0.18,
    question_cap: 0.96,
    but_before: 0.5,
    but_after: 1.5,
    never_so_scalar: 1.25,
    alpha: 15.0,
    positive_threshold: 0.05,
    negative_threshold: -0.05,
};

const NEGATORS: &[&str] = &[
    "aint",
    "arent",
    "cannot",
    "cant",
    "couldnt",
    "darent",
    "didnt",
    "doesnt",
    "ain't",
    "aren't",
    "can't",
    "couldn't",
    "daren't",
    "didn't",
    "doesn't",
    "dont",
    "hadnt",
    "hasnt",
    "havent",
    "isnt",
    "mightnt",
    "mustnt",
    "neither",
    "don't",
    "hadn't",
    "hasn't",
    "haven't",
    "isn't",
    "mightn't",
    "mustn't",
    "neednt",
    "needn't",
    "never",
    "none",
    "nope",
    "nor",
    "not",
    "nothing",
    "nowhere",
    "oughtnt",
    "shant",
    "shouldnt",
    "uhuh",
    "wasnt",
    "werent",
    "oughtn't",
    "shan't",
    "shouldn't",
    "uh-uh",
    "wasn't",
    "weren't",
    "without",
    "wont",
    "wouldnt",
    "won't",
    "wouldn't",
    "rarely",
    "seldom",
    "despite",
];

const INTENSIFIERS: &[&str] = &[
    "absolutely",
    "amazingly",
    "awfully",
    "completely",
    "considerable",
    "considerably",
    "decidedly",
    "deeply",
    "effing",
    "enormous",
    "enormously",
    "entirely",
    "especially",
    "exceptional",
    "exceptionally",
    "extreme",
    "extremely",
    "fabulously",
    "flipping",
    "flippin",
    "frackin",
    "fracking",
    "fricking",
    "frickin",
    "frigging",
    "friggin",
    "fully",
    "fuckin",
    "fucking",
    "fuggin",
    "fugging",
    "greatly",
    "hella",
    "highly",
    "hugely",
    "incredible",
    "incredibly",
    "intensely",
    "major",
    "majorly",
    "more",
    "most",
    "particularly",
    "purely",
    "quite",
    "really",
    "remarkably",
    "so",
    "substantially",
    "thoroughly",
    "total",
    "totally",
    "tremendous",
    "tremendously",
    "uber",
    "unbelievably",
    "unusually",
    "utter",
    "utterly",
    "very",
];

const DAMPENERS: &[&str] = &[
    "almost",
    "barely",
    "hardly",
    "just enough",
    "kind of",
    "kinda",
    "kindof",
    "kind-of",
    "less",
    "little",
    "marginal",
    "marginally",
    "occasional",
    "occasionally",
    "partly",
    "scarce",
    "scarcely",
    "slight",
    "slightly",
    "somewhat",
    "sort of",
    "sorta",
    "sortof",
    "sort-of",
];

#[derive(Debug, Clone)]
pub struct SentimentLexicon {
    pub valences: HashMap<String, f64>,
    pub boosters: HashMap<String, f64>,
    pub negators: HashSet<String>,
}

impl SentimentLexicon {
    /// Parses `token TAB mean_valence` lines (extra columns ignored, `#` comments).
    ///
    /// Duplicate tokens keep the last value. Keys are lowercased; a key that is
    /// already lowercase wins over one that only becomes lowercase here.
    pub fn parse(text: &str) -> Result<Self, SentimentError> {
        let mut exact: Vec<(String, f64)> = Vec::new();
        let mut position: HashMap<String, usize> = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.trim().split('\t');
            let (Some(token), Some(value)) = (fields.next(), fields.next()) else {
                return Err(SentimentError::Parse {
                    line: idx + 1,
                    reason: "expected `token TAB mean_valence`".into(),
                });
            };
            let value: f64 = value.trim().parse().map_err(|_| SentimentError::Parse {
                line: idx + 1,
                reason: format!("valence {value:?} is not a number"),
            })?;
            if !value.is_finite() {
                return Err(SentimentError::Parse {
                    line: idx + 1,
                    reason: "valence must be finite".into(),
                });
            }
            match position.get(token) {
                Some(&p) => exact[p].1 = value,
                None => {
                    position.insert(token.to_owned(), exact.len());
                    exact.push((token.to_owned(), value));
                }
            }
        }
        let mut valences = HashMap::with_capacity(exact.len());
        for (token, value) in &exact {
            if *token == token.to_lowercase() {
                valences.insert(token.clone(), *value);
            }
        }
        for (token, value) in &exact {
            valences.entry(token.to_lowercase()).or_insert(*value);
        }
        Ok(Self::with_valences(valences))
    }

    /// Valences plus the standard booster and negator word lists.
    pub fn with_valences(valences: HashMap<String, f64>) -> Self {
        let mut boosters = HashMap::new();
        for w in INTENSIFIERS {
            boosters.insert((*w).to_owned(), RULES.booster_increment);
        }
        for w in DAMPENERS {
            boosters.insert((*w).to_owned(), -RULES.booster_increment);
        }
        Self {
            valences,
            boosters,
            negators: NEGATORS.iter().map(|w| (*w).to_owned()).collect(),
        }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, SentimentError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| SentimentError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// The bundled VADER lexicon.
    pub fn vader() -> Self {
        Self::parse(DEFAULT_LEXICON).expect("bundled lexicon parses")
    }

    pub fn valence(&self, token: &str) -> Option<f64> {
        self.valences.get(&token.to_lowercase()).copied()
    }

    fn contains(&self, lower: &str) -> bool {
        self.valences.contains_key(lower)
    }

    fn is_negator(&self, lower: &str) -> bool {
        self.negators.contains(lower) || lower.contains("n't")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Label {
    Negative,
    Neutral,
    Positive,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Negative => "NEGATIVE",
            Label::Neutral => "NEUTRAL",
            Label::Positive => "POSITIVE",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentimentScore {
    pub negative: f64,
    pub neutral: f64,
    pub positive: f64,
    pub compound: f64,
    pub label: Label,
}

pub fn classify(compound: f64) -> Result<Label, SentimentError> {
    if !(-1.0..=1.0).contains(&compound) {
        return Err(SentimentError::OutOfRange(compound));
    }
    Ok(if compound >= RULES.positive_threshold {
        Label::Positive
    } else if compound <= RULES.negative_threshold {
        Label::Negative
    } else {
        Label::Neutral
    })
}

/// `s / √(s² + α)`, clamped to [-1, 1].
pub fn normalize(sum: f64, alpha: f64) -> f64 {
    (sum / (sum * sum + alpha).sqrt()).clamp(-1.0, 1.0)
}

static URL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(?:https?://|www\.)\S*").expect("valid regex"));
static MENTION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"@\w+").expect("valid regex"));

/// Removes URLs and @mentions; punctuation, case and emoticons are kept.
pub fn strip_links_and_mentions(text: &str) -> String {
    let t = URL.replace_all(text, "");
    MENTION.replace_all(&t, "").into_owned()
}

/// Uppercase in the Python `str.isupper` sense: some cased character and no lowercase ones.
fn is_upper(s: &str) -> bool {
    s.chars().any(char::is_uppercase) && !s.chars().any(char::is_lowercase)
}

/// Whitespace tokens with surrounding ASCII punctuation trimmed, unless trimming
/// leaves two characters or fewer (likely an emoticon).
fn words_and_emoticons(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| {
            let stripped = w.trim_matches(|c: char| c.is_ascii_punctuation());
            if stripped.chars().count() <= 2 {
                w.to_owned()
            } else {
                stripped.to_owned()
            }
        })
        .collect()
}

struct Sentence<'a> {
    words: &'a [String],
    lower: Vec<String>,
    cap_differential: bool,
}

impl Sentence<'_> {
    fn lower(&self, i: usize) -> &str {
        &self.lower[i]
    }
}

fn booster_scalar(
    lex: &SentimentLexicon,
    word: &str,
    lower: &str,
    valence: f64,
    cap_diff: bool,
) -> f64 {
    let Some(&base) = lex.boosters.get(lower) else {
        return 0.0;
    };
    let mut scalar = if valence < 0.0 { -base } else { base };
    if cap_diff && is_upper(word) {
        if valence > 0.0 {
            scalar += RULES.caps_increment;
        } else {
            scalar -= RULES.caps_increment;
        }
    }
    scalar
}

fn negation_check(
    lex: &SentimentLexicon,
    s: &Sentence,
    valence: f64,
    distance: usize,
    i: usize,
) -> f64 {
    let so_or_this = |w: &str| w == "so" || w == "this";
    match distance {
        0 => {
            if lex.is_negator(s.lower(i - 1)) {
                return valence * RULES.negation_scalar;
            }
        }
        1 => {
            if s.lower(i - 2) == "never" && so_or_this(s.lower(i - 1)) {
                return valence * RULES.never_so_scalar;
            }
            if s.lower(i - 2) == "without" && s.lower(i - 1) == "doubt" {
                return valence;
            }
            if lex.is_negator(s.lower(i - 2)) {
                return valence * RULES.negation_scalar;
            }
        }
        _ => {
            if (s.lower(i - 3) == "never" && so_or_this(s.lower(i - 2)))
                || so_or_this(s.lower(i - 1))
            {
                return valence * RULES.never_so_scalar;
            }
            if s.lower(i - 3) == "without"
                && (s.lower(i - 2) == "doubt" || s.lower(i - 1) == "doubt")
            {
                return valence;
            }
            if lex.is_negator(s.lower(i - 3)) {
                return valence * RULES.negation_scalar;
            }
        }
    }
    valence
}

/// Multi-word dampeners ("kind of", "sort of", "just enough") directly before the word.
fn phrase_booster(lex: &SentimentLexicon, s: &Sentence, valence: f64, i: usize) -> f64 {
    let phrases = [
        format!("{} {} {}", s.lower(i - 3), s.lower(i - 2), s.lower(i - 1)),
        format!("{} {}", s.lower(i - 3), s.lower(i - 2)),
        format!("{} {}", s.lower(i - 2), s.lower(i - 1)),
    ];
    let mut v = valence;
    for p in &phrases {
        if let Some(b) = lex.boosters.get(p) {
            v += b;
        }
    }
    v
}

fn least_check(lex: &SentimentLexicon, s: &Sentence, valence: f64, i: usize) -> f64 {
    if i > 0 && !lex.contains(s.lower(i - 1)) && s.lower(i - 1) == "least" {
        if i > 1 {
            if s.lower(i - 2) != "at" && s.lower(i - 2) != "very" {
                return valence * RULES.negation_scalar;
            }
        } else {
            return valence * RULES.negation_scalar;
        }
    }
    valence
}

fn word_valence(lex: &SentimentLexicon, s: &Sentence, i: usize) -> f64 {
    let item = &s.words[i];
    let lower = s.lower(i);
    let Some(base) = lex.valence(lower) else {
        return 0.0;
    };
    let n = s.words.len();
    let mut valence = base;
    if lower == "no" && i + 1 < n && lex.contains(s.lower(i + 1)) {
        valence = 0.0;
    }
    if (i > 0 && s.lower(i - 1) == "no")
        || (i > 1 && s.lower(i - 2) == "no")
        || (i > 2 && s.lower(i - 3) == "no" && matches!(s.lower(i - 1), "or" | "nor"))
    {
        valence = base * RULES.negation_scalar;
    }
    // Emphasis moves a word toward its own sign; a silenced word stays silent.
    if s.cap_differential && is_upper(item) && valence != 0.0 {
        valence += RULES.caps_increment.copysign(valence);
    }
    for distance in 0..3 {
        if i > distance && !lex.contains(s.lower(i - distance - 1)) {
            let prev = &s.words[i - distance - 1];
            let boost = booster_scalar(
                lex,
                prev,
                s.lower(i - distance - 1),
                valence,
                s.cap_differential,
            );
            valence += boost * RULES.booster_decay[distance];
            valence = negation_check(lex, s, valence, distance, i);
            if distance == 2 {
                valence = phrase_booster(lex, s, valence, i);
            }
        }
    }
    least_check(lex, s, valence, i)
}

fn punctuation_emphasis(text: &str) -> f64 {
    let bangs = text.matches('!').count().min(RULES.max_exclamations);
    let questions = text.matches('?').count();
    let q = match questions {
        0 | 1 => 0.0,
        2 | 3 => questions as f64 * RULES.question_increment,
        _ => RULES.question_cap,
    };
    bangs as f64 * RULES.exclamation_increment + q
}

/// Per-token rule-adjusted valences, after the "but" reweighting.
pub fn token_valences(text: &str, lex: &SentimentLexicon) -> Vec<f64> {
    let words = words_and_emoticons(text);
    let lower: Vec<String> = words.iter().map(|w| w.to_lowercase()).collect();
    let caps = words.iter().filter(|w| is_upper(w)).count();
    let sentence = Sentence {
        words: &words,
        cap_differential: caps > 0 && caps < words.len(),
        lower,
    };
    let mut valences = Vec::with_capacity(words.len());
    for i in 0..words.len() {
        let l = sentence.lower(i);
        let skip = lex.boosters.contains_key(l)
            || (l == "kind" && i + 1 < words.len() && sentence.lower(i + 1) == "of");
        valences.push(if skip {
            0.0
        } else {
            word_valence(lex, &sentence, i)
        });
    }
    if let Some(b) = sentence.lower.iter().position(|w| w == "but") {
        for (i, v) in valences.iter_mut().enumerate() {
            if i < b {
                *v *= RULES.but_before;
            } else if i > b {
                *v *= RULES.but_after;
            }
        }
    }
    valences
}

/// Scores raw text. URLs and @mentions are removed first; everything else
/// (punctuation, capitalization, function words) feeds the rules.
pub fn polarity(text: &str, lex: &SentimentLexicon) -> SentimentScore {
    let text = strip_links_and_mentions(text);
    let text = text.trim();
    let valences = token_valences(text, lex);
    if valences.is_empty() {
        return SentimentScore {
            negative: 0.0,
            neutral: 1.0,
            positive: 0.0,
            compound: 0.0,
            label: Label::Neutral,
        };
    }
    let emphasis = punctuation_emphasis(text);
    let mut sum: f64 = valences.iter().sum();
    if sum > 0.0 {
        sum += emphasis;
    } else if sum < 0.0 {
        sum -= emphasis;
    }
    let compound = normalize(sum, RULES.alpha);

    let mut pos = 0.0;
    let mut neg = 0.0;
    let mut neu = 0.0;
    for &v in &valences {
        if v > 0.0 {
            pos += v + 1.0;
        } else if v < 0.0 {
            neg += v - 1.0;
        } else {
            neu += 1.0;
        }
    }
    if pos > neg.abs() {
        pos += emphasis;
    } else if pos < neg.abs() {
        neg -= emphasis;
    }
    let total = pos + neg.abs() + neu;
    SentimentScore {
        negative: (neg / total).abs(),
        neutral: (neu / total).abs(),
        positive: (pos / total).abs(),
        compound,
        label: classify(compound).expect("normalized compound lies in [-1, 1]"),
    }
}

pub fn score_corpus(corpus: &Corpus, lex: &SentimentLexicon) -> Vec<(String, SentimentScore)> {
    corpus
        .iter()
        .map(|d| (d.id.clone(), polarity(&d.text, lex)))
        .collect()
}
