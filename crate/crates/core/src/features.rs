//! N-gram vocabulary and the binary feature-by-document incidence matrix.

use std::collections::{BTreeSet, HashMap};
use std::io::{self, Write};

use thiserror::Error;

use crate::textprep::TokenizedDocument;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FeatureError {
    #[error("n_max must be 1, 2 or 3 (got {0})")]
    InvalidNgramMax(usize),
    #[error("min_df must be at least 1")]
    InvalidMinDf,
    #[error("no n-gram reaches document frequency {min_df}")]
    EmptyVocabulary { min_df: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NGram {
    pub terms: Vec<String>,
}

impl NGram {
    pub fn new(terms: Vec<String>) -> Self {
        debug_assert!((1..=3).contains(&terms.len()));
        Self { terms }
    }

    pub fn surface(&self) -> String {
        self.terms.join(" ")
    }
}

/// All contiguous n-grams for n = 1..=n_max, unigrams first, each size left to right.
pub fn extract_ngrams(lemmas: &[String], n_max: usize) -> Result<Vec<NGram>, FeatureError> {
    if !(1..=3).contains(&n_max) {
        return Err(FeatureError::InvalidNgramMax(n_max));
    }
    let mut out = Vec::new();
    for n in 1..=n_max {
        out.extend(lemmas.windows(n).map(|w| NGram::new(w.to_vec())));
    }
    Ok(out)
}

fn doc_surfaces(lemmas: &[String], n_max: usize) -> BTreeSet<String> {
    let mut set = BTreeSet::new();
    for n in 1..=n_max {
        for w in lemmas.windows(n) {
            set.insert(w.join(" "));
        }
    }
    set
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabEntry {
    pub ngram: NGram,
    pub document_frequency: usize,
}

impl VocabEntry {
    pub fn surface(&self) -> String {
        self.ngram.surface()
    }
}

/// Ordered by (document frequency descending, surface ascending); row `i` of the
/// feature matrix is entry `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    entries: Vec<VocabEntry>,
    index: HashMap<String, usize>,
    n_max: usize,
    min_df: usize,
}

impl Vocabulary {
    pub fn entries(&self) -> &[VocabEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn index_of(&self, surface: &str) -> Option<usize> {
        self.index.get(surface).copied()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn min_df(&self) -> usize {
        self.min_df
    }

    /// `surface TAB df` lines in row order.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for e in &self.entries {
            writeln!(out, "{}\t{}", e.surface(), e.document_frequency)?;
        }
        Ok(())
    }
}

pub fn build_vocabulary(
    docs: &[TokenizedDocument],
    n_max: usize,
    min_df: usize,
) -> Result<Vocabulary, FeatureError> {
    if !(1..=3).contains(&n_max) {
        return Err(FeatureError::InvalidNgramMax(n_max));
    }
    if min_df == 0 {
        return Err(FeatureError::InvalidMinDf);
    }
    let mut df: HashMap<String, usize> = HashMap::new();
    for doc in docs {
        for s in doc_surfaces(&doc.lemmas, n_max) {
            *df.entry(s).or_insert(0) += 1;
        }
    }
    let mut kept: Vec<(String, usize)> = df.into_iter().filter(|(_, c)| *c >= min_df).collect();
    if kept.is_empty() {
        return Err(FeatureError::EmptyVocabulary { min_df });
    }
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let index = kept
        .iter()
        .enumerate()
        .map(|(i, (s, _))| (s.clone(), i))
        .collect();
    let entries = kept
        .into_iter()
        .map(|(s, c)| VocabEntry {
            ngram: NGram::new(s.split(' ').map(str::to_owned).collect()),
            document_frequency: c,
        })
        .collect();
    Ok(Vocabulary {
        entries,
        index,
        n_max,
        min_df,
    })
}

pub fn top_ngrams(vocab: &Vocabulary, k: usize) -> Vec<(String, usize)> {
    vocab
        .entries
        .iter()
        .take(k)
        .map(|e| (e.surface(), e.document_frequency))
        .collect()
}

/// Compressed-row binary matrix; every stored entry has value 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseBinaryMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
}

impl SparseBinaryMatrix {
    /// Builds from per-row column lists; columns are sorted and deduplicated.
    pub fn from_rows(n_cols: usize, rows: Vec<Vec<usize>>) -> Self {
        let mut row_offsets = Vec::with_capacity(rows.len() + 1);
        let mut col_indices = Vec::new();
        row_offsets.push(0);
        for mut cols in rows.iter().cloned() {
            cols.sort_unstable();
            cols.dedup();
            assert!(
                cols.iter().all(|&c| c < n_cols),
                "column index out of range"
            );
            col_indices.extend(cols);
            row_offsets.push(col_indices.len());
        }
        Self {
            n_rows: rows.len(),
            n_cols,
            row_offsets,
            col_indices,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.col_indices.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.col_indices[self.row_offsets[i]..self.row_offsets[i + 1]]
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.row(i).binary_search(&j).is_ok()
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut dense = vec![vec![0u8; self.n_cols]; self.n_rows];
        for (i, row) in dense.iter_mut().enumerate() {
            for &j in self.row(i) {
                row[j] = 1;
            }
        }
        dense
    }

    /// Header `rows cols nnz`, then one `row col` pair per incidence in row order.
    pub fn write_coo<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{} {} {}", self.n_rows, self.n_cols, self.nnz())?;
        for i in 0..self.n_rows {
            for &j in self.row(i) {
                writeln!(out, "{i} {j}")?;
            }
        }
        Ok(())
    }
}

pub fn build_matrix(docs: &[TokenizedDocument], vocab: &Vocabulary) -> SparseBinaryMatrix {
    let mut rows = vec![Vec::new(); vocab.len()];
    for (j, doc) in docs.iter().enumerate() {
        for s in doc_surfaces(&doc.lemmas, vocab.n_max) {
            if let Some(i) = vocab.index_of(&s) {
                rows[i].push(j);
            }
        }
    }
    SparseBinaryMatrix::from_rows(docs.len(), rows)
}
