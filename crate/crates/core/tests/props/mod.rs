//! Randomized invariant checks, one function per invariant. Each runs a fixed
//! number of cases from a deterministic seed and reports the first failure.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use chrono::{DateTime, TimeZone, Utc};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use unicode_normalization::UnicodeNormalization;

use tweetlens::analytics::{assemble_map, keyterm_shares, sentiment_evolution, topic_filter};
use tweetlens::cluster::{assign, best_of_restarts, kmeans, KMeansConfig};
use tweetlens::corpus::{deduplicate, keyterm_counts, read_corpus, Corpus, Document, LoadMode};
use tweetlens::decompose::{truncated_svd, ReducedMatrix, SvdConfig};
use tweetlens::embed::{
    kl_divergence, low_dim_affinities, pairwise_affinities, tsne, Embedding2D, TsneConfig,
};
use tweetlens::features::{build_matrix, build_vocabulary, SparseBinaryMatrix};
use tweetlens::sentiment::{classify, polarity, score_corpus, Label, SentimentLexicon};
use tweetlens::textprep::{
    clean, english_stopwords, remove_stopwords, LemmaRules, TextPipeline, TokenizedDocument,
};

use crate::common;

pub type Property = fn(u32) -> Result<(), String>;

pub const ALL: &[(&str, Property)] = &[
    ("corpus: deduplicate is idempotent", dedup_idempotent),
    (
        "corpus: dedup shrinks, equal size iff no key collision",
        dedup_size,
    ),
    (
        "corpus: key-term counts sum to corpus size",
        keyterm_counts_sum,
    ),
    ("corpus: serialize/load round-trip", jsonl_round_trip),
    ("textprep: clean is idempotent", clean_idempotent),
    ("textprep: lemmatize is idempotent", lemmatize_idempotent),
    (
        "textprep: stopword removal keeps a subsequence",
        stopwords_subsequence,
    ),
    (
        "textprep: pipeline is deterministic",
        pipeline_deterministic,
    ),
    (
        "features: row counts equal document frequencies",
        row_counts_equal_df,
    ),
    (
        "features: column support equals document n-grams",
        column_support,
    ),
    (
        "features: rebuild is bitwise identical",
        features_deterministic,
    ),
    (
        "decompose: spectrum non-increasing and non-negative",
        spectrum_ordered,
    ),
    (
        "decompose: singular vectors orthonormal",
        vectors_orthonormal,
    ),
    ("decompose: matches dense oracle", svd_matches_oracle),
    ("decompose: deterministic for a seed", svd_deterministic),
    ("cluster: inertia trace non-increasing", inertia_monotone),
    (
        "cluster: returned model is an assignment fixed point",
        kmeans_fixed_point,
    ),
    ("cluster: permutation equivariance", kmeans_permutation),
    ("cluster: scale equivariance", kmeans_scale),
    (
        "embed: P is a symmetric distribution",
        joint_is_distribution,
    ),
    ("embed: Q is a symmetric distribution", q_is_distribution),
    (
        "embed: KL checkpoints non-negative and final below post-exaggeration",
        kl_checkpoints,
    ),
    ("embed: KL invariant under rigid motions", kl_rigid_motion),
    ("embed: deterministic for a seed", tsne_deterministic),
    (
        "sentiment: compound odd under valence negation",
        compound_odd,
    ),
    (
        "sentiment: appending a positive word never lowers compound",
        compound_monotone,
    ),
    ("sentiment: proportions sum to one", proportions_sum),
    (
        "sentiment: classify is the two-threshold step",
        classify_step,
    ),
    ("analytics: key-term shares sum to one", shares_sum),
    (
        "analytics: topic filter is an idempotent sub-multiset",
        topic_filter_subset,
    ),
    (
        "analytics: evolution counts cover the dated topic documents",
        evolution_counts,
    ),
    ("analytics: map has one point per feature", map_cardinality),
];

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner =
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------- corpus

const TEXT_POOL: &[&str] = &[
    "City logistics is growing",
    "city  LOGISTICS is growing",
    "RT @bob: city logistics is growing",
    "rt @ann: RT @bob: City logistics is growing",
    "Cargo bikes in Paris",
    "cargo bikes in paris ",
    "Café deliveries",
    "Cafe\u{301} deliveries",
    "Urban freight pilot",
    "Last mile logistics #lml",
];

const QUERIES: &[&str] = &[
    "city logistics",
    "last mile logistics",
    "urban logistics",
    "urban freight",
];

fn timestamp() -> impl Strategy<Value = DateTime<Utc>> {
    (1_167_609_600i64..1_546_300_800).prop_map(|s| Utc.timestamp_opt(s, 0).unwrap())
}

fn corpus_strategy(max: usize) -> impl Strategy<Value = Corpus> {
    prop::collection::vec(
        (
            prop::sample::select(TEXT_POOL),
            prop::sample::select(QUERIES),
            timestamp(),
        ),
        1..max,
    )
    .prop_map(|rows| {
        let docs = rows
            .into_iter()
            .enumerate()
            .map(|(i, (text, query, t))| Document {
                id: format!("d{i}"),
                created_at: Some(t),
                text: text.to_owned(),
                query: query.to_owned(),
            })
            .collect();
        Corpus::new(docs, "generated")
    })
}

/// Independent statement of the dedup normalization.
fn oracle_key(text: &str) -> String {
    let mut words: Vec<String> = text
        .nfc()
        .collect::<String>()
        .to_lowercase()
        .split_whitespace()
        .map(str::to_owned)
        .collect();
    while words.len() >= 2 && words[0] == "rt" && words[1].starts_with('@') {
        let handle = words[1].trim_end_matches(':').to_owned();
        if handle.len() < 2 {
            break;
        }
        words.drain(..2);
    }
    words.join(" ")
}

pub fn dedup_idempotent(cases: u32) -> Result<(), String> {
    run(cases, corpus_strategy(30), |c| {
        let once = deduplicate(&c);
        prop_assert_eq!(deduplicate(&once), once);
        Ok(())
    })
}

pub fn dedup_size(cases: u32) -> Result<(), String> {
    run(cases, corpus_strategy(12), |c| {
        let d = deduplicate(&c);
        prop_assert!(d.len() <= c.len());
        let distinct: HashSet<String> = c.iter().map(|doc| oracle_key(&doc.text)).collect();
        prop_assert_eq!(d.len(), distinct.len());
        prop_assert_eq!(d.len() == c.len(), distinct.len() == c.len());
        Ok(())
    })
}

pub fn keyterm_counts_sum(cases: u32) -> Result<(), String> {
    run(cases, corpus_strategy(40), |c| {
        prop_assert_eq!(keyterm_counts(&c).values().sum::<usize>(), c.len());
        Ok(())
    })
}

pub fn jsonl_round_trip(cases: u32) -> Result<(), String> {
    let text = prop::collection::vec(any::<char>(), 1..40)
        .prop_map(|cs| cs.into_iter().collect::<String>())
        .prop_filter("non-blank", |s| !s.trim().is_empty());
    let doc = (text, prop::sample::select(QUERIES), timestamp());
    run(cases, prop::collection::vec(doc, 1..8), |rows| {
        let docs = rows
            .into_iter()
            .enumerate()
            .map(|(i, (text, query, t))| Document {
                id: format!("id-{i}"),
                created_at: Some(t),
                text,
                query: query.to_owned(),
            })
            .collect();
        let c = Corpus::new(docs, "mem");
        let mut buf = Vec::new();
        c.write_jsonl(&mut buf).unwrap();
        let back = read_corpus(buf.as_slice(), "mem", LoadMode::Strict)
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(back.corpus, c);
        Ok(())
    })
}

// ---------------------------------------------------------------- textprep

pub fn clean_idempotent(cases: u32) -> Result<(), String> {
    let s = prop_oneof![
        any::<String>(),
        "[a-zA-Z@#:/. ,!?'-]{0,60}",
        "(https?://[a-z./]{1,12} |@[a-z]{1,6} |#[A-Za-z]{1,8} |[A-Za-z']{1,8} ){0,8}",
    ];
    run(cases, s, |t| {
        let once = clean(&t);
        prop_assert_eq!(clean(&once), once);
        Ok(())
    })
}

pub fn lemmatize_idempotent(cases: u32) -> Result<(), String> {
    let rules = LemmaRules::english();
    let known: Vec<String> = rules.exceptions.keys().cloned().collect();
    let word = prop_oneof![
        "[a-z]{1,14}",
        "[a-z]{1,8}(s|es|ies|ed|ied|ing|ings|sses|ches|xes|ss|us|is|eed)",
        prop::sample::select(known),
    ];
    run(cases, word, |w| {
        let lemma = rules.lemmatize(&w);
        prop_assert!(!lemma.is_empty());
        prop_assert_eq!(rules.lemmatize(&lemma), lemma);
        Ok(())
    })
}

pub fn stopwords_subsequence(cases: u32) -> Result<(), String> {
    let stop = english_stopwords();
    let pool: Vec<String> = [
        "the", "of", "city", "and", "van", "a", "mile", "to", "bike", "is",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    run(
        cases,
        prop::collection::vec(prop::sample::select(pool), 0..20),
        |tokens| {
            let kept = remove_stopwords(&tokens, &stop);
            let mut it = tokens.iter();
            for k in &kept {
                prop_assert!(!stop.contains(k));
                prop_assert!(it.any(|t| t == k), "not a subsequence");
            }
            let expected = tokens.iter().filter(|t| !stop.contains(*t)).count();
            prop_assert_eq!(kept.len(), expected);
            Ok(())
        },
    )
}

pub fn pipeline_deterministic(cases: u32) -> Result<(), String> {
    run(cases, "[A-Za-z@#:/. ,!?']{0,80}", |t| {
        let a = TextPipeline::default().process("x", &t);
        let b = TextPipeline::default().process("x", &t);
        for l in &a.lemmas {
            prop_assert!(!l.is_empty() && !l.contains(char::is_whitespace));
            prop_assert!(!l.starts_with('@') && !l.starts_with('#') && !l.contains("://"));
        }
        prop_assert_eq!(a, b);
        Ok(())
    })
}

// ---------------------------------------------------------------- features

fn lemma_docs() -> impl Strategy<Value = Vec<TokenizedDocument>> {
    let word = prop::sample::select(vec![
        "city",
        "logistics",
        "last",
        "mile",
        "van",
        "bike",
        "urban",
    ]);
    prop::collection::vec(prop::collection::vec(word, 0..9), 1..12).prop_map(|docs| {
        docs.into_iter()
            .enumerate()
            .map(|(i, ws)| TokenizedDocument {
                doc_id: i.to_string(),
                lemmas: ws.into_iter().map(str::to_owned).collect(),
            })
            .collect()
    })
}

fn features_case() -> impl Strategy<Value = (Vec<TokenizedDocument>, usize, usize)> {
    (lemma_docs(), 1usize..=3, 1usize..=3)
}

pub fn row_counts_equal_df(cases: u32) -> Result<(), String> {
    run(cases, features_case(), |(docs, n_max, min_df)| {
        let Ok(vocab) = build_vocabulary(&docs, n_max, min_df) else {
            return Ok(());
        };
        let m = build_matrix(&docs, &vocab);
        prop_assert_eq!(m.n_rows(), vocab.len());
        prop_assert_eq!(m.n_cols(), docs.len());
        let offsets = m.row_offsets();
        prop_assert_eq!(offsets.len(), m.n_rows() + 1);
        prop_assert_eq!(*offsets.last().unwrap(), m.col_indices().len());
        for (i, e) in vocab.entries().iter().enumerate() {
            let row = m.row(i);
            prop_assert_eq!(row.len(), e.document_frequency);
            prop_assert!(e.document_frequency >= min_df);
            prop_assert!(row.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(row.iter().all(|&c| c < m.n_cols()));
        }
        Ok(())
    })
}

pub fn column_support(cases: u32) -> Result<(), String> {
    run(cases, features_case(), |(docs, n_max, min_df)| {
        let Ok(vocab) = build_vocabulary(&docs, n_max, min_df) else {
            return Ok(());
        };
        let dense = build_matrix(&docs, &vocab).to_dense();
        for (j, d) in docs.iter().enumerate() {
            let grams: HashSet<String> =
                common::brute_ngrams(&d.lemmas, n_max).into_iter().collect();
            for (i, e) in vocab.entries().iter().enumerate() {
                let cell = dense[i][j];
                prop_assert!(cell <= 1);
                prop_assert_eq!(cell == 1, grams.contains(&e.surface()));
            }
        }
        Ok(())
    })
}

pub fn features_deterministic(cases: u32) -> Result<(), String> {
    run(cases, features_case(), |(docs, n_max, min_df)| {
        let a = build_vocabulary(&docs, n_max, min_df);
        let b = build_vocabulary(&docs, n_max, min_df);
        prop_assert_eq!(&a, &b);
        if let Ok(v) = a {
            prop_assert_eq!(build_matrix(&docs, &v), build_matrix(&docs, &v));
        }
        Ok(())
    })
}

// ---------------------------------------------------------------- decompose

/// A random binary matrix with at least one incidence and a requested rank
/// not above its numerical rank.
fn svd_case(max_dim: usize) -> impl Strategy<Value = (Vec<Vec<usize>>, usize, usize, u64)> {
    (
        1..=max_dim,
        1..=max_dim,
        0.05f64..0.7,
        any::<u64>(),
        any::<u64>(),
    )
        .prop_map(|(m, n, density, mseed, seed)| {
            let mut rng = common::rng(mseed);
            let mut rows = common::random_binary(&mut rng, m, n, density);
            if rows.iter().all(|r| r.is_empty()) {
                rows[0].push(0);
            }
            let oracle = common::dense_svd(&common::densify(&rows, n));
            let numerical_rank = oracle
                .values
                .iter()
                .filter(|&&s| s > 1e-9 * oracle.values[0])
                .count();
            let r = 1 + (seed as usize % numerical_rank);
            (rows, n, r, seed)
        })
}

fn strict() -> SvdConfig {
    SvdConfig {
        tol: 1e-12,
        ..SvdConfig::default()
    }
}

pub fn spectrum_ordered(cases: u32) -> Result<(), String> {
    run(cases, svd_case(20), |(rows, n, r, seed)| {
        let svd = truncated_svd(
            &SparseBinaryMatrix::from_rows(n, rows),
            r,
            &SvdConfig {
                seed,
                ..SvdConfig::default()
            },
        )
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(svd.singular_values.len(), r);
        prop_assert!(svd.singular_values.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(svd.singular_values.iter().all(|&s| s >= 0.0));
        Ok(())
    })
}

pub fn vectors_orthonormal(cases: u32) -> Result<(), String> {
    run(cases, svd_case(20), |(rows, n, r, seed)| {
        let svd = truncated_svd(
            &SparseBinaryMatrix::from_rows(n, rows),
            r,
            &SvdConfig {
                seed,
                ..SvdConfig::default()
            },
        )
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
        let u = &svd.left_vectors;
        let v = &svd.right_vectors;
        for i in 0..r {
            for j in 0..r {
                let delta = if i == j { 1.0 } else { 0.0 };
                let uu = u.column(i).dot(&u.column(j));
                let vv = v.row(i).dot(&v.row(j));
                prop_assert!((uu - delta).abs() <= 1e-8, "u{}·u{} = {}", i, j, uu);
                prop_assert!((vv - delta).abs() <= 1e-8, "v{}·v{} = {}", i, j, vv);
            }
        }
        Ok(())
    })
}

/// Compares singular values and singular subspaces against the dense oracle.
/// Values closer than `group_gap` form one group; a group cut by the rank is
/// checked by containment in the oracle's whole group.
pub fn compare_with_oracle(
    rows: &[Vec<usize>],
    n: usize,
    r: usize,
    config: &SvdConfig,
) -> Result<(f64, f64), String> {
    let group_gap = 1e-6;
    let svd = truncated_svd(&SparseBinaryMatrix::from_rows(n, rows.to_vec()), r, config)
        .map_err(|e| e.to_string())?;
    let oracle = common::dense_svd(&common::densify(rows, n));
    let mut value_err: f64 = 0.0;
    for (k, s) in svd.singular_values.iter().enumerate() {
        value_err = value_err.max((s - oracle.values[k]).abs());
    }
    let ours_u: Vec<Vec<f64>> = (0..r)
        .map(|k| svd.left_vectors.column(k).iter().copied().collect())
        .collect();
    let ours_v: Vec<Vec<f64>> = (0..r)
        .map(|k| svd.right_vectors.row(k).iter().copied().collect())
        .collect();
    let mut angle: f64 = 0.0;
    let mut start = 0;
    while start < r {
        let mut end = start + 1;
        while end < oracle.values.len() && oracle.values[end - 1] - oracle.values[end] < group_gap {
            end += 1;
        }
        let take = end.min(r);
        angle = angle
            .max(common::containment_angle(
                &ours_u[start..take],
                &oracle.u[start..end],
            ))
            .max(common::containment_angle(
                &ours_v[start..take],
                &oracle.v[start..end],
            ));
        start = end;
    }
    Ok((value_err, angle))
}

pub fn svd_matches_oracle(cases: u32) -> Result<(), String> {
    run(cases, svd_case(40), |(rows, n, r, seed)| {
        let (value_err, angle) = compare_with_oracle(&rows, n, r, &SvdConfig { seed, ..strict() })
            .map_err(TestCaseError::fail)?;
        prop_assert!(value_err <= 1e-8, "singular value error {:e}", value_err);
        prop_assert!(angle <= 1e-6, "subspace angle {:e}", angle);
        Ok(())
    })
}

pub fn svd_deterministic(cases: u32) -> Result<(), String> {
    run(cases, svd_case(15), |(rows, n, r, seed)| {
        let m = SparseBinaryMatrix::from_rows(n, rows);
        let cfg = SvdConfig {
            seed,
            ..SvdConfig::default()
        };
        prop_assert_eq!(truncated_svd(&m, r, &cfg), truncated_svd(&m, r, &cfg));
        Ok(())
    })
}

// ---------------------------------------------------------------- cluster

fn points_case() -> impl Strategy<Value = (Vec<Vec<f64>>, usize, u64)> {
    (1usize..=4, 2usize..=25).prop_flat_map(|(dim, n)| {
        (
            prop::collection::vec(prop::collection::vec(-10.0f64..10.0, dim), n),
            1..=n.min(5),
            any::<u64>(),
        )
    })
}

fn kmeans_or_skip(
    points: &ReducedMatrix,
    k: usize,
    seed: u64,
) -> Option<tweetlens::cluster::ClusterModel> {
    kmeans(points, &KMeansConfig::new(k, seed)).ok()
}

pub fn inertia_monotone(cases: u32) -> Result<(), String> {
    run(cases, points_case(), |(rows, k, seed)| {
        let points = ReducedMatrix::from_rows(&rows);
        let Some(model) = kmeans_or_skip(&points, k, seed) else {
            return Ok(());
        };
        for w in model.inertia_trace.windows(2) {
            prop_assert!(
                w[1] <= w[0] * (1.0 + 1e-12) + 1e-12,
                "trace {:?}",
                model.inertia_trace
            );
        }
        prop_assert!(model.inertia >= 0.0);
        Ok(())
    })
}

pub fn kmeans_fixed_point(cases: u32) -> Result<(), String> {
    run(cases, points_case(), |(rows, k, seed)| {
        let points = ReducedMatrix::from_rows(&rows);
        let Some(model) = kmeans_or_skip(&points, k, seed) else {
            return Ok(());
        };
        let (again, inertia) = assign(&points, &model.centroids);
        prop_assert_eq!(&again, &model.assignments);
        prop_assert!((inertia - model.inertia).abs() <= 1e-9 * (1.0 + inertia));
        prop_assert!(model.assignments.iter().all(|&a| a < k));
        for (c, centroid) in model.centroids.iter().enumerate() {
            let members: Vec<&Vec<f64>> = rows
                .iter()
                .zip(&model.assignments)
                .filter(|(_, &a)| a == c)
                .map(|(p, _)| p)
                .collect();
            if members.is_empty() {
                continue;
            }
            for d in 0..centroid.len() {
                let mean = members.iter().map(|p| p[d]).sum::<f64>() / members.len() as f64;
                prop_assert!((mean - centroid[d]).abs() <= 1e-10 * (1.0 + mean.abs()));
            }
        }
        Ok(())
    })
}

pub fn kmeans_permutation(cases: u32) -> Result<(), String> {
    let case = points_case().prop_flat_map(|(rows, k, seed)| {
        let n = rows.len();
        (
            Just(rows),
            Just(k),
            Just(seed),
            Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
        )
    });
    run(cases, case, |(rows, k, seed, perm)| {
        let points = ReducedMatrix::from_rows(&rows);
        let Some(model) = kmeans_or_skip(&points, k, seed) else {
            return Ok(());
        };
        let permuted: Vec<Vec<f64>> = perm.iter().map(|&i| rows[i].clone()).collect();
        let other = kmeans(
            &ReducedMatrix::from_rows(&permuted),
            &KMeansConfig::new(k, seed),
        )
        .unwrap();
        // Pull the permuted labels back to the original order and compare partitions.
        let mut pulled = vec![0; rows.len()];
        for (pos, &i) in perm.iter().enumerate() {
            pulled[i] = other.assignments[pos];
        }
        prop_assert_eq!(
            common::canonical_partition(&pulled),
            common::canonical_partition(&model.assignments)
        );
        Ok(())
    })
}

pub fn kmeans_scale(cases: u32) -> Result<(), String> {
    run(
        cases,
        (points_case(), 0.01f64..100.0),
        |((rows, k, seed), c)| {
            let points = ReducedMatrix::from_rows(&rows);
            let Some(model) = kmeans_or_skip(&points, k, seed) else {
                return Ok(());
            };
            let scaled: Vec<Vec<f64>> = rows
                .iter()
                .map(|p| p.iter().map(|x| x * c).collect())
                .collect();
            let other = kmeans(
                &ReducedMatrix::from_rows(&scaled),
                &KMeansConfig::new(k, seed),
            )
            .unwrap();
            prop_assert_eq!(
                common::canonical_partition(&other.assignments),
                common::canonical_partition(&model.assignments)
            );
            let expected = model.inertia * c * c;
            prop_assert!((other.inertia - expected).abs() <= 1e-9 * (1.0 + expected));
            Ok(())
        },
    )
}

// ---------------------------------------------------------------- embed

fn cloud(min: usize, max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..=5, min..=max).prop_flat_map(|(dim, n)| {
        prop::collection::vec(prop::collection::vec(-5.0f64..5.0, dim), n)
    })
}

fn cloud_with_perplexity() -> impl Strategy<Value = (Vec<Vec<f64>>, f64)> {
    cloud(4, 14).prop_flat_map(|rows| {
        let n = rows.len() as f64;
        (Just(rows), 1.2f64..(n - 1.0))
    })
}

pub fn joint_is_distribution(cases: u32) -> Result<(), String> {
    run(cases, cloud_with_perplexity(), |(rows, perplexity)| {
        let Ok(aff) = pairwise_affinities(&ReducedMatrix::from_rows(&rows), perplexity) else {
            // Unreachable targets (near-coincident neighbours) are reported, not faked.
            return Ok(());
        };
        let n = rows.len();
        let mut total = 0.0;
        for i in 0..n {
            prop_assert_eq!(aff.p(i, i), 0.0);
            for j in 0..n {
                prop_assert!(aff.p(i, j) >= 0.0);
                prop_assert_eq!(aff.p(i, j), aff.p(j, i));
                total += aff.p(i, j);
            }
            let row = &aff.conditional[i * n..(i + 1) * n];
            prop_assert!((common::row_perplexity(row, i) - perplexity).abs() <= 1e-4);
        }
        prop_assert!((total - 1.0).abs() <= 1e-12);
        Ok(())
    })
}

fn embedding_strategy() -> impl Strategy<Value = Vec<[f64; 2]>> {
    prop::collection::vec(prop::array::uniform2(-20.0f64..20.0), 2..15)
}

pub fn q_is_distribution(cases: u32) -> Result<(), String> {
    run(cases, embedding_strategy(), |y| {
        let n = y.len();
        let q = low_dim_affinities(&y);
        let mut total = 0.0;
        for i in 0..n {
            prop_assert_eq!(q[i * n + i], 0.0);
            for j in 0..n {
                prop_assert!(q[i * n + j] >= 0.0);
                prop_assert_eq!(q[i * n + j], q[j * n + i]);
                total += q[i * n + j];
            }
        }
        // The 1e-12 floor can only add mass on pairs that were below it.
        prop_assert!((total - 1.0).abs() <= 1e-12 * (n * n) as f64 + 1e-12);
        Ok(())
    })
}

fn small_tsne() -> impl Strategy<Value = (Vec<Vec<f64>>, TsneConfig)> {
    (cloud(5, 10), any::<u64>(), 1usize..=3).prop_map(|(rows, seed, stages)| {
        let perplexity = (rows.len() as f64 / 3.0).max(1.5);
        let cfg = TsneConfig {
            perplexity,
            n_iter: 100 * stages + 100,
            exaggeration_iters: 50 * stages,
            learning_rate: 50.0,
            seed,
            ..TsneConfig::default()
        };
        (rows, cfg)
    })
}

fn run_tsne(rows: &[Vec<f64>], cfg: &TsneConfig) -> Option<Embedding2D> {
    tsne(&ReducedMatrix::from_rows(rows), cfg).ok()
}

pub fn kl_checkpoints(cases: u32) -> Result<(), String> {
    run(cases, small_tsne(), |(rows, cfg)| {
        let Some(emb) = run_tsne(&rows, &cfg) else {
            return Ok(());
        };
        prop_assert!(emb.kl_trace.iter().all(|&kl| kl >= 0.0));
        prop_assert!(emb.final_kl >= 0.0);
        prop_assert!(emb
            .coords
            .iter()
            .all(|p| p[0].is_finite() && p[1].is_finite()));
        // Checkpoints fall on multiples of 50; find the first at or after the end of exaggeration.
        let first_after = cfg.exaggeration_iters.div_ceil(50);
        if let Some(&kl) = emb.kl_trace.get(first_after) {
            prop_assert!(
                emb.final_kl <= kl + 1e-12,
                "final {} > {} (trace {:?})",
                emb.final_kl,
                kl,
                emb.kl_trace
            );
        }
        Ok(())
    })
}

pub fn kl_rigid_motion(cases: u32) -> Result<(), String> {
    let case = (
        cloud_with_perplexity(),
        any::<u64>(),
        -3.2f64..3.2,
        -50.0f64..50.0,
        -50.0f64..50.0,
    );
    run(cases, case, |((rows, perplexity), seed, theta, tx, ty)| {
        let Ok(aff) = pairwise_affinities(&ReducedMatrix::from_rows(&rows), perplexity) else {
            return Ok(());
        };
        let mut rng = common::rng(seed);
        let y: Vec<[f64; 2]> = (0..rows.len())
            .map(|_| {
                [
                    rand::Rng::random_range(&mut rng, -3.0..3.0),
                    rand::Rng::random_range(&mut rng, -3.0..3.0),
                ]
            })
            .collect();
        let (s, c) = theta.sin_cos();
        let moved: Vec<[f64; 2]> = y
            .iter()
            .map(|p| [c * p[0] - s * p[1] + tx, s * p[0] + c * p[1] + ty])
            .collect();
        let a = kl_divergence(&aff.joint, &y);
        let b = kl_divergence(&aff.joint, &moved);
        prop_assert!((a - b).abs() <= 1e-10, "{} vs {}", a, b);
        Ok(())
    })
}

pub fn tsne_deterministic(cases: u32) -> Result<(), String> {
    run(cases, small_tsne(), |(rows, cfg)| {
        let cfg = TsneConfig {
            n_iter: 120,
            exaggeration_iters: 60,
            ..cfg
        };
        let a = run_tsne(&rows, &cfg);
        let b = run_tsne(&rows, &cfg);
        prop_assert_eq!(a, b);
        Ok(())
    })
}

// ---------------------------------------------------------------- sentiment

const POSITIVE: &[&str] = &[
    "good",
    "great",
    "happy",
    "love",
    "nice",
    "excellent",
    "win",
    "helpful",
    "safe",
    "smart",
    "fun",
];
const NEGATIVE: &[&str] = &[
    "bad", "terrible", "hate", "sad", "awful", "dirty", "ugly", "poor", "horrible", "angry", "fail",
];
const NEUTRAL: &[&str] = &[
    "the",
    "city",
    "delivery",
    "van",
    "street",
    "traffic",
    "today",
    "parcel",
    "bike",
    "logistics",
];
const NEGATING: &[&str] = &["not", "never", "isn't", "without", "no", "least"];
const OTHER: &[&str] = &["but", "at", "BUT"];

fn sentence() -> impl Strategy<Value = String> {
    let pool: Vec<&str> = [POSITIVE, NEGATIVE, NEUTRAL, NEGATING, OTHER].concat();
    let word = (
        prop::sample::select(pool),
        any::<bool>(),
        prop::sample::select(vec!["", "", "", "!", "?", "!!", ",", "."]),
    )
        .prop_map(|(w, caps, punct)| {
            let w = if caps { w.to_uppercase() } else { w.to_owned() };
            format!("{w}{punct}")
        });
    prop::collection::vec(word, 0..12).prop_map(|ws| ws.join(" "))
}

fn flipped_lexicon(lex: &SentimentLexicon) -> SentimentLexicon {
    SentimentLexicon::with_valences(lex.valences.iter().map(|(k, v)| (k.clone(), -v)).collect())
}

pub fn compound_odd(cases: u32) -> Result<(), String> {
    let lex = SentimentLexicon::vader();
    let flipped = flipped_lexicon(&lex);
    run(cases, sentence(), |t| {
        let a = polarity(&t, &lex);
        let b = polarity(&t, &flipped);
        prop_assert!(
            (a.compound + b.compound).abs() <= 1e-9,
            "{:?}: {} vs {}",
            t,
            a.compound,
            b.compound
        );
        Ok(())
    })
}

fn bare(word: &str) -> String {
    word.trim_matches(|c: char| c.is_ascii_punctuation())
        .to_lowercase()
}

pub fn compound_monotone(cases: u32) -> Result<(), String> {
    let lex = SentimentLexicon::vader();
    run(
        cases,
        (sentence(), prop::sample::select(POSITIVE)),
        |(t, extra)| {
            let words: Vec<&str> = t.split_whitespace().collect();
            // Outside any negation window: none of the last three words may negate.
            if words
                .iter()
                .rev()
                .take(3)
                .any(|w| NEGATING.contains(&bare(w).as_str()))
            {
                return Ok(());
            }
            // Keep the caps emphasis context unchanged: an all-caps text gets an all-caps word.
            let all_caps = !words.is_empty()
                && words.iter().all(|w| {
                    w.chars().any(char::is_alphabetic) && !w.chars().any(char::is_lowercase)
                });
            let extra = if all_caps {
                extra.to_uppercase()
            } else {
                extra.to_owned()
            };
            let longer = if t.is_empty() {
                extra
            } else {
                format!("{t} {extra}")
            };
            let before = polarity(&t, &lex).compound;
            let after = polarity(&longer, &lex).compound;
            prop_assert!(
                after >= before - 1e-12,
                "{:?} {} -> {:?} {}",
                t,
                before,
                longer,
                after
            );
            Ok(())
        },
    )
}

pub fn proportions_sum(cases: u32) -> Result<(), String> {
    let lex = SentimentLexicon::vader();
    run(cases, prop_oneof![sentence(), any::<String>()], |t| {
        let s = polarity(&t, &lex);
        prop_assert!((s.negative + s.neutral + s.positive - 1.0).abs() <= 1e-6);
        prop_assert!((-1.0..=1.0).contains(&s.compound));
        prop_assert_eq!(s.label, classify(s.compound).unwrap());
        Ok(())
    })
}

pub fn classify_step(cases: u32) -> Result<(), String> {
    let lex = SentimentLexicon::vader();
    run(cases, (-1.0f64..=1.0, sentence()), |(c, t)| {
        let expected = if c >= 0.05 {
            Label::Positive
        } else if c <= -0.05 {
            Label::Negative
        } else {
            Label::Neutral
        };
        prop_assert_eq!(classify(c).unwrap(), expected);
        let a = polarity(&t, &lex);
        prop_assert_eq!(
            classify(a.compound).unwrap(),
            classify(polarity(&t, &lex).compound).unwrap()
        );
        Ok(())
    })
}

// ---------------------------------------------------------------- analytics

pub fn shares_sum(cases: u32) -> Result<(), String> {
    let counts = prop::collection::btree_map("[a-z ]{1,12}", 0usize..1_000_000, 1..12)
        .prop_filter("a positive count", |m| m.values().any(|&c| c > 0));
    run(cases, counts, |m: BTreeMap<String, usize>| {
        let shares = keyterm_shares(&m).unwrap();
        prop_assert!((shares.values().sum::<f64>() - 1.0).abs() <= 1e-12);
        Ok(())
    })
}

fn topic_terms() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(
        prop::sample::select(vec![
            "city logistics",
            "CARGO bikes",
            "paris",
            "growing",
            "freight",
        ]),
        1..3,
    )
    .prop_map(|v| v.into_iter().map(str::to_owned).collect())
}

pub fn topic_filter_subset(cases: u32) -> Result<(), String> {
    run(cases, (corpus_strategy(30), topic_terms()), |(c, terms)| {
        let once = topic_filter(&c, &terms).unwrap();
        let ids: Vec<&str> = c.iter().map(|d| d.id.as_str()).collect();
        let mut pos = 0;
        for d in once.iter() {
            let found = ids[pos..].iter().position(|id| *id == d.id);
            prop_assert!(found.is_some(), "not an ordered sub-multiset");
            pos += found.unwrap() + 1;
        }
        prop_assert_eq!(topic_filter(&once, &terms).unwrap(), once);
        Ok(())
    })
}

pub fn evolution_counts(cases: u32) -> Result<(), String> {
    let lex = SentimentLexicon::vader();
    let undated = prop::collection::vec(any::<bool>(), 30);
    run(
        cases,
        (corpus_strategy(30), topic_terms(), undated),
        |(mut c, terms, drop)| {
            for (d, &u) in c.documents.iter_mut().zip(&drop) {
                if u {
                    d.created_at = None;
                }
            }
            let scores = score_corpus(&c, &lex);
            let rows = sentiment_evolution(&c, &scores, &terms).unwrap();
            let expected = topic_filter(&c, &terms)
                .unwrap()
                .iter()
                .filter(|d| d.created_at.is_some())
                .count();
            prop_assert_eq!(rows.iter().map(|r| r.count).sum::<usize>(), expected);
            prop_assert!(rows.windows(2).all(|w| w[0].year < w[1].year));
            for r in &rows {
                let b = r.breakdown;
                prop_assert!(
                    (b.share_negative + b.share_neutral + b.share_positive - 1.0).abs() <= 1e-9
                );
            }
            Ok(())
        },
    )
}

pub fn map_cardinality(cases: u32) -> Result<(), String> {
    run(cases, (lemma_docs(), any::<u64>()), |(docs, seed)| {
        let Ok(vocab) = build_vocabulary(&docs, 3, 1) else {
            return Ok(());
        };
        let n = vocab.len();
        let mut rng = common::rng(seed);
        let coords: Vec<[f64; 2]> = (0..n)
            .map(|_| [rand::Rng::random(&mut rng), rand::Rng::random(&mut rng)])
            .collect();
        let embedding = Embedding2D {
            coords,
            final_kl: 0.0,
            kl_trace: vec![],
        };
        let clusters = tweetlens::cluster::ClusterModel {
            k: 1,
            centroids: vec![vec![0.0]],
            assignments: vec![0; n],
            inertia: 0.0,
            iterations_run: 0,
            inertia_trace: vec![],
        };
        let map = assemble_map(&vocab, &embedding, &clusters).unwrap();
        prop_assert_eq!(map.points.len(), n);
        for (p, e) in map.points.iter().zip(vocab.entries()) {
            prop_assert_eq!(&p.surface, &e.surface());
            prop_assert_eq!(p.df, e.document_frequency);
        }
        Ok(())
    })
}

/// Not an invariant: used by the acceptance runner to bound the whole suite.
pub fn best_of_restarts_is_min(
    points: &ReducedMatrix,
    k: usize,
    seed: u64,
    restarts: usize,
) -> bool {
    let best = best_of_restarts(points, &KMeansConfig::new(k, seed), restarts).unwrap();
    (0..restarts).all(|r| {
        best.inertia
            <= kmeans(points, &KMeansConfig::new(k, seed + r as u64))
                .unwrap()
                .inertia
    })
}
