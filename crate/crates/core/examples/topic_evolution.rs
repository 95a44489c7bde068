//! Corpus-wide sentiment and the yearly trend of one topic.

use tweetlens::analytics::{corpus_breakdown, sentiment_evolution, topic_filter};
use tweetlens::corpus::{deduplicate, load_corpus, LoadMode};
use tweetlens::sentiment::{score_corpus, SentimentLexicon};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/demo_corpus.jsonl");
    let corpus = deduplicate(&load_corpus(path, LoadMode::Strict)?.corpus);
    let scores = score_corpus(&corpus, &SentimentLexicon::vader());
    println!("all documents: {}", corpus_breakdown(&scores)?.describe());

    let topic = vec!["physical internet".to_string()];
    println!(
        "{} documents mention the topic",
        topic_filter(&corpus, &topic)?.len()
    );
    for row in sentiment_evolution(&corpus, &scores, &topic)? {
        println!(
            "  {}  n={:<3} {}",
            row.year,
            row.count,
            row.breakdown.describe()
        );
    }
    Ok(())
}
