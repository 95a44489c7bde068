//! Load the demo corpus, drop retweets and repeats, count entries per query.
//!
//! cargo run --example ingest_and_dedup [-- path/to/tweets.jsonl]

use tweetlens::analytics::{keyterm_shares, tweets_per_year, whole_percent};
use tweetlens::corpus::{deduplicate, keyterm_counts, load_corpus, LoadMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/demo_corpus.jsonl").into());
    let loaded = load_corpus(&path, LoadMode::Lenient)?;
    println!(
        "{} records ({} skipped, {} undated)",
        loaded.corpus.len(),
        loaded.skipped.len(),
        loaded.undated
    );

    let corpus = deduplicate(&loaded.corpus);
    println!("{} after removing repeated entries", corpus.len());

    let counts = keyterm_counts(&corpus);
    let shares = keyterm_shares(&counts)?;
    for (query, n) in &counts {
        println!("  {query:<22} {n:>4}  ~{}%", whole_percent(shares[query]));
    }
    for (year, n) in tweets_per_year(&corpus).entries {
        println!("  {year}  {}", "#".repeat(n));
    }
    Ok(())
}
