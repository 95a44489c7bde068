//! Build the n-gram vocabulary and the binary feature × document matrix.

use tweetlens::corpus::{deduplicate, load_corpus, LoadMode};
use tweetlens::features::{build_matrix, build_vocabulary, top_ngrams};
use tweetlens::textprep::TextPipeline;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/demo_corpus.jsonl");
    let corpus = deduplicate(&load_corpus(path, LoadMode::Strict)?.corpus);
    let docs = TextPipeline::default().process_corpus(&corpus);

    let vocab = build_vocabulary(&docs, 3, 5)?;
    let matrix = build_matrix(&docs, &vocab);
    println!(
        "{} features x {} documents, {} incidences ({:.2}% dense)",
        matrix.n_rows(),
        matrix.n_cols(),
        matrix.nnz(),
        100.0 * matrix.nnz() as f64 / (matrix.n_rows() * matrix.n_cols()) as f64
    );
    for (surface, df) in top_ngrams(&vocab, 15) {
        println!("  {df:>4}  {surface}");
    }
    Ok(())
}
