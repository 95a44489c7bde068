//! Exact t-SNE of two tight pairs and a loose cloud in 5-D.

use tweetlens::decompose::ReducedMatrix;
use tweetlens::embed::{pairwise_affinities, tsne, TsneConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rows = vec![
        vec![0.0, 0.0, 0.0, 0.0, 0.0],
        vec![0.1, 0.0, 0.0, 0.0, 0.0],
        vec![10.0, 10.0, 0.0, 0.0, 0.0],
        vec![10.0, 10.1, 0.0, 0.0, 0.0],
        vec![5.0, 0.0, 8.0, 0.0, 0.0],
        vec![0.0, 5.0, 0.0, 8.0, 0.0],
        vec![3.0, 3.0, 3.0, 3.0, 3.0],
    ];
    let points = ReducedMatrix::from_rows(&rows);

    let affinities = pairwise_affinities(&points, 3.0)?;
    println!("per-point precisions: {:.4?}", affinities.precisions);

    // Seven points need a far smaller step than the default 200 while P is exaggerated.
    let defaults = TsneConfig::default();
    let config = TsneConfig {
        perplexity: 3.0,
        learning_rate: rows.len() as f64 / (4.0 * defaults.early_exaggeration),
        n_iter: 500,
        exaggeration_iters: 100,
        seed: 11,
        ..defaults
    };
    let embedding = tsne(&points, &config)?;
    println!("KL every 50 iterations: {:.4?}", embedding.kl_trace);
    println!("final KL {:.5}", embedding.final_kl);
    for (i, [x, y]) in embedding.coords.iter().enumerate() {
        println!("  point {i}: ({x:+.3}, {y:+.3})");
    }
    Ok(())
}
