//! Randomized truncated SVD of a small incidence matrix.

use tweetlens::decompose::{reduce, truncated_svd, SvdConfig};
use tweetlens::features::SparseBinaryMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Two overlapping blocks of co-occurring features.
    let rows = vec![
        vec![0, 1, 2],
        vec![0, 1, 2],
        vec![1, 2, 3],
        vec![4, 5],
        vec![4, 5, 6],
        vec![5, 6],
    ];
    let matrix = SparseBinaryMatrix::from_rows(7, rows);
    let svd = truncated_svd(&matrix, 3, &SvdConfig::default())?;
    println!("singular values: {:.6?}", svd.singular_values);
    println!(
        "subspace iterations: {}, residual {:.2e}",
        svd.iterations, svd.residual
    );

    let points = reduce(&svd);
    for (i, row) in points.rows().enumerate() {
        println!("  feature {i}: {row:+.4?}");
    }
    Ok(())
}
