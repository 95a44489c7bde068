//! K-Means with restarts on three Gaussian blobs, plus a silhouette sweep.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use tweetlens::cluster::{best_of_restarts, silhouette_sweep, KMeansConfig};
use tweetlens::decompose::ReducedMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let noise = Normal::new(0.0, 0.4)?;
    let centres = [[0.0, 0.0], [5.0, 1.0], [2.0, 6.0]];
    let rows: Vec<Vec<f64>> = centres
        .iter()
        .flat_map(|c| {
            (0..30)
                .map(|_| vec![c[0] + noise.sample(&mut rng), c[1] + noise.sample(&mut rng)])
                .collect::<Vec<_>>()
        })
        .collect();
    let points = ReducedMatrix::from_rows(&rows);

    let model = best_of_restarts(&points, &KMeansConfig::new(3, 7), 8)?;
    println!(
        "inertia {:.4} after {} iterations",
        model.inertia, model.iterations_run
    );
    println!("cluster sizes {:?}", model.cluster_sizes());
    for c in &model.centroids {
        println!("  centroid {c:.3?}");
    }

    println!("silhouette by k:");
    for (k, s) in silhouette_sweep(&points, &[2, 3, 4, 5, 6], 4, 7)? {
        println!("  k={k}  {s:.4}");
    }
    Ok(())
}
