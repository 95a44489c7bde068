//! K-Means over reduced feature vectors.

use std::io::{self, Write};

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::decompose::ReducedMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum ClusterError {
    #[error("k = {k} but only {n_points} points")]
    KTooLarge { k: usize, n_points: usize },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("n_restarts must be at least 1")]
    ZeroRestarts,
    #[error("points contain non-finite values")]
    NonFinite,
    #[error("all {n_points} points are identical; {k} clusters cannot be separated")]
    DegenerateInput { k: usize, n_points: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
}

impl KMeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            seed,
            max_iter: 300,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    pub k: usize,
    /// k × dim, row-major.
    pub centroids: Vec<Vec<f64>>,
    pub assignments: Vec<usize>,
    pub inertia: f64,
    pub iterations_run: usize,
    /// Inertia after each assignment step, in order.
    pub inertia_trace: Vec<f64>,
}

impl ClusterModel {
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }

    /// `surface TAB cluster_id` lines, one per point, using the given labels.
    pub fn write_tsv<W: Write, S: AsRef<str>>(&self, labels: &[S], mut out: W) -> io::Result<()> {
        assert_eq!(labels.len(), self.assignments.len());
        for (label, c) in labels.iter().zip(&self.assignments) {
            writeln!(out, "{}\t{}", label.as_ref(), c)?;
        }
        Ok(())
    }
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid per point (lowest id on ties) and the total squared distance.
pub fn assign(points: &ReducedMatrix, centroids: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let mut inertia = 0.0;
    let assignments = points
        .rows()
        .map(|p| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = squared_distance(p, centroid);
                if d < best_d {
                    best = c;
                    best_d = d;
                }
            }
            inertia += best_d;
            best
        })
        .collect();
    (assignments, inertia)
}

fn kmeans_plus_plus(points: &ReducedMatrix, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.n_points();
    let mut centroids = vec![points.row(rng.random_range(0..n)).to_vec()];
    let mut nearest: Vec<f64> = points
        .rows()
        .map(|p| squared_distance(p, &centroids[0]))
        .collect();
    while centroids.len() < k {
        let next = match WeightedIndex::new(&nearest) {
            Ok(dist) => dist.sample(rng),
            // Every point already coincides with a centroid.
            Err(_) => rng.random_range(0..n),
        };
        let c = points.row(next).to_vec();
        for (d, p) in nearest.iter_mut().zip(points.rows()) {
            *d = d.min(squared_distance(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

/// Means of assigned points. An empty cluster is re-seeded at the point farthest
/// from its current centroid, lowest index first on ties.
fn update_centroids(
    points: &ReducedMatrix,
    assignments: &[usize],
    old: &[Vec<f64>],
) -> Vec<Vec<f64>> {
    let k = old.len();
    let dim = points.dim();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &a) in points.rows().zip(assignments) {
        counts[a] += 1;
        for (s, x) in sums[a].iter_mut().zip(p) {
            *s += x;
        }
    }
    let mut taken = vec![false; points.n_points()];
    for c in 0..k {
        if counts[c] > 0 {
            let n = counts[c] as f64;
            sums[c].iter_mut().for_each(|s| *s /= n);
        }
    }
    for c in 0..k {
        if counts[c] == 0 {
            let mut far = None;
            let mut far_d = -1.0;
            for (i, (p, &a)) in points.rows().zip(assignments).enumerate() {
                if taken[i] {
                    continue;
                }
                let d = squared_distance(p, &old[a]);
                if d > far_d {
                    far = Some(i);
                    far_d = d;
                }
            }
            if let Some(i) = far {
                taken[i] = true;
                sums[c] = points.row(i).to_vec();
            }
        }
    }
    sums
}

fn validate(points: &ReducedMatrix, k: usize) -> Result<(), ClusterError> {
    let n = points.n_points();
    if k == 0 {
        return Err(ClusterError::ZeroK);
    }
    if k > n {
        return Err(ClusterError::KTooLarge { k, n_points: n });
    }
    if !points.is_finite() {
        return Err(ClusterError::NonFinite);
    }
    if k > 1 && points.rows().all(|p| p == points.row(0)) {
        return Err(ClusterError::DegenerateInput { k, n_points: n });
    }
    Ok(())
}

/// Indices of the points in lexicographic order of their coordinates.
fn canonical_order(points: &ReducedMatrix) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.n_points()).collect();
    order.sort_by(|&a, &b| {
        points
            .row(a)
            .iter()
            .zip(points.row(b))
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    order
}

/// Lloyd iterations from a k-means++ start.
///
/// Seeding runs over the points in lexicographic order, so the resulting
/// partition does not depend on the order the points are given in.
///
/// Iteration stops when an assignment step changes nothing; the centroid shift
/// of the following update would be exactly zero. The returned centroids are the
/// means of the returned assignment and every point sits with its nearest centroid.
pub fn kmeans(points: &ReducedMatrix, config: &KMeansConfig) -> Result<ClusterModel, ClusterError> {
    validate(points, config.k)?;
    let order = canonical_order(points);
    let sorted = ReducedMatrix::from_flat(
        points.n_points(),
        points.dim(),
        order
            .iter()
            .flat_map(|&i| points.row(i).iter().copied())
            .collect(),
    );
    let mut model = lloyd(&sorted, config);
    let mut assignments = vec![0; order.len()];
    for (pos, &i) in order.iter().enumerate() {
        assignments[i] = model.assignments[pos];
    }
    model.assignments = assignments;
    Ok(model)
}

fn lloyd(points: &ReducedMatrix, config: &KMeansConfig) -> ClusterModel {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut centroids = kmeans_plus_plus(points, config.k, &mut rng);
    let mut trace = Vec::new();
    let (mut assignments, mut inertia) = assign(points, &centroids);
    trace.push(inertia);
    let mut iterations = 0;

    while iterations < config.max_iter {
        centroids = update_centroids(points, &assignments, &centroids);
        iterations += 1;
        let (next, next_inertia) = assign(points, &centroids);
        trace.push(next_inertia);
        let unchanged = next == assignments;
        assignments = next;
        inertia = next_inertia;
        if unchanged {
            break;
        }
    }

    ClusterModel {
        k: config.k,
        centroids,
        assignments,
        inertia,
        iterations_run: iterations,
        inertia_trace: trace,
    }
}

/// Runs `kmeans` with seeds `seed..seed + n_restarts` and keeps the lowest
/// inertia (earliest seed on ties).
pub fn best_of_restarts(
    points: &ReducedMatrix,
    config: &KMeansConfig,
    n_restarts: usize,
) -> Result<ClusterModel, ClusterError> {
    if n_restarts == 0 {
        return Err(ClusterError::ZeroRestarts);
    }
    let mut best: Option<ClusterModel> = None;
    for r in 0..n_restarts {
        let cfg = KMeansConfig {
            seed: config.seed.wrapping_add(r as u64),
            ..*config
        };
        let model = kmeans(points, &cfg)?;
        if best.as_ref().is_none_or(|b| model.inertia < b.inertia) {
            best = Some(model);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Mean silhouette coefficient; points in singleton clusters score 0.
pub fn silhouette_score(points: &ReducedMatrix, assignments: &[usize], k: usize) -> f64 {
    let n = points.n_points();
    if n < 2 || k < 2 {
        return 0.0;
    }
    let mut sizes = vec![0usize; k];
    for &a in assignments {
        sizes[a] += 1;
    }
    let mut total = 0.0;
    for i in 0..n {
        let own = assignments[i];
        if sizes[own] <= 1 {
            continue;
        }
        let mut sums = vec![0.0; k];
        for j in 0..n {
            if i != j {
                sums[assignments[j]] += squared_distance(points.row(i), points.row(j)).sqrt();
            }
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own && sizes[c] > 0)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        if b.is_finite() {
            let denom = a.max(b);
            if denom > 0.0 {
                total += (b - a) / denom;
            }
        }
    }
    total / n as f64
}

/// Silhouette for each k in `ks`, as a report; nothing is chosen automatically.
pub fn silhouette_sweep(
    points: &ReducedMatrix,
    ks: &[usize],
    n_restarts: usize,
    seed: u64,
) -> Result<Vec<(usize, f64)>, ClusterError> {
    ks.iter()
        .map(|&k| {
            let model = best_of_restarts(points, &KMeansConfig::new(k, seed), n_restarts)?;
            Ok((k, silhouette_score(points, &model.assignments, k)))
        })
        .collect()
}
