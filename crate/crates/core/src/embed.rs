//! Exact t-SNE into two dimensions.
//!
//! Affinities are dense `n × n` row-major buffers; all loops run in a fixed
//! order so a given seed always reproduces the same embedding.

use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::decompose::ReducedMatrix;

pub const PERPLEXITY_TOL: f64 = 1e-4;
/// The search aims well inside `PERPLEXITY_TOL` so recomputed entropies agree.
const SEARCH_TOL: f64 = 1e-10;
pub const MAX_BISECTION_STEPS: usize = 64;
pub const Q_FLOOR: f64 = 1e-12;
pub const KL_CHECKPOINT_EVERY: usize = 50;
const MAX_BRACKET_STEPS: usize = 2100;
const INIT_STD: f64 = 1e-4;
const MIN_GAIN: f64 = 0.01;

#[derive(Debug, Error, PartialEq)]
pub enum EmbedError {
    #[error("t-SNE needs at least 4 points (got {0})")]
    TooFewPoints(usize),
    #[error("invalid t-SNE configuration: {0}")]
    InvalidConfig(String),
    #[error("target perplexity unreachable for point {index} (closest achieved {achieved:.6})")]
    BandwidthSearchFailure { index: usize, achieved: f64 },
    #[error("coordinates diverged at iteration {iteration}")]
    NumericalOverflow { iteration: usize },
    #[error("input points contain non-finite values")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsneConfig {
    pub perplexity: f64,
    pub learning_rate: f64,
    pub n_iter: usize,
    pub early_exaggeration: f64,
    pub exaggeration_iters: usize,
    pub momentum_early: f64,
    pub momentum_late: f64,
    pub seed: u64,
}

impl Default for TsneConfig {
    fn default() -> Self {
        Self {
            perplexity: 30.0,
            learning_rate: 200.0,
            n_iter: 1000,
            early_exaggeration: 12.0,
            exaggeration_iters: 250,
            momentum_early: 0.5,
            momentum_late: 0.8,
            seed: 0,
        }
    }
}

impl TsneConfig {
    pub fn validate(&self, n_points: usize) -> Result<(), EmbedError> {
        let bad = |m: String| Err(EmbedError::InvalidConfig(m));
        if self.perplexity.is_nan() || self.perplexity <= 0.0 {
            return bad(format!("perplexity must be > 0 (got {})", self.perplexity));
        }
        if self.perplexity >= n_points as f64 {
            return bad(format!(
                "perplexity {} must be below the number of points {n_points}",
                self.perplexity
            ));
        }
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return bad("learning_rate must be > 0".into());
        }
        if self.early_exaggeration.is_nan() || self.early_exaggeration < 1.0 {
            return bad("early_exaggeration must be >= 1".into());
        }
        for m in [self.momentum_early, self.momentum_late] {
            if !(0.0..1.0).contains(&m) {
                return bad(format!("momentum {m} outside [0, 1)"));
            }
        }
        Ok(())
    }
}

/// Input-space affinities.
#[derive(Debug, Clone, PartialEq)]
pub struct Affinities {
    pub n: usize,
    /// Symmetric joint distribution, zero diagonal, sums to 1.
    pub joint: Vec<f64>,
    /// Row `i` is P(· | i).
    pub conditional: Vec<f64>,
    /// Gaussian precision (1 / 2σ²) chosen for each point.
    pub precisions: Vec<f64>,
}

impl Affinities {
    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.joint[i * self.n + j]
    }
}

fn squared_distances(points: &ReducedMatrix) -> Vec<f64> {
    let n = points.n_points();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v: f64 = points
                .row(i)
                .iter()
                .zip(points.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    d
}

/// Conditional row for precision `beta`; distances are shifted by their minimum
/// so the exponentials never underflow to all zeros. Returns the perplexity e^H.
fn conditional_row(shifted: &[f64], beta: f64, out: &mut [f64]) -> f64 {
    let mut z = 0.0;
    for (o, &d) in out.iter_mut().zip(shifted) {
        *o = (-beta * d).exp();
        z += *o;
    }
    let mut weighted = 0.0;
    for (o, &d) in out.iter_mut().zip(shifted) {
        *o /= z;
        weighted += *o * d;
    }
    (z.ln() + beta * weighted).exp()
}

fn search_row(
    index: usize,
    shifted: &[f64],
    target: f64,
    out: &mut [f64],
) -> Result<f64, EmbedError> {
    let spread = shifted.iter().cloned().fold(0.0, f64::max);
    if spread <= 1e-12 * (1.0 + spread) {
        // Equidistant neighbours: every precision gives the uniform distribution.
        let u = 1.0 / shifted.len() as f64;
        out.iter_mut().for_each(|o| *o = u);
        return Ok(0.0);
    }
    let mean = shifted.iter().sum::<f64>() / shifted.len() as f64;
    let start = 1.0 / mean;
    let perp = |beta: f64, out: &mut [f64]| conditional_row(shifted, beta, out);

    let mut best = (f64::INFINITY, start);
    let mut note = |beta: f64, p: f64| {
        if (p - target).abs() < best.0 {
            best = ((p - target).abs(), beta);
        }
    };

    // Bracket [lo, hi] with perp(lo) >= target >= perp(hi); perplexity falls as beta grows.
    let p0 = perp(start, out);
    note(start, p0);
    if (p0 - target).abs() <= SEARCH_TOL {
        return Ok(start);
    }
    let (mut lo, mut hi);
    if p0 > target {
        lo = start;
        hi = start * 2.0;
        let mut steps = 0;
        loop {
            let p = perp(hi, out);
            note(hi, p);
            if (p - target).abs() <= SEARCH_TOL {
                return Ok(hi);
            }
            if p < target {
                break;
            }
            steps += 1;
            if steps >= MAX_BRACKET_STEPS || !hi.is_finite() {
                return Err(EmbedError::BandwidthSearchFailure { index, achieved: p });
            }
            lo = hi;
            hi *= 2.0;
        }
    } else {
        hi = start;
        lo = start / 2.0;
        let mut steps = 0;
        loop {
            let p = perp(lo, out);
            note(lo, p);
            if (p - target).abs() <= SEARCH_TOL {
                return Ok(lo);
            }
            if p > target {
                break;
            }
            steps += 1;
            if steps >= MAX_BRACKET_STEPS || lo == 0.0 {
                let p_flat = perp(0.0, out);
                if p_flat < target {
                    return Err(EmbedError::BandwidthSearchFailure {
                        index,
                        achieved: p_flat,
                    });
                }
                lo = 0.0;
                break;
            }
            hi = lo;
            lo /= 2.0;
        }
    }

    for _ in 0..MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let p = perp(mid, out);
        note(mid, p);
        if (p - target).abs() <= SEARCH_TOL {
            return Ok(mid);
        }
        if p > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let achieved = perp(best.1, out);
    if (achieved - target).abs() <= PERPLEXITY_TOL {
        return Ok(best.1);
    }
    Err(EmbedError::BandwidthSearchFailure { index, achieved })
}

/// Per-point Gaussian bandwidths matched to `perplexity`, symmetrized into a joint
/// distribution `(P(j|i) + P(i|j)) / 2n`.
pub fn pairwise_affinities(
    points: &ReducedMatrix,
    perplexity: f64,
) -> Result<Affinities, EmbedError> {
    let n = points.n_points();
    if n < 4 {
        return Err(EmbedError::TooFewPoints(n));
    }
    if !points.is_finite() {
        return Err(EmbedError::NonFinite);
    }
    if perplexity.is_nan() || perplexity <= 0.0 || perplexity >= n as f64 {
        return Err(EmbedError::InvalidConfig(format!(
            "perplexity {perplexity} must lie in (0, {n})"
        )));
    }
    let dist = squared_distances(points);
    let mut conditional = vec![0.0; n * n];
    let mut precisions = vec![0.0; n];
    let mut shifted = Vec::with_capacity(n - 1);
    let mut row = vec![0.0; n - 1];
    for i in 0..n {
        shifted.clear();
        shifted.extend((0..n).filter(|&j| j != i).map(|j| dist[i * n + j]));
        let min = shifted.iter().cloned().fold(f64::INFINITY, f64::min);
        shifted.iter_mut().for_each(|d| *d -= min);
        precisions[i] = search_row(i, &shifted, perplexity, &mut row)?;
        let mut it = row.iter();
        for j in 0..n {
            if j != i {
                conditional[i * n + j] = *it.next().expect("row length");
            }
        }
    }
    let mut joint = vec![0.0; n * n];
    let denom = 2.0 * n as f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                joint[i * n + j] = (conditional[i * n + j] + conditional[j * n + i]) / denom;
            }
        }
    }
    Ok(Affinities {
        n,
        joint,
        conditional,
        precisions,
    })
}

/// Student-t kernel values `1 / (1 + ‖yᵢ − yⱼ‖²)` and their off-diagonal sum.
fn kernel(y: &[[f64; 2]]) -> (Vec<f64>, f64) {
    let n = y.len();
    let mut num = vec![0.0; n * n];
    let mut z = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = y[i][0] - y[j][0];
            let dy = y[i][1] - y[j][1];
            let v = 1.0 / (1.0 + dx * dx + dy * dy);
            num[i * n + j] = v;
            num[j * n + i] = v;
            z += 2.0 * v;
        }
    }
    (num, z)
}

/// Output-space joint distribution Q with the `Q_FLOOR` applied.
pub fn low_dim_affinities(y: &[[f64; 2]]) -> Vec<f64> {
    let (num, z) = kernel(y);
    let n = y.len();
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                q[i * n + j] = (num[i * n + j] / z).max(Q_FLOOR);
            }
        }
    }
    q
}

/// KL(P‖Q) for the joint `p` (row-major, n × n) and embedding `y`.
pub fn kl_divergence(p: &[f64], y: &[[f64; 2]]) -> f64 {
    let q = low_dim_affinities(y);
    p.iter()
        .zip(&q)
        .filter(|(&pij, _)| pij > 0.0)
        .map(|(&pij, &qij)| pij * (pij / qij).ln())
        .sum()
}

/// KL(P‖Q) and its gradient `4 Σⱼ (pᵢⱼ − qᵢⱼ)(yᵢ − yⱼ) / (1 + ‖yᵢ − yⱼ‖²)`.
pub fn kl_gradient(p: &[f64], y: &[[f64; 2]]) -> (f64, Vec<[f64; 2]>) {
    let n = y.len();
    let (num, z) = kernel(y);
    let mut grad = vec![[0.0; 2]; n];
    let mut kl = 0.0;
    for i in 0..n {
        let mut g = [0.0; 2];
        for j in 0..n {
            if i == j {
                continue;
            }
            let pij = p[i * n + j];
            let nij = num[i * n + j];
            let qij = nij / z;
            let coeff = 4.0 * (pij - qij) * nij;
            g[0] += coeff * (y[i][0] - y[j][0]);
            g[1] += coeff * (y[i][1] - y[j][1]);
            if pij > 0.0 {
                kl += pij * (pij / qij.max(Q_FLOOR)).ln();
            }
        }
        grad[i] = g;
    }
    (kl, grad)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Embedding2D {
    pub coords: Vec<[f64; 2]>,
    pub final_kl: f64,
    /// KL(P‖Q) at iterations 0, 50, 100, ... (unexaggerated P).
    pub kl_trace: Vec<f64>,
}

impl Embedding2D {
    /// `label TAB x TAB y` lines with 17 significant digits.
    pub fn write_tsv<W: Write, S: AsRef<str>>(&self, labels: &[S], mut out: W) -> io::Result<()> {
        assert_eq!(labels.len(), self.coords.len());
        for (label, [x, y]) in labels.iter().zip(&self.coords) {
            writeln!(out, "{}\t{x:.16e}\t{y:.16e}", label.as_ref())?;
        }
        Ok(())
    }
}

pub fn initial_coords(n: usize, seed: u64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, INIT_STD).expect("valid std");
    (0..n)
        .map(|_| [normal.sample(&mut rng), normal.sample(&mut rng)])
        .collect()
}

pub fn tsne(points: &ReducedMatrix, config: &TsneConfig) -> Result<Embedding2D, EmbedError> {
    let n = points.n_points();
    if n < 4 {
        return Err(EmbedError::TooFewPoints(n));
    }
    config.validate(n)?;
    let affinities = pairwise_affinities(points, config.perplexity)?;
    optimize(&affinities.joint, initial_coords(n, config.seed), config)
}

/// Gradient descent with momentum and per-coordinate adaptive gains, starting
/// from `y`. P is multiplied by the exaggeration factor for the first
/// `exaggeration_iters` iterations. Momentum can overshoot, so the returned
/// configuration is the lowest-KL one among the initial checkpoint, the
/// checkpoints after exaggeration and the last iterate.
pub fn optimize(
    p: &[f64],
    mut y: Vec<[f64; 2]>,
    config: &TsneConfig,
) -> Result<Embedding2D, EmbedError> {
    let n = y.len();
    let exaggerated: Vec<f64> = p.iter().map(|v| v * config.early_exaggeration).collect();
    let mut update = vec![[0.0; 2]; n];
    let mut gains = vec![[1.0_f64; 2]; n];
    let mut kl_trace = Vec::new();
    let mut best: Option<(f64, Vec<[f64; 2]>)> = None;

    for iter in 0..config.n_iter {
        let early = iter < config.exaggeration_iters;
        if iter % KL_CHECKPOINT_EVERY == 0 {
            let kl = kl_divergence(p, &y);
            kl_trace.push(kl);
            if (iter == 0 || !early) && best.as_ref().is_none_or(|(b, _)| kl < *b) {
                best = Some((kl, y.clone()));
            }
        }
        let (_, grad) = kl_gradient(if early { &exaggerated } else { p }, &y);
        let momentum = if early {
            config.momentum_early
        } else {
            config.momentum_late
        };
        for i in 0..n {
            for d in 0..2 {
                let g = grad[i][d];
                gains[i][d] = if g * update[i][d] < 0.0 {
                    gains[i][d] + 0.2
                } else {
                    (gains[i][d] * 0.8).max(MIN_GAIN)
                };
                update[i][d] = momentum * update[i][d] - config.learning_rate * gains[i][d] * g;
                y[i][d] += update[i][d];
            }
        }
        let mean = y
            .iter()
            .fold([0.0; 2], |acc, p| [acc[0] + p[0], acc[1] + p[1]]);
        let mean = [mean[0] / n as f64, mean[1] / n as f64];
        for p in y.iter_mut() {
            p[0] -= mean[0];
            p[1] -= mean[1];
        }
        if y.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(EmbedError::NumericalOverflow { iteration: iter });
        }
    }
    let mut final_kl = kl_divergence(p, &y);
    if let Some((kl, coords)) = best {
        if kl < final_kl {
            final_kl = kl;
            y = coords;
        }
    }
    if kl_trace.is_empty() {
        kl_trace.push(final_kl);
    }
    Ok(Embedding2D {
        coords: y,
        final_kl,
        kl_trace,
    })
}
