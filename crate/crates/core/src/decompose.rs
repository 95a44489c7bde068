//! Truncated SVD of the sparse incidence matrix.
//!
//! A randomized range finder (Gaussian test matrix, oversampling, power
//! iterations) gives an initial subspace, and further subspace iterations run
//! until every requested triplet satisfies `‖A·v − σ·u‖ ≤ tol·σ₁`. The small
//! projected problem is solved densely with `nalgebra`.

use std::io::{self, Write};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::features::SparseBinaryMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum SvdError {
    #[error("rank {requested} exceeds min(rows, cols) = {max}")]
    RankTooLarge { requested: usize, max: usize },
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("matrix has no incidences")]
    EmptyMatrix,
    #[error("no convergence after {iterations} iterations (relative residual {residual:.3e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdConfig {
    pub seed: u64,
    /// Subspace iterations allowed after the initial range finder.
    pub max_iter: usize,
    /// Residual bound relative to the largest singular value.
    pub tol: f64,
    pub oversample: usize,
    pub power_iters: usize,
}

impl Default for SvdConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            max_iter: 500,
            tol: 1e-10,
            oversample: 10,
            power_iters: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult {
    /// n_rows × r, orthonormal columns.
    pub left_vectors: DMatrix<f64>,
    /// Non-increasing, non-negative.
    pub singular_values: Vec<f64>,
    /// r × n_cols, orthonormal rows.
    pub right_vectors: DMatrix<f64>,
    pub rank_requested: usize,
    /// Subspace iterations performed after the range finder.
    pub iterations: usize,
    /// Largest `‖A·vᵢ − σᵢ·uᵢ‖ / σ₁` at return.
    pub residual: f64,
}

/// Dense points, one row per feature.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedMatrix {
    n_points: usize,
    dim: usize,
    data: Vec<f64>,
}

impl ReducedMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let dim = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == dim), "ragged rows");
        Self {
            n_points: rows.len(),
            dim,
            data: rows.concat(),
        }
    }

    pub fn from_flat(n_points: usize, dim: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n_points * dim);
        Self {
            n_points,
            dim,
            data,
        }
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.n_points).map(move |i| self.row(i))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// One row per line, space-separated, 17 significant digits.
    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// `A · X` for a binary CSR `A`.
pub fn sparse_mul(a: &SparseBinaryMatrix, x: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.n_cols(), x.nrows());
    let mut out = DMatrix::zeros(a.n_rows(), x.ncols());
    for c in 0..x.ncols() {
        let col = x.column(c);
        for i in 0..a.n_rows() {
            out[(i, c)] = a.row(i).iter().map(|&j| col[j]).sum();
        }
    }
    out
}

/// `Aᵀ · Y` for a binary CSR `A`.
pub fn sparse_mul_transpose(a: &SparseBinaryMatrix, y: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.n_rows(), y.nrows());
    let mut out = DMatrix::zeros(a.n_cols(), y.ncols());
    for c in 0..y.ncols() {
        for i in 0..a.n_rows() {
            let v = y[(i, c)];
            for &j in a.row(i) {
                out[(j, c)] += v;
            }
        }
    }
    out
}

fn orthonormalize(m: DMatrix<f64>) -> DMatrix<f64> {
    m.qr().q()
}

struct Ritz {
    left: DMatrix<f64>,
    sigma: Vec<f64>,
    right: DMatrix<f64>,
}

/// Rayleigh-Ritz on the subspace `q`: SVD of `Qᵀ A`, sorted descending.
fn ritz(a: &SparseBinaryMatrix, q: &DMatrix<f64>) -> (Ritz, DMatrix<f64>) {
    let bt = sparse_mul_transpose(a, q);
    let svd = bt.clone().svd(true, true);
    let w = svd.u.expect("u requested");
    let zt = svd.v_t.expect("v_t requested");
    let s = svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]).then(i.cmp(&j)));

    let l = order.len();
    let mut small_left = DMatrix::zeros(q.ncols(), l);
    let mut right = DMatrix::zeros(a.n_cols(), l);
    let mut sigma = Vec::with_capacity(l);
    for (dst, &src) in order.iter().enumerate() {
        small_left.set_column(dst, &zt.row(src).transpose());
        right.set_column(dst, &w.column(src));
        sigma.push(s[src]);
    }
    (
        Ritz {
            left: q * small_left,
            sigma,
            right,
        },
        bt,
    )
}

fn max_relative_residual(a: &SparseBinaryMatrix, ritz: &Ritz, r: usize) -> f64 {
    let sigma_max = ritz.sigma[0];
    let av = sparse_mul(a, &ritz.right.columns(0, r).into_owned());
    (0..r)
        .map(|i| (av.column(i) - ritz.left.column(i) * ritz.sigma[i]).norm() / sigma_max)
        .fold(0.0, f64::max)
}

pub fn truncated_svd(
    a: &SparseBinaryMatrix,
    r: usize,
    config: &SvdConfig,
) -> Result<SvdResult, SvdError> {
    let max_rank = a.n_rows().min(a.n_cols());
    if r == 0 {
        return Err(SvdError::ZeroRank);
    }
    if r > max_rank {
        return Err(SvdError::RankTooLarge {
            requested: r,
            max: max_rank,
        });
    }
    if a.nnz() == 0 {
        return Err(SvdError::EmptyMatrix);
    }

    let width = (r + config.oversample).min(max_rank);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let omega = DMatrix::from_fn(a.n_cols(), width, |_, _| StandardNormal.sample(&mut rng));
    let mut q = orthonormalize(sparse_mul(a, &omega));
    for _ in 0..config.power_iters {
        q = orthonormalize(sparse_mul(a, &orthonormalize(sparse_mul_transpose(a, &q))));
    }

    let mut iterations = 0;
    loop {
        let (ritz, bt) = ritz(a, &q);
        let residual = max_relative_residual(a, &ritz, r);
        if residual <= config.tol {
            return Ok(finish(ritz, r, iterations, residual));
        }
        if iterations >= config.max_iter {
            return Err(SvdError::ConvergenceFailure {
                iterations,
                residual,
            });
        }
        q = orthonormalize(sparse_mul(a, &orthonormalize(bt)));
        iterations += 1;
    }
}

fn finish(ritz: Ritz, r: usize, iterations: usize, residual: f64) -> SvdResult {
    let mut left = ritz.left.columns(0, r).into_owned();
    let mut right = ritz.right.columns(0, r).transpose();
    for k in 0..r {
        // Largest-magnitude entry of each left vector is made positive.
        let col = left.column(k);
        let mut pivot = 0;
        for i in 1..col.len() {
            if col[i].abs() > col[pivot].abs() {
                pivot = i;
            }
        }
        if col[pivot] < 0.0 {
            left.column_mut(k).neg_mut();
            right.row_mut(k).neg_mut();
        }
    }
    SvdResult {
        left_vectors: left,
        singular_values: ritz.sigma[..r].to_vec(),
        right_vectors: right,
        rank_requested: r,
        iterations,
        residual,
    }
}

/// Row `i` of the result is `uᵢ ⊙ σ`, the feature's coordinates in the rank-r space.
pub fn reduce(svd: &SvdResult) -> ReducedMatrix {
    let n = svd.left_vectors.nrows();
    let r = svd.singular_values.len();
    let mut data = Vec::with_capacity(n * r);
    for i in 0..n {
        for (k, s) in svd.singular_values.iter().enumerate() {
            data.push(svd.left_vectors[(i, k)] * s);
        }
    }
    ReducedMatrix::from_flat(n, r, data)
}
