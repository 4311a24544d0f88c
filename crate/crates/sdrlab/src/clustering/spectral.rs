//! Spectral clustering on a symmetrized kNN graph: embed into the k
//! eigenvectors of smallest eigenvalue of the symmetric normalized
//! Laplacian, row-normalize, and run k-means on the embedding.
//!
//! The eigenproblem is solved by block subspace iteration on 2I - L with
//! periodic Rayleigh-Ritz extraction, which only ever touches the sparse
//! adjacency lists, so it scales to the graph sizes the timing harness uses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{dbscan::auto_min_pts, kmeans, ClusteringResult, Metadata, Method};
use crate::error::{Error, Result};
use crate::knn::k_nearest;
use crate::linalg::{sym_eigen, Matrix};

pub fn spectral(points: &Matrix, k: usize, knn: Option<usize>, seed: u64) -> Result<ClusteringResult> {
    let n = points.rows();
    if k == 0 || k > n {
        return Err(Error::config(format!(
            "spectral: need 1 <= k <= N, got k = {k}, N = {n}"
        )));
    }
    let knn = knn.unwrap_or_else(|| auto_min_pts(n)).min(n - 1).max(1);

    // kNN graph, symmetrized by union: edge if either endpoint lists the other
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in k_nearest(points, i, knn) {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }

    let n_components = count_components(&adj);
    let warning = if n_components > k {
        Some(format!(
            "kNN graph has {n_components} connected components but k = {k}; clusters align with components"
        ))
    } else {
        None
    };

    let inv_sqrt_deg: Vec<f64> = adj
        .iter()
        .map(|l| {
            if l.is_empty() {
                0.0
            } else {
                1.0 / (l.len() as f64).sqrt()
            }
        })
        .collect();

    let (eigenvalues, embedding) = smallest_eigenvectors(&adj, &inv_sqrt_deg, k, seed)?;

    // row-normalize; zero rows stay zero
    let mut rows = embedding;
    for i in 0..n {
        let norm: f64 = rows.row(i).iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for v in rows.row_mut(i) {
                *v /= norm;
            }
        }
    }

    let km = kmeans(&rows, k, 10, 100, seed)?;
    Ok(ClusteringResult {
        labels: km.labels,
        n_clusters: k,
        method: Method::Spectral,
        metadata: Metadata::Spectral {
            eigenvalues,
            n_components,
            warning,
        },
    })
}

fn count_components(adj: &[Vec<usize>]) -> usize {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut comps = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        comps += 1;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(p) = stack.pop() {
            for &q in &adj[p] {
                if !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
    }
    comps
}

/// y = L x with L = I - D^{-1/2} W D^{-1/2}, binary weights.
fn apply_laplacian(adj: &[Vec<usize>], s: &[f64], x: &[f64], y: &mut [f64]) {
    for i in 0..adj.len() {
        let mut acc = 0.0;
        for &j in &adj[i] {
            acc += s[j] * x[j];
        }
        y[i] = x[i] - s[i] * acc;
    }
}

/// The k eigenpairs of smallest eigenvalue of the normalized Laplacian.
/// Returns eigenvalues ascending and the eigenvectors as columns of an
/// N x k matrix.
fn smallest_eigenvectors(
    adj: &[Vec<usize>],
    s: &[f64],
    k: usize,
    seed: u64,
) -> Result<(Vec<f64>, Matrix)> {
    let n = adj.len();
    let block = (k + 4).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0000_0000_0001);

    // column-major block of iterate vectors
    let mut x: Vec<Vec<f64>> = (0..block)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    orthonormalize(&mut x, &mut rng);

    let mut lx = vec![0.0; n];
    const MAX_ITERS: usize = 2000;
    const TOL: f64 = 1e-9;
    let mut ritz_vals = vec![0.0; block];

    for iter in 0..MAX_ITERS {
        // X <- (2I - L) X
        for col in x.iter_mut() {
            apply_laplacian(adj, s, col, &mut lx);
            for (v, &l) in col.iter_mut().zip(&lx) {
                *v = 2.0 * *v - l;
            }
        }
        orthonormalize(&mut x, &mut rng);

        if iter % 10 == 9 || iter == MAX_ITERS - 1 {
            // Rayleigh-Ritz on the block: T = X^T M X, rotate X by its
            // eigenvectors (descending in M = ascending in L)
            let mut t = Matrix::zeros(block, block);
            let mut mx: Vec<Vec<f64>> = Vec::with_capacity(block);
            for col in &x {
                apply_laplacian(adj, s, col, &mut lx);
                mx.push(col.iter().zip(&lx).map(|(&v, &l)| 2.0 * v - l).collect());
            }
            for a in 0..block {
                for b in a..block {
                    let dot: f64 = x[a].iter().zip(&mx[b]).map(|(&p, &q)| p * q).sum();
                    t.set(a, b, dot);
                    t.set(b, a, dot);
                }
            }
            let (vals, vecs) = sym_eigen(&t)?;
            let mut rotated: Vec<Vec<f64>> = vec![vec![0.0; n]; block];
            for (a, col) in rotated.iter_mut().enumerate() {
                for b in 0..block {
                    let w = vecs.get(b, a);
                    if w != 0.0 {
                        for (cv, &xv) in col.iter_mut().zip(&x[b]) {
                            *cv += w * xv;
                        }
                    }
                }
            }
            x = rotated;
            ritz_vals = vals;

            // residuals of the k pairs we actually need
            let mut worst: f64 = 0.0;
            for (a, col) in x.iter().enumerate().take(k) {
                apply_laplacian(adj, s, col, &mut lx);
                let theta = ritz_vals[a];
                let res: f64 = col
                    .iter()
                    .zip(&lx)
                    .map(|(&v, &l)| {
                        let m = 2.0 * v - l;
                        let r = m - theta * v;
                        r * r
                    })
                    .sum::<f64>()
                    .sqrt();
                worst = worst.max(res);
            }
            if worst < TOL {
                break;
            }
        }
    }

    let eigenvalues: Vec<f64> = ritz_vals.iter().take(k).map(|&theta| 2.0 - theta).collect();
    let mut out = Matrix::zeros(n, k);
    for (a, col) in x.iter().enumerate().take(k) {
        for (i, &v) in col.iter().enumerate() {
            out.set(i, a, v);
        }
    }
    Ok((eigenvalues, out))
}

fn orthonormalize(cols: &mut [Vec<f64>], rng: &mut ChaCha8Rng) {
    for a in 0..cols.len() {
        for b in 0..a {
            let dot: f64 = cols[a].iter().zip(&cols[b]).map(|(&p, &q)| p * q).sum();
            let (head, tail) = cols.split_at_mut(a);
            for (v, &w) in tail[0].iter_mut().zip(&head[b]) {
                *v -= dot * w;
            }
        }
        let norm: f64 = cols[a].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for v in &mut cols[a] {
                *v /= norm;
            }
        } else {
            // rank collapse: reseed this direction deterministically
            for v in &mut cols[a] {
                *v = rng.gen_range(-1.0..1.0);
            }
            let norm: f64 = cols[a].iter().map(|v| v * v).sum::<f64>().sqrt();
            for v in &mut cols[a] {
                *v /= norm.max(1e-300);
            }
        }
    }
}
