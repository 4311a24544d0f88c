//! Brute-force nearest-neighbor queries over a row-major point matrix.
//! Ties on distance are always broken by lower point index so every caller
//! sees the same deterministic ordering.

use crate::linalg::{squared_distance, Matrix};

/// Indices of the `k` nearest neighbors of `points[i]`, excluding `i` itself,
/// ordered by (distance, index) ascending.
pub fn k_nearest(points: &Matrix, i: usize, k: usize) -> Vec<usize> {
    let n = points.rows();
    let query = points.row(i);
    let mut cand: Vec<(f64, usize)> = (0..n)
        .filter(|&j| j != i)
        .map(|j| (squared_distance(query, points.row(j)), j))
        .collect();
    let k = k.min(cand.len());
    cand.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    cand.truncate(k);
    cand.into_iter().map(|(_, j)| j).collect()
}

/// For every point, the Euclidean distance to its `k`-th nearest neighbor
/// (neighbors exclude the point itself).
pub fn kth_neighbor_distances(points: &Matrix, k: usize) -> Vec<f64> {
    let n = points.rows();
    (0..n)
        .map(|i| {
            let mut d2: Vec<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| squared_distance(points.row(i), points.row(j)))
                .collect();
            let kk = k.min(d2.len()).saturating_sub(1);
            d2.sort_by(|a, b| a.partial_cmp(b).unwrap());
            d2[kk].sqrt()
        })
        .collect()
}

/// Full pairwise Euclidean distance matrix.
pub fn distance_matrix(points: &Matrix) -> Matrix {
    let n = points.rows();
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let dist = squared_distance(points.row(i), points.row(j)).sqrt();
            d.set(i, j, dist);
            d.set(j, i, dist);
        }
    }
    d
}
