//! DBSCAN with the knee-rule parameter estimator: MinPts = round(ln N) and
//! eps at the point of the sorted k-distance plot farthest from the chord
//! joining its endpoints.

use super::{ClusteringResult, Metadata, Method};
use crate::error::{Error, Result};
use crate::knn::kth_neighbor_distances;
use crate::linalg::{squared_distance, Matrix};

/// eps is a Euclidean radius; comparisons run on squared distances
/// internally, which preserves the ordering. The neighborhood count is
/// inclusive of the point itself.
pub fn dbscan(points: &Matrix, eps: f64, min_pts: usize) -> Result<ClusteringResult> {
    if eps <= 0.0 {
        return Err(Error::config("dbscan: eps must be positive"));
    }
    if min_pts == 0 {
        return Err(Error::config("dbscan: min_pts must be >= 1"));
    }
    let n = points.rows();
    let eps2 = eps * eps;

    // neighbor lists within eps (self included in the count)
    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if squared_distance(points.row(i), points.row(j)) <= eps2 {
                neighbors[i].push(j);
                neighbors[j].push(i);
            }
        }
    }
    let core: Vec<bool> = (0..n).map(|i| neighbors[i].len() + 1 >= min_pts).collect();

    // clusters = connected components of core points under eps-reachability
    let mut labels = vec![-1i64; n];
    let mut next_cluster = 0i64;
    for start in 0..n {
        if !core[start] || labels[start] != -1 {
            continue;
        }
        let id = next_cluster;
        next_cluster += 1;
        labels[start] = id;
        let mut stack = vec![start];
        while let Some(p) = stack.pop() {
            for &q in &neighbors[p] {
                if core[q] && labels[q] == -1 {
                    labels[q] = id;
                    stack.push(q);
                }
            }
        }
    }

    // border points join the first core point reaching them in ascending
    // index order
    for p in 0..n {
        if core[p] || labels[p] != -1 {
            continue;
        }
        for q in 0..n {
            if core[q] && squared_distance(points.row(p), points.row(q)) <= eps2 {
                labels[p] = labels[q];
                break;
            }
        }
    }

    Ok(ClusteringResult {
        labels,
        n_clusters: next_cluster as usize,
        method: Method::Dbscan,
        metadata: Metadata::Dbscan {
            eps,
            min_pts,
            core,
        },
    })
}

/// Index of the knee of a sorted k-distance plot: the point with maximal
/// perpendicular distance to the chord from (0, d[0]) to (len-1, d[len-1]).
/// Ties break toward the smallest index.
pub fn knee_index(sorted_distances: &[f64]) -> usize {
    let n = sorted_distances.len();
    if n < 2 {
        return 0;
    }
    let x0 = 0.0;
    let y0 = sorted_distances[0];
    let x1 = (n - 1) as f64;
    let y1 = sorted_distances[n - 1];
    let dx = x1 - x0;
    let dy = y1 - y0;
    let norm = (dx * dx + dy * dy).sqrt();
    let mut best = 0usize;
    let mut best_d = -1.0;
    for (i, &y) in sorted_distances.iter().enumerate() {
        let cross = (dx * (y - y0) - dy * (i as f64 - x0)).abs();
        let d = cross / norm;
        if d > best_d + 1e-15 {
            best_d = d;
            best = i;
        }
    }
    best
}

/// MinPts = max(2, round(ln N)); eps from the knee of the MinPts-th
/// nearest-neighbor distance plot.
pub fn dbscan_auto_params(points: &Matrix) -> Result<(f64, usize)> {
    let n = points.rows();
    if n < 3 {
        return Err(Error::data("dbscan_auto_params: need N >= 3"));
    }
    let min_pts = auto_min_pts(n);
    let mut dists = kth_neighbor_distances(points, min_pts);
    dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let eps = dists[knee_index(&dists)];
    if eps <= 0.0 {
        // degenerate all-coincident input: any positive radius works
        return Ok((f64::MIN_POSITIVE, min_pts));
    }
    Ok((eps, min_pts))
}

pub fn auto_min_pts(n: usize) -> usize {
    ((n as f64).ln().round() as usize).max(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturation_single_cluster() {
        let pts = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]);
        let r = dbscan(&pts, 100.0, 1).unwrap();
        assert_eq!(r.labels, vec![0, 0, 0]);
        assert_eq!(r.n_clusters, 1);
    }

    #[test]
    fn isolated_outlier_is_noise() {
        let mut rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 * 0.1, 0.0]).collect();
        rows.push(vec![100.0, 0.0]);
        let r = dbscan(&Matrix::from_rows(&rows), 1.0, 3).unwrap();
        assert!(r.labels[..10].iter().all(|&l| l == 0));
        assert_eq!(r.labels[10], -1);
    }

    #[test]
    fn two_blobs_with_gap() {
        let mut rows = Vec::new();
        for i in 0..20 {
            rows.push(vec![i as f64 * 0.1, 0.0]);
        }
        for i in 0..20 {
            rows.push(vec![10.0 + i as f64 * 0.1, 0.0]);
        }
        let r = dbscan(&Matrix::from_rows(&rows), 1.0, 3).unwrap();
        assert_eq!(r.n_clusters, 2);
        assert!(r.labels[..20].iter().all(|&l| l == r.labels[0]));
        assert!(r.labels[20..].iter().all(|&l| l == r.labels[20]));
        assert_ne!(r.labels[0], r.labels[20]);
    }

    /// Brute-force reachability closure on the eps-graph over core points.
    fn oracle_dbscan(points: &Matrix, eps: f64, min_pts: usize) -> Vec<i64> {
        let n = points.rows();
        let within = |i: usize, j: usize| {
            squared_distance(points.row(i), points.row(j)) <= eps * eps
        };
        let core: Vec<bool> = (0..n)
            .map(|i| (0..n).filter(|&j| within(i, j)).count() >= min_pts)
            .collect();
        // transitive closure among cores by repeated passes
        let mut comp: Vec<usize> = (0..n).collect();
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..n {
                for j in 0..n {
                    if core[i] && core[j] && within(i, j) && comp[j] != comp[i] {
                        let m = comp[i].min(comp[j]);
                        comp[i] = m;
                        comp[j] = m;
                        changed = true;
                    }
                }
            }
        }
        let mut labels = vec![-1i64; n];
        let mut ids: Vec<usize> = Vec::new();
        for i in 0..n {
            if core[i] {
                let root = comp[i];
                let id = match ids.iter().position(|&r| r == root) {
                    Some(p) => p,
                    None => {
                        ids.push(root);
                        ids.len() - 1
                    }
                };
                labels[i] = id as i64;
            }
        }
        for i in 0..n {
            if !core[i] {
                for q in 0..n {
                    if core[q] && within(i, q) {
                        labels[i] = labels[q];
                        break;
                    }
                }
            }
        }
        labels
    }

    #[test]
    fn matches_bruteforce_closure() {
        use rand::{Rng, SeedableRng};
        for seed in 0..10u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let rows: Vec<Vec<f64>> = (0..50)
                .map(|_| vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)])
                .collect();
            let pts = Matrix::from_rows(&rows);
            let fast = dbscan(&pts, 0.8, 4).unwrap();
            let slow = oracle_dbscan(&pts, 0.8, 4);
            // identical up to cluster-id renaming; noise must match exactly
            assert_eq!(fast.labels.len(), slow.len());
            for i in 0..50 {
                for j in 0..50 {
                    assert_eq!(
                        fast.labels[i] == fast.labels[j] && fast.labels[i] != -1,
                        slow[i] == slow[j] && slow[i] != -1,
                        "seed {seed}: pair ({i},{j}) disagrees"
                    );
                }
                assert_eq!(fast.labels[i] == -1, slow[i] == -1, "seed {seed}: noise flag {i}");
            }
        }
    }

    #[test]
    fn auto_min_pts_formula() {
        assert_eq!(auto_min_pts(2981), 8);
        assert_eq!(auto_min_pts(100), 5);
        assert_eq!(auto_min_pts(24075), 10);
        assert_eq!(auto_min_pts(3), 2);
    }

    #[test]
    fn knee_on_reference_plots() {
        // sorted k-distances [1,1,1,1,10] -> knee at index 3
        assert_eq!(knee_index(&[1.0, 1.0, 1.0, 1.0, 10.0]), 3);
        // perfectly linear plot: all chord distances 0, tie-break index 0
        assert_eq!(knee_index(&[1.0, 2.0, 3.0, 4.0, 5.0]), 0);
    }

    #[test]
    fn auto_params_on_identical_distances() {
        // square grid with uniform nearest-neighbor distance
        let rows: Vec<Vec<f64>> = (0..3)
            .flat_map(|i| (0..3).map(move |j| vec![i as f64, j as f64]))
            .collect();
        let (eps, min_pts) = dbscan_auto_params(&Matrix::from_rows(&rows)).unwrap();
        assert!(eps > 0.0);
        assert_eq!(min_pts, 2);
    }
}
