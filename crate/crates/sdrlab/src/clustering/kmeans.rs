//! Lloyd's algorithm with k-means++ seeding, squared-Euclidean assignment,
//! and best-of-replicates selection by total within-cluster SSE.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ClusteringResult, Metadata, Method};
use crate::error::{Error, Result};
use crate::linalg::{squared_distance, Matrix};

pub fn kmeans(
    points: &Matrix,
    k: usize,
    replicates: usize,
    max_iter: usize,
    seed: u64,
) -> Result<ClusteringResult> {
    let n = points.rows();
    if n == 0 {
        return Err(Error::data("kmeans: empty input"));
    }
    if k == 0 || k > n {
        return Err(Error::config(format!("kmeans: need 1 <= k <= N, got k = {k}, N = {n}")));
    }
    let replicates = replicates.max(1);

    let mut best: Option<(f64, Vec<usize>, Matrix, Vec<f64>)> = None;
    for r in 0..replicates {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let run = lloyd_run(points, k, max_iter, &mut rng);
        let replace = match &best {
            None => true,
            Some((best_sse, ..)) => run.0 < *best_sse,
        };
        if replace {
            best = Some(run);
        }
    }
    let (sse, assignment, centroids, sse_history) = best.unwrap();

    let labels: Vec<i64> = assignment.iter().map(|&a| a as i64).collect();
    let centroid_rows: Vec<Vec<f64>> = (0..k).map(|c| centroids.row(c).to_vec()).collect();
    Ok(ClusteringResult {
        labels,
        n_clusters: k,
        method: Method::Kmeans,
        metadata: Metadata::Kmeans {
            centroids: centroid_rows,
            sse,
            sse_history,
        },
    })
}

fn lloyd_run(
    points: &Matrix,
    k: usize,
    max_iter: usize,
    rng: &mut ChaCha8Rng,
) -> (f64, Vec<usize>, Matrix, Vec<f64>) {
    let n = points.rows();
    let d = points.cols();
    let mut centroids = plus_plus_seed(points, k, rng);
    let mut assignment = vec![0usize; n];
    let mut sse_history = Vec::new();
    let mut sse = f64::INFINITY;

    for _ in 0..max_iter.max(1) {
        // assignment step; ties go to the lower centroid index
        let mut changed = false;
        let mut new_sse = 0.0;
        for i in 0..n {
            let mut best_c = 0;
            let mut best_d = f64::INFINITY;
            for c in 0..k {
                let dist = squared_distance(points.row(i), centroids.row(c));
                if dist < best_d {
                    best_d = dist;
                    best_c = c;
                }
            }
            if assignment[i] != best_c {
                assignment[i] = best_c;
                changed = true;
            }
            new_sse += best_d;
        }
        sse_history.push(new_sse);
        let converged = !changed;
        sse = new_sse.min(sse);

        // update step
        let mut sums = Matrix::zeros(k, d);
        let mut counts = vec![0usize; k];
        for i in 0..n {
            let c = assignment[i];
            counts[c] += 1;
            for (s, &v) in sums.row_mut(c).iter_mut().zip(points.row(i)) {
                *s += v;
            }
        }
        // empty-cluster repair: reseed at the point farthest from its centroid
        for c in 0..k {
            if counts[c] == 0 {
                let far = (0..n)
                    .max_by(|&a, &b| {
                        let da = squared_distance(points.row(a), centroids.row(assignment[a]));
                        let db = squared_distance(points.row(b), centroids.row(assignment[b]));
                        da.partial_cmp(&db).unwrap().then(b.cmp(&a))
                    })
                    .unwrap();
                let old = assignment[far];
                counts[old] -= 1;
                for (s, &v) in sums.row_mut(old).iter_mut().zip(points.row(far)) {
                    *s -= v;
                }
                counts[c] = 1;
                for (s, &v) in sums.row_mut(c).iter_mut().zip(points.row(far)) {
                    *s = v;
                }
                assignment[far] = c;
            }
        }
        for c in 0..k {
            let inv = 1.0 / counts[c] as f64;
            for s in sums.row_mut(c) {
                *s *= inv;
            }
        }
        centroids = sums;
        if converged {
            break;
        }
    }

    // final SSE against the final centroids
    let mut final_sse = 0.0;
    for i in 0..n {
        final_sse += squared_distance(points.row(i), centroids.row(assignment[i]));
    }
    sse_history.push(final_sse);
    (final_sse, assignment, centroids, sse_history)
}

/// k-means++ seeding: first center uniform, the rest sampled with
/// probability proportional to squared distance to the nearest chosen
/// center. Falls back to the lowest unchosen index when all mass is zero
/// (duplicate points).
fn plus_plus_seed(points: &Matrix, k: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let n = points.rows();
    let d = points.cols();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    chosen.push(rng.gen_range(0..n));
    let mut min_d2: Vec<f64> = (0..n)
        .map(|i| squared_distance(points.row(i), points.row(chosen[0])))
        .collect();

    while chosen.len() < k {
        let total: f64 = min_d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen_range(0.0..total);
            let mut pick = n - 1;
            for (i, &w) in min_d2.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            (0..n).find(|i| !chosen.contains(i)).unwrap_or(0)
        };
        chosen.push(next);
        for i in 0..n {
            let d2 = squared_distance(points.row(i), points.row(next));
            if d2 < min_d2[i] {
                min_d2[i] = d2;
            }
        }
    }

    let mut centroids = Matrix::zeros(k, d);
    for (c, &i) in chosen.iter().enumerate() {
        centroids.row_mut(c).copy_from_slice(points.row(i));
    }
    centroids
}
