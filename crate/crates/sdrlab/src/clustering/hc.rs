//! Agglomerative hierarchical clustering via the nearest-neighbor chain
//! algorithm with Lance-Williams updates on a condensed distance matrix.
//!
//! Stored dissimilarities: complete linkage keeps Euclidean distances; ward
//! keeps the SSE-increase measure |A||B|/(|A|+|B|) * ||mu_A - mu_B||^2,
//! which for singletons is half the squared Euclidean distance. Both
//! linkages are reducible, so the chain algorithm reproduces the greedy
//! closest-pair hierarchy.

use super::{canonicalize_labels, ClusteringResult, MergeStep, Metadata, Method};
use crate::error::{Error, Result};
use crate::linalg::{squared_distance, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linkage {
    Complete,
    Ward,
}

pub fn hc(points: &Matrix, k: usize, linkage: Linkage) -> Result<ClusteringResult> {
    let n = points.rows();
    if n == 0 {
        return Err(Error::data("hc: empty input"));
    }
    if k == 0 || k > n {
        return Err(Error::config(format!("hc: need 1 <= k <= N, got k = {k}, N = {n}")));
    }

    let merges = build_hierarchy(points, linkage);
    let labels = cut_tree(n, &merges, k);
    let mut labels: Vec<i64> = labels.into_iter().map(|l| l as i64).collect();
    let n_clusters = canonicalize_labels(&mut labels);
    debug_assert_eq!(n_clusters, k);

    Ok(ClusteringResult {
        labels,
        n_clusters: k,
        method: match linkage {
            Linkage::Complete => Method::HcComplete,
            Linkage::Ward => Method::HcWard,
        },
        metadata: Metadata::Hierarchical { merges },
    })
}

/// Full merge tree from N singletons. Each step names one member point of
/// either side, so the tree can be replayed with a union-find.
pub fn build_hierarchy(points: &Matrix, linkage: Linkage) -> Vec<MergeStep> {
    let n = points.rows();
    if n < 2 {
        return Vec::new();
    }

    // condensed upper-triangular dissimilarity matrix
    let idx = |i: usize, j: usize| -> usize {
        debug_assert!(i < j);
        n * i - i * (i + 1) / 2 + (j - i - 1)
    };
    let mut dist = vec![0.0f64; n * (n - 1) / 2];
    for i in 0..n {
        for j in (i + 1)..n {
            let d2 = squared_distance(points.row(i), points.row(j));
            dist[idx(i, j)] = match linkage {
                Linkage::Complete => d2.sqrt(),
                Linkage::Ward => 0.5 * d2,
            };
        }
    }

    let get = |dist: &[f64], a: usize, b: usize| -> f64 {
        if a < b {
            dist[idx(a, b)]
        } else {
            dist[idx(b, a)]
        }
    };

    let mut active: Vec<bool> = vec![true; n];
    let mut size: Vec<usize> = vec![1; n];
    let mut merges: Vec<MergeStep> = Vec::with_capacity(n - 1);
    let mut chain: Vec<usize> = Vec::with_capacity(n);

    for _ in 0..(n - 1) {
        if chain.is_empty() {
            let start = active.iter().position(|&a| a).unwrap();
            chain.push(start);
        }
        loop {
            let top = *chain.last().unwrap();
            // nearest active neighbor, ties by lower index
            let mut best = usize::MAX;
            let mut best_d = f64::INFINITY;
            for c in 0..n {
                if c == top || !active[c] {
                    continue;
                }
                let d = get(&dist, top, c);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            let prev = if chain.len() >= 2 {
                Some(chain[chain.len() - 2])
            } else {
                None
            };
            if Some(best) == prev || (prev.is_some() && get(&dist, top, prev.unwrap()) <= best_d) {
                // reciprocal nearest neighbors: merge top and prev
                let b = chain.pop().unwrap();
                let a = chain.pop().unwrap();
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                let height = get(&dist, lo, hi);

                // Lance-Williams update into slot `lo`
                let (sa, sb) = (size[lo], size[hi]);
                for c in 0..n {
                    if !active[c] || c == lo || c == hi {
                        continue;
                    }
                    let dac = get(&dist, lo, c);
                    let dbc = get(&dist, hi, c);
                    let new_d = match linkage {
                        Linkage::Complete => dac.max(dbc),
                        Linkage::Ward => {
                            let sc = size[c];
                            ((sa + sc) as f64 * dac + (sb + sc) as f64 * dbc
                                - sc as f64 * height)
                                / (sa + sb + sc) as f64
                        }
                    };
                    let pos = if lo < c { idx(lo, c) } else { idx(c, lo) };
                    dist[pos] = new_d;
                }
                active[hi] = false;
                size[lo] = sa + sb;
                merges.push(MergeStep {
                    cluster_a: lo,
                    cluster_b: hi,
                    dissimilarity: height,
                    size: sa + sb,
                });
                break;
            }
            chain.push(best);
        }
    }
    merges
}

/// Cut the hierarchy to exactly `k` clusters by replaying the N-k cheapest
/// merges (stable sort by height keeps children ahead of their parents).
pub fn cut_tree(n: usize, merges: &[MergeStep], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..merges.len()).collect();
    order.sort_by(|&a, &b| {
        merges[a]
            .dissimilarity
            .partial_cmp(&merges[b].dissimilarity)
            .unwrap()
            .then(a.cmp(&b))
    });

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &m in order.iter().take(n.saturating_sub(k)) {
        let ra = find(&mut parent, merges[m].cluster_a);
        let rb = find(&mut parent, merges[m].cluster_b);
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi] = lo;
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}
