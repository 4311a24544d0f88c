//! External clustering validation: permutation-matched accuracy, purity, and
//! normalized mutual information, all computed from a shared confusion matrix.
//!
//! `accuracy` uses an optimal one-to-one assignment between predicted
//! clusters and ground-truth classes; `brute_force_accuracy` evaluates the
//! same quantity by literal permutation enumeration and serves as its oracle.

use serde::Serialize;

use crate::error::{Error, Result};

/// Contingency table between predicted clusters (rows) and ground-truth
/// classes (columns). A DBSCAN noise label (-1) gets its own dedicated row.
#[derive(Debug, Clone)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
    /// Predicted label per row, ascending (so -1, when present, is row 0).
    pub pred_ids: Vec<i64>,
    /// Ground-truth label per column, ascending.
    pub class_ids: Vec<i64>,
    /// Row index holding the noise label, if any.
    pub noise_row: Option<usize>,
    pub n_total: u64,
}

pub fn confusion(pred: &[i64], truth: &[i64]) -> Result<ConfusionMatrix> {
    if pred.len() != truth.len() {
        return Err(Error::data(format!(
            "label length mismatch: {} vs {}",
            pred.len(),
            truth.len()
        )));
    }
    if truth.iter().any(|&g| g < 0) {
        return Err(Error::data("ground truth must not contain -1"));
    }
    let mut pred_ids: Vec<i64> = pred.to_vec();
    pred_ids.sort_unstable();
    pred_ids.dedup();
    let mut class_ids: Vec<i64> = truth.to_vec();
    class_ids.sort_unstable();
    class_ids.dedup();

    let row_of = |l: i64| pred_ids.binary_search(&l).unwrap();
    let col_of = |g: i64| class_ids.binary_search(&g).unwrap();

    let mut counts = vec![vec![0u64; class_ids.len()]; pred_ids.len()];
    for (&l, &g) in pred.iter().zip(truth) {
        counts[row_of(l)][col_of(g)] += 1;
    }
    let noise_row = pred_ids.iter().position(|&l| l == -1);
    Ok(ConfusionMatrix {
        counts,
        pred_ids,
        class_ids,
        noise_row,
        n_total: pred.len() as u64,
    })
}

/// Maximum-weight perfect matching on a square non-negative matrix, returned
/// as total matched weight. Hungarian algorithm with integer potentials, so
/// the result is exact.
fn optimal_assignment_weight(weights: &[Vec<u64>]) -> u64 {
    let n = weights.len();
    if n == 0 {
        return 0;
    }
    // convert maximization to minimization with non-negative costs
    let max_w = weights
        .iter()
        .flat_map(|r| r.iter())
        .copied()
        .max()
        .unwrap_or(0) as i64;
    let cost = |i: usize, j: usize| max_w - weights[i][j] as i64;

    // standard O(n^3) Hungarian with row/column potentials (1-based aux arrays)
    let inf = i64::MAX / 2;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1]; // p[j] = row matched to column j
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut total = 0u64;
    for j in 1..=n {
        if p[j] != 0 {
            total += weights[p[j] - 1][j - 1];
        }
    }
    total
}

/// Rows of the confusion matrix that take part in accuracy matching (noise
/// excluded), zero-padded to a square matrix.
fn padded_match_matrix(cm: &ConfusionMatrix) -> Vec<Vec<u64>> {
    let rows: Vec<&Vec<u64>> = cm
        .counts
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != cm.noise_row)
        .map(|(_, r)| r)
        .collect();
    let s = rows.len().max(cm.class_ids.len());
    let mut m = vec![vec![0u64; s]; s];
    for (i, row) in rows.iter().enumerate() {
        m[i][..row.len()].copy_from_slice(row);
    }
    m
}

/// Matched count for permutation-matched accuracy, before division by N.
pub fn accuracy_matched_count(cm: &ConfusionMatrix) -> u64 {
    optimal_assignment_weight(&padded_match_matrix(cm))
}

/// Best fraction of correct labels over all one-to-one relabelings of
/// predicted clusters to ground-truth classes. Noise points always count as
/// errors.
pub fn accuracy(pred: &[i64], truth: &[i64]) -> Result<f64> {
    let cm = confusion(pred, truth)?;
    Ok(accuracy_matched_count(&cm) as f64 / cm.n_total as f64)
}

/// Matched count by literal enumeration of all permutations of the padded
/// square matrix. Guarded at 8 clusters.
pub fn brute_force_matched_count(cm: &ConfusionMatrix) -> Result<u64> {
    let m = padded_match_matrix(cm);
    let s = m.len();
    if s > 8 {
        return Err(Error::config(format!(
            "brute-force accuracy limited to 8 clusters, got {s}"
        )));
    }
    let mut perm: Vec<usize> = (0..s).collect();
    let mut best = 0u64;
    // Heap's algorithm
    fn heaps(perm: &mut Vec<usize>, k: usize, m: &[Vec<u64>], best: &mut u64) {
        if k <= 1 {
            let total: u64 = perm.iter().enumerate().map(|(i, &j)| m[i][j]).sum();
            *best = (*best).max(total);
            return;
        }
        for i in 0..k {
            heaps(perm, k - 1, m, best);
            if k % 2 == 0 {
                perm.swap(i, k - 1);
            } else {
                perm.swap(0, k - 1);
            }
        }
    }
    heaps(&mut perm, s, &m, &mut best);
    Ok(best)
}

pub fn brute_force_accuracy(pred: &[i64], truth: &[i64]) -> Result<f64> {
    let cm = confusion(pred, truth)?;
    Ok(brute_force_matched_count(&cm)? as f64 / cm.n_total as f64)
}

/// Fraction of points matching the majority ground-truth class of their
/// cluster. The noise row participates like any other cluster.
pub fn purity(pred: &[i64], truth: &[i64]) -> Result<f64> {
    let cm = confusion(pred, truth)?;
    let matched: u64 = cm
        .counts
        .iter()
        .map(|row| row.iter().copied().max().unwrap_or(0))
        .sum();
    Ok(matched as f64 / cm.n_total as f64)
}

/// Normalized mutual information, 2I / (H(L) + H(G)), natural logs.
/// Returns 1 when both labelings are single-class.
pub fn nmi(pred: &[i64], truth: &[i64]) -> Result<f64> {
    let cm = confusion(pred, truth)?;
    let n = cm.n_total as f64;
    let row_sums: Vec<u64> = cm.counts.iter().map(|r| r.iter().sum()).collect();
    let col_sums: Vec<u64> = (0..cm.class_ids.len())
        .map(|j| cm.counts.iter().map(|r| r[j]).sum())
        .collect();

    let entropy = |sums: &[u64]| -> f64 {
        sums.iter()
            .filter(|&&s| s > 0)
            .map(|&s| {
                let p = s as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let h_l = entropy(&row_sums);
    let h_g = entropy(&col_sums);
    if h_l + h_g == 0.0 {
        return Ok(1.0);
    }
    let mut mi = 0.0;
    for (i, row) in cm.counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c > 0 {
                let p_ij = c as f64 / n;
                let p_i = row_sums[i] as f64 / n;
                let p_j = col_sums[j] as f64 / n;
                mi += p_ij * (p_ij / (p_i * p_j)).ln();
            }
        }
    }
    Ok((2.0 * mi / (h_l + h_g)).clamp(0.0, 1.0))
}

/// One evaluation cell of the method x pipeline x dataset grid.
#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub accuracy: f64,
    pub purity: f64,
    pub nmi: f64,
    pub n_predicted_clusters: usize,
    pub noise_fraction: f64,
}

pub fn evaluate(pred: &[i64], truth: &[i64]) -> Result<MetricReport> {
    let cm = confusion(pred, truth)?;
    let noise_count: u64 = cm
        .noise_row
        .map(|r| cm.counts[r].iter().sum())
        .unwrap_or(0);
    Ok(MetricReport {
        accuracy: accuracy_matched_count(&cm) as f64 / cm.n_total as f64,
        purity: purity(pred, truth)?,
        nmi: nmi(pred, truth)?,
        n_predicted_clusters: cm.pred_ids.len() - usize::from(cm.noise_row.is_some()),
        noise_fraction: noise_count as f64 / cm.n_total as f64,
    })
}
