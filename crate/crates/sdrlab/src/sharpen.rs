//! Density sharpening: iterated mean shift toward the centroid of each
//! point's k nearest neighbors, with a synchronous update so the result does
//! not depend on point order.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::knn;
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy)]
pub struct SharpenParams {
    pub k_neighbors: usize,
    /// Step size alpha in (0, 1].
    pub step_size: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl SharpenParams {
    /// k = round(sqrt(N)), alpha = 0.3, T = 10.
    pub fn defaults_for(n_points: usize, seed: u64) -> Self {
        SharpenParams {
            k_neighbors: (n_points as f64).sqrt().round().max(1.0) as usize,
            step_size: 0.3,
            iterations: 10,
            seed,
        }
    }

    fn validate(&self, n_points: usize) -> Result<()> {
        if self.k_neighbors >= n_points {
            return Err(Error::config(format!(
                "k_neighbors = {} must be < N = {}",
                self.k_neighbors, n_points
            )));
        }
        if self.k_neighbors == 0 {
            return Err(Error::config("k_neighbors must be >= 1"));
        }
        if !(self.step_size > 0.0 && self.step_size <= 1.0) {
            return Err(Error::config(format!(
                "step_size must be in (0, 1], got {}",
                self.step_size
            )));
        }
        Ok(())
    }
}

/// Move every point toward the centroid of its k nearest neighbors for a
/// fixed number of iterations. Neighbors are recomputed against the previous
/// iterate each round; labels pass through untouched.
pub fn sharpen(data: &Dataset, params: &SharpenParams) -> Result<Dataset> {
    params.validate(data.n_points())?;
    let n = data.n_points();
    let d = data.n_dims();
    let alpha = params.step_size;

    let mut current = data.points.clone();
    for iter in 0..params.iterations {
        let mut next = Matrix::zeros(n, d);
        for i in 0..n {
            let neighbors = knn::k_nearest(&current, i, params.k_neighbors);
            let mut centroid = vec![0.0; d];
            for &j in &neighbors {
                for (c, &v) in centroid.iter_mut().zip(current.row(j)) {
                    *c += v;
                }
            }
            let inv = 1.0 / neighbors.len() as f64;
            let x = current.row(i);
            for j in 0..d {
                next.set(i, j, x[j] + alpha * (centroid[j] * inv - x[j]));
            }
        }
        if !next.is_finite() {
            return Err(Error::numeric(format!(
                "non-finite coordinates after sharpening iteration {iter}; step_size {alpha} is too aggressive for this data"
            )));
        }
        current = next;
    }

    Ok(Dataset {
        points: current,
        labels: data.labels.clone(),
        sublabels: data.sublabels.clone(),
        label_names: data.label_names.clone(),
        name: data.name.clone(),
    })
}

/// Mean distance from each point to the centroid of its k nearest neighbors.
/// Diagnostic used by the contraction tests.
pub fn mean_knn_centroid_distance(points: &Matrix, k: usize) -> f64 {
    let n = points.rows();
    let d = points.cols();
    let mut total = 0.0;
    for i in 0..n {
        let neighbors = knn::k_nearest(points, i, k);
        let mut centroid = vec![0.0; d];
        for &j in &neighbors {
            for (c, &v) in centroid.iter_mut().zip(points.row(j)) {
                *c += v;
            }
        }
        let inv = 1.0 / neighbors.len() as f64;
        let mut dist2 = 0.0;
        for (j, &x) in points.row(i).iter().enumerate() {
            let diff = x - centroid[j] * inv;
            dist2 += diff * diff;
        }
        total += dist2.sqrt();
    }
    total / n as f64
}
