//! Dimensionality reduction: classical MDS, Landmark MDS, and PCA.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::knn::distance_matrix;
use crate::linalg::{squared_distance, sym_eigen, Matrix};

/// Embedded coordinates plus the spectrum they came from.
#[derive(Debug, Clone)]
pub struct Projection {
    pub coords: Matrix,
    pub landmark_indices: Vec<usize>,
    /// Descending eigenvalues of the landmark Gram matrix (or PCA covariance).
    pub eigenvalues: Vec<f64>,
    /// Eigenvalues below -1e-9 * lambda_max, evidence of non-Euclidean
    /// distance noise; clamped to zero for coordinate scaling.
    pub negative_eigenvalues: Vec<f64>,
}

/// Default landmark count: max(50, round(sqrt(N))), capped at N.
pub fn default_n_landmarks(n_points: usize) -> usize {
    ((n_points as f64).sqrt().round() as usize).max(50).min(n_points)
}

/// Classical (Torgerson) MDS of a full symmetric distance matrix.
///
/// Double-centers B = -1/2 J D^2 J, eigen-decomposes it, and scales the top
/// `target_dim` eigenvectors by sqrt(eigenvalue). Negative eigenvalues are
/// clamped to zero for scaling and reported.
pub fn classical_mds(dist: &Matrix, target_dim: usize) -> Result<Projection> {
    let m = dist.rows();
    if m != dist.cols() {
        return Err(Error::data("classical_mds: distance matrix must be square"));
    }
    if target_dim == 0 {
        return Err(Error::config("classical_mds: target_dim must be >= 1"));
    }
    for i in 0..m {
        if dist.get(i, i) != 0.0 {
            return Err(Error::data(format!(
                "classical_mds: nonzero diagonal at ({i},{i})"
            )));
        }
        for j in (i + 1)..m {
            let a = dist.get(i, j);
            let b = dist.get(j, i);
            if (a - b).abs() > 1e-9 * (1.0 + a.abs()) {
                return Err(Error::data(format!(
                    "classical_mds: asymmetric input at ({i},{j})"
                )));
            }
            if a < 0.0 {
                return Err(Error::data(format!(
                    "classical_mds: negative distance at ({i},{j})"
                )));
            }
        }
    }

    let b = double_center(dist);
    let (eigvals, eigvecs) = sym_eigen(&b)?;
    let lambda_max = eigvals.first().copied().unwrap_or(0.0).max(0.0);
    let negative_eigenvalues: Vec<f64> = eigvals
        .iter()
        .copied()
        .filter(|&l| l < -1e-9 * lambda_max.max(1.0))
        .collect();

    let d = target_dim.min(m);
    let mut coords = Matrix::zeros(m, d);
    for a in 0..d {
        let scale = eigvals[a].max(0.0).sqrt();
        for i in 0..m {
            coords.set(i, a, eigvecs.get(i, a) * scale);
        }
    }
    Ok(Projection {
        coords,
        landmark_indices: (0..m).collect(),
        eigenvalues: eigvals,
        negative_eigenvalues,
    })
}

/// B = -1/2 J D^2 J
fn double_center(dist: &Matrix) -> Matrix {
    let m = dist.rows();
    let mut d2 = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let v = dist.get(i, j);
            d2.set(i, j, v * v);
        }
    }
    let row_means: Vec<f64> = (0..m)
        .map(|i| d2.row(i).iter().sum::<f64>() / m as f64)
        .collect();
    let grand: f64 = row_means.iter().sum::<f64>() / m as f64;
    let mut b = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            b.set(
                i,
                j,
                -0.5 * (d2.get(i, j) - row_means[i] - row_means[j] + grand),
            );
        }
    }
    b
}

/// Landmark MDS: MaxMin landmark selection from a seeded random start,
/// classical MDS on the landmark distances, then distance-based
/// triangulation of every other point against the landmark coordinates.
pub fn lmds(
    data: &Dataset,
    n_landmarks: usize,
    target_dim: usize,
    seed: u64,
) -> Result<Projection> {
    let n = data.n_points();
    if target_dim > data.n_dims() {
        return Err(Error::config(format!(
            "lmds: target_dim {} exceeds data dimensionality {}",
            target_dim,
            data.n_dims()
        )));
    }
    if n_landmarks < 3 || n_landmarks > n {
        return Err(Error::config(format!(
            "lmds: need 3 <= n_landmarks <= N, got {n_landmarks} with N = {n}"
        )));
    }

    let landmarks = maxmin_landmarks(&data.points, n_landmarks, seed);

    // distinct landmark check
    let mut distinct = 0usize;
    'outer: for (a, &i) in landmarks.iter().enumerate() {
        for &j in landmarks.iter().take(a) {
            if squared_distance(data.points.row(i), data.points.row(j)) == 0.0 {
                continue 'outer;
            }
        }
        distinct += 1;
    }
    if distinct < 2 {
        return Err(Error::numeric("lmds: all landmarks coincident (rank collapse)"));
    }
    if distinct < target_dim + 1 {
        return Err(Error::numeric(format!(
            "lmds: only {distinct} distinct landmarks for target_dim {target_dim}"
        )));
    }

    let m = landmarks.len();
    let mut lm_points = Matrix::zeros(m, data.n_dims());
    for (a, &i) in landmarks.iter().enumerate() {
        lm_points.row_mut(a).copy_from_slice(data.points.row(i));
    }
    let lm_dist = distance_matrix(&lm_points);
    let mds = classical_mds(&lm_dist, target_dim)?;
    let d = mds.coords.cols();

    // triangulation weights: rows of the pseudo-inverse of the landmark
    // coordinate matrix, i.e. eigenvector / sqrt(eigenvalue)
    let mut pinv_rows = Matrix::zeros(m, d);
    for a in 0..d {
        let l = mds.eigenvalues[a].max(0.0);
        if l > 0.0 {
            let inv_sqrt = 1.0 / l.sqrt();
            for i in 0..m {
                // eigvec entry = coord / sqrt(lambda)
                pinv_rows.set(i, a, mds.coords.get(i, a) * inv_sqrt * inv_sqrt);
            }
        }
    }

    // column means of the squared landmark distance matrix
    let mut mean_d2 = vec![0.0; m];
    for i in 0..m {
        for j in 0..m {
            let v = lm_dist.get(i, j);
            mean_d2[j] += v * v;
        }
    }
    for v in &mut mean_d2 {
        *v /= m as f64;
    }

    let mut coords = Matrix::zeros(n, d);
    let mut delta = vec![0.0; m];
    for p in 0..n {
        if let Some(a) = landmarks.iter().position(|&l| l == p) {
            coords.row_mut(p).copy_from_slice(mds.coords.row(a));
            continue;
        }
        for (a, &l) in landmarks.iter().enumerate() {
            delta[a] = squared_distance(data.points.row(p), data.points.row(l));
        }
        for a in 0..d {
            let mut acc = 0.0;
            for i in 0..m {
                acc += pinv_rows.get(i, a) * (delta[i] - mean_d2[i]);
            }
            coords.set(p, a, -0.5 * acc);
        }
    }

    if !coords.is_finite() {
        return Err(Error::numeric("lmds: non-finite embedding coordinates"));
    }
    Ok(Projection {
        coords,
        landmark_indices: landmarks,
        eigenvalues: mds.eigenvalues,
        negative_eigenvalues: mds.negative_eigenvalues,
    })
}

/// Greedy MaxMin: random first landmark, then repeatedly the point farthest
/// from the chosen set (ties by lower index).
fn maxmin_landmarks(points: &Matrix, count: usize, seed: u64) -> Vec<usize> {
    let n = points.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = rng.gen_range(0..n);
    let mut chosen = vec![first];
    let mut min_d2: Vec<f64> = (0..n)
        .map(|i| squared_distance(points.row(i), points.row(first)))
        .collect();
    while chosen.len() < count {
        let mut best = 0usize;
        let mut best_d = -1.0;
        for (i, &d) in min_d2.iter().enumerate() {
            if d > best_d && !chosen.contains(&i) {
                best_d = d;
                best = i;
            }
        }
        chosen.push(best);
        for i in 0..n {
            let d2 = squared_distance(points.row(i), points.row(best));
            if d2 < min_d2[i] {
                min_d2[i] = d2;
            }
        }
    }
    chosen
}

/// PCA keeping the smallest leading component count whose cumulative
/// eigenvalue share reaches `variance_fraction`. Returns the projected
/// dataset and the full descending covariance spectrum.
pub fn pca_reduce(data: &Dataset, variance_fraction: f64) -> Result<(Dataset, Vec<f64>)> {
    if !(variance_fraction > 0.0 && variance_fraction <= 1.0) {
        return Err(Error::config(format!(
            "pca_reduce: variance_fraction must be in (0, 1], got {variance_fraction}"
        )));
    }
    let n = data.n_points();
    let d = data.n_dims();
    if n < 2 {
        return Err(Error::data("pca_reduce: need N >= 2"));
    }

    let means: Vec<f64> = (0..d)
        .map(|j| (0..n).map(|i| data.points.get(i, j)).sum::<f64>() / n as f64)
        .collect();
    let mut cov = Matrix::zeros(d, d);
    for i in 0..n {
        let row = data.points.row(i);
        for a in 0..d {
            let xa = row[a] - means[a];
            for b in a..d {
                let v = cov.get(a, b) + xa * (row[b] - means[b]);
                cov.set(a, b, v);
            }
        }
    }
    let denom = (n - 1) as f64;
    for a in 0..d {
        for b in a..d {
            let v = cov.get(a, b) / denom;
            cov.set(a, b, v);
            cov.set(b, a, v);
        }
    }

    let (eigvals_raw, eigvecs) = sym_eigen(&cov)?;
    let eigvals: Vec<f64> = eigvals_raw.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = eigvals.iter().sum();
    if total <= 0.0 {
        return Err(Error::data("pca_reduce: data has zero total variance"));
    }
    let mut keep = 0usize;
    let mut cum = 0.0;
    for &l in &eigvals {
        keep += 1;
        cum += l;
        if cum / total >= variance_fraction - 1e-12 {
            break;
        }
    }
    // never keep trailing zero-variance components
    while keep > 1 && eigvals[keep - 1] <= 1e-12 * eigvals[0] {
        keep -= 1;
    }

    let mut projected = Matrix::zeros(n, keep);
    for i in 0..n {
        let row = data.points.row(i);
        for a in 0..keep {
            let mut acc = 0.0;
            for j in 0..d {
                acc += (row[j] - means[j]) * eigvecs.get(j, a);
            }
            projected.set(i, a, acc);
        }
    }
    let mut out = Dataset::new(
        projected,
        data.labels.clone(),
        format!("{}-pca{}", data.name, keep),
    )?;
    out.sublabels = data.sublabels.clone();
    out.label_names = data.label_names.clone();
    Ok((out, eigvals))
}
