//! Synthetic Gaussian dataset families T1-T5 with ground truth.
//!
//! T1  equal isotropic variance, well separated centers
//! T2  per-cluster variance drawn log-uniformly over one decade
//! T3  skewed (geometric) cluster sizes, minimum 2% of N each
//! T4  five components as two close pairs plus one isolated component,
//!     labeled at both sub-class (5) and super-class (3) granularity
//! T5  T1 plus additive i.i.d. Gaussian noise at a given signal-to-noise ratio

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{euclidean_distance, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    T1,
    T2,
    T3,
    T4,
    T5,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "T1" => Ok(Family::T1),
            "T2" => Ok(Family::T2),
            "T3" => Ok(Family::T3),
            "T4" => Ok(Family::T4),
            "T5" => Ok(Family::T5),
            other => Err(Error::config(format!("unknown synthetic family '{other}'"))),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Family::T1 => "T1",
            Family::T2 => "T2",
            Family::T3 => "T3",
            Family::T4 => "T4",
            Family::T5 => "T5",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub family: Family,
    pub n_points: usize,
    pub n_dims: usize,
    pub n_clusters: usize,
    pub seed: u64,
    /// Linear variance ratio for T5 noise (not decibels).
    pub snr: f64,
}

impl SynthSpec {
    pub fn new(family: Family, n_points: usize, n_dims: usize, n_clusters: usize, seed: u64) -> Self {
        SynthSpec {
            family,
            n_points,
            n_dims,
            n_clusters,
            seed,
            snr: 10.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_clusters < 1 || self.n_points < self.n_clusters {
            return Err(Error::config(format!(
                "need N >= n_clusters >= 1, got N = {}, n_clusters = {}",
                self.n_points, self.n_clusters
            )));
        }
        if self.n_dims < 1 {
            return Err(Error::config("n_dims must be >= 1"));
        }
        if self.family == Family::T5 && self.snr <= 0.0 {
            return Err(Error::config("snr must be positive"));
        }
        Ok(())
    }
}

/// Base standard deviation for all families.
const SIGMA: f64 = 1.0;
/// Minimum pairwise center distance is SEPARATION * max(sigma_i, sigma_j).
const SEPARATION: f64 = 8.0;
/// In-pair center gap for the T4 sub-cluster pairs.
const PAIR_GAP: f64 = 3.0 * SIGMA;
const MAX_PLACEMENT_ATTEMPTS: usize = 1000;

pub fn generate(spec: &SynthSpec) -> Result<Dataset> {
    generate_with_centers(spec).map(|(ds, _, _)| ds)
}

/// As `generate`, additionally returning the true component centers and
/// per-component standard deviations (used by tests and the bench harness).
pub fn generate_with_centers(spec: &SynthSpec) -> Result<(Dataset, Vec<Vec<f64>>, Vec<f64>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.family {
        Family::T1 => {
            let sigmas = vec![SIGMA; spec.n_clusters];
            let centers = place_centers(&mut rng, spec.n_dims, &sigmas, SEPARATION)?;
            let sizes = balanced_sizes(spec.n_points, spec.n_clusters);
            let ds = sample_blobs(&mut rng, spec, &centers, &sigmas, &sizes)?;
            Ok((ds, centers, sigmas))
        }
        Family::T2 => {
            // one decade of sigma, centered on SIGMA in log space
            let sigmas: Vec<f64> = (0..spec.n_clusters)
                .map(|_| SIGMA * 10f64.powf(rng.gen_range(-0.5..0.5)))
                .collect();
            let centers = place_centers(&mut rng, spec.n_dims, &sigmas, SEPARATION)?;
            let sizes = balanced_sizes(spec.n_points, spec.n_clusters);
            let ds = sample_blobs(&mut rng, spec, &centers, &sigmas, &sizes)?;
            Ok((ds, centers, sigmas))
        }
        Family::T3 => {
            let sigmas = vec![SIGMA; spec.n_clusters];
            let centers = place_centers(&mut rng, spec.n_dims, &sigmas, SEPARATION)?;
            let sizes = geometric_sizes(spec.n_points, spec.n_clusters);
            let ds = sample_blobs(&mut rng, spec, &centers, &sigmas, &sizes)?;
            Ok((ds, centers, sigmas))
        }
        Family::T4 => generate_t4(spec, &mut rng),
        Family::T5 => {
            let base = SynthSpec {
                family: Family::T1,
                ..spec.clone()
            };
            let (mut ds, centers, sigmas) = generate_with_centers(&base)?;
            add_noise(&mut ds, spec.snr, &mut rng);
            ds.name = format!("T5-n{}-N{}-seed{}", spec.n_dims, spec.n_points, spec.seed);
            Ok((ds, centers, sigmas))
        }
    }
}

/// Rejection sampling of cluster centers in a hypercube sized to make the
/// pairwise constraint distance feasible.
fn place_centers(
    rng: &mut ChaCha8Rng,
    n_dims: usize,
    sigmas: &[f64],
    separation: f64,
) -> Result<Vec<Vec<f64>>> {
    let k = sigmas.len();
    let sigma_max = sigmas.iter().cloned().fold(0.0f64, f64::max);
    let side = separation * sigma_max * (k as f64).max(4.0);
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    for c in 0..k {
        let mut placed = false;
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let cand: Vec<f64> = (0..n_dims).map(|_| rng.gen_range(0.0..side)).collect();
            let ok = centers.iter().enumerate().all(|(j, other)| {
                let min_dist = separation * sigmas[c].max(sigmas[j]);
                euclidean_distance(&cand, other) >= min_dist
            });
            if ok {
                centers.push(cand);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::config(format!(
                "could not place {k} separated cluster centers in {n_dims} dimensions after {MAX_PLACEMENT_ATTEMPTS} attempts; lower n_clusters or raise n_dims"
            )));
        }
    }
    Ok(centers)
}

/// Sizes differing by at most one, larger clusters first.
fn balanced_sizes(n: usize, k: usize) -> Vec<usize> {
    let base = n / k;
    let extra = n % k;
    (0..k).map(|i| base + usize::from(i < extra)).collect()
}

/// Geometric decay with every cluster keeping at least 2% of N.
fn geometric_sizes(n: usize, k: usize) -> Vec<usize> {
    const RATIO: f64 = 0.55;
    const MIN_SHARE: f64 = 0.02;
    let raw: Vec<f64> = (0..k).map(|i| RATIO.powi(i as i32)).collect();
    let total: f64 = raw.iter().sum();
    let mut shares: Vec<f64> = raw.iter().map(|w| w / total).collect();

    // clamp the tail to the minimum share, renormalize the rest
    let clamped: Vec<bool> = shares.iter().map(|&s| s < MIN_SHARE).collect();
    let n_clamped = clamped.iter().filter(|&&c| c).count();
    if n_clamped > 0 {
        let free_mass = 1.0 - MIN_SHARE * n_clamped as f64;
        let free_total: f64 = shares
            .iter()
            .zip(&clamped)
            .filter(|(_, &c)| !c)
            .map(|(s, _)| s)
            .sum();
        for (s, &c) in shares.iter_mut().zip(&clamped) {
            *s = if c { MIN_SHARE } else { *s * free_mass / free_total };
        }
    }

    // largest-remainder rounding; shares are monotone so sizes are too
    let mut sizes: Vec<usize> = shares.iter().map(|s| (s * n as f64).floor() as usize).collect();
    let mut assigned: usize = sizes.iter().sum();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        let fa = shares[a] * n as f64 - sizes[a] as f64;
        let fb = shares[b] * n as f64 - sizes[b] as f64;
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    let mut idx = 0;
    while assigned < n {
        sizes[order[idx % k]] += 1;
        assigned += 1;
        idx += 1;
    }
    sizes
}

fn sample_blobs(
    rng: &mut ChaCha8Rng,
    spec: &SynthSpec,
    centers: &[Vec<f64>],
    sigmas: &[f64],
    sizes: &[usize],
) -> Result<Dataset> {
    let n = spec.n_points;
    let d = spec.n_dims;
    let mut points = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for (c, (&size, center)) in sizes.iter().zip(centers).enumerate() {
        for _ in 0..size {
            for j in 0..d {
                let z: f64 = rng.sample(StandardNormal);
                points.push(center[j] + sigmas[c] * z);
            }
            labels.push(c as i64);
        }
    }
    Dataset::new(
        Matrix::from_vec(n, d, points),
        Some(labels),
        format!("{}-n{}-N{}-seed{}", spec.family, d, n, spec.seed),
    )
}

/// Two close pairs plus one isolated component. `labels` holds the three
/// super-classes, `sublabels` the five components.
fn generate_t4(spec: &SynthSpec, rng: &mut ChaCha8Rng) -> Result<(Dataset, Vec<Vec<f64>>, Vec<f64>)> {
    let d = spec.n_dims;
    let sigmas_super = vec![SIGMA; 3];
    // wide separation between super-centers so the 3-sigma pair split stays internal
    let super_centers = place_centers(rng, d, &sigmas_super, 2.0 * SEPARATION)?;

    // component centers: super 0 and 1 split into pairs along a random direction
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(5);
    let mut super_of: Vec<i64> = Vec::with_capacity(5);
    for s in 0..2 {
        let dir = random_unit(rng, d);
        for sign in [-0.5f64, 0.5] {
            let c: Vec<f64> = super_centers[s]
                .iter()
                .zip(&dir)
                .map(|(x, u)| x + sign * PAIR_GAP * u)
                .collect();
            centers.push(c);
            super_of.push(s as i64);
        }
    }
    centers.push(super_centers[2].clone());
    super_of.push(2);

    let sizes = balanced_sizes(spec.n_points, 5);
    let sigmas = vec![SIGMA; 5];
    let mut points = Vec::with_capacity(spec.n_points * d);
    let mut sublabels = Vec::with_capacity(spec.n_points);
    let mut labels = Vec::with_capacity(spec.n_points);
    for (c, (&size, center)) in sizes.iter().zip(&centers).enumerate() {
        for _ in 0..size {
            for j in 0..d {
                let z: f64 = rng.sample(StandardNormal);
                points.push(center[j] + SIGMA * z);
            }
            sublabels.push(c as i64);
            labels.push(super_of[c]);
        }
    }
    let mut ds = Dataset::new(
        Matrix::from_vec(spec.n_points, d, points),
        Some(labels),
        format!("T4-n{}-N{}-seed{}", d, spec.n_points, spec.seed),
    )?;
    ds.sublabels = Some(sublabels);
    Ok((ds, centers, sigmas))
}

fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Additive i.i.d. Gaussian noise with variance = mean signal variance / snr.
fn add_noise(ds: &mut Dataset, snr: f64, rng: &mut ChaCha8Rng) {
    let n = ds.n_points();
    let d = ds.n_dims();
    let mut mean_var = 0.0;
    for j in 0..d {
        let mean: f64 = (0..n).map(|i| ds.points.get(i, j)).sum::<f64>() / n as f64;
        let var: f64 = (0..n).map(|i| (ds.points.get(i, j) - mean).powi(2)).sum::<f64>() / n as f64;
        mean_var += var;
    }
    mean_var /= d as f64;
    let noise_sd = (mean_var / snr).sqrt();
    for i in 0..n {
        for j in 0..d {
            let z: f64 = rng.sample(StandardNormal);
            let v = ds.points.get(i, j) + noise_sd * z;
            ds.points.set(i, j, v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t1_shape_and_classes() {
        let spec = SynthSpec::new(Family::T1, 5000, 20, 5, 1);
        let ds = generate(&spec).unwrap();
        assert_eq!(ds.n_points(), 5000);
        assert_eq!(ds.n_dims(), 20);
        assert_eq!(ds.n_classes(), 5);
    }

    #[test]
    fn seed_determinism() {
        let spec = SynthSpec::new(Family::T3, 300, 5, 4, 42);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.points.as_slice(), b.points.as_slice());
        assert_eq!(a.labels, b.labels);
    }

    #[test]
    fn t1_class_balance_and_separation() {
        let spec = SynthSpec::new(Family::T1, 103, 6, 5, 7);
        let (ds, centers, sigmas) = generate_with_centers(&spec).unwrap();
        let labels = ds.labels.unwrap();
        let mut sizes = [0usize; 5];
        for &l in &labels {
            sizes[l as usize] += 1;
        }
        let max = *sizes.iter().max().unwrap();
        let min = *sizes.iter().min().unwrap();
        assert!(max - min <= 1);
        for i in 0..centers.len() {
            for j in (i + 1)..centers.len() {
                let dist = euclidean_distance(&centers[i], &centers[j]);
                assert!(dist >= SEPARATION * sigmas[i].max(sigmas[j]));
            }
        }
    }

    #[test]
    fn t3_sizes_monotone_with_floor() {
        let sizes = geometric_sizes(5000, 5);
        assert_eq!(sizes.iter().sum::<usize>(), 5000);
        for w in sizes.windows(2) {
            assert!(w[0] >= w[1]);
        }
        for &s in &sizes {
            assert!(s >= (0.02 * 5000.0) as usize);
        }
    }

    #[test]
    fn t4_dual_labels() {
        let spec = SynthSpec::new(Family::T4, 1000, 10, 5, 3);
        let ds = generate(&spec).unwrap();
        assert_eq!(ds.n_classes(), 3);
        let subs = ds.sublabels.as_ref().unwrap();
        let mut uniq: Vec<i64> = subs.clone();
        uniq.sort_unstable();
        uniq.dedup();
        assert_eq!(uniq.len(), 5);
    }

    #[test]
    fn t5_variance_ratio() {
        let n = 5000;
        let mut base = SynthSpec::new(Family::T1, n, 20, 5, 11);
        let t1 = generate(&base).unwrap();
        base.family = Family::T5;
        base.snr = 10.0;
        let t5 = generate(&base).unwrap();

        let col_var = |ds: &Dataset, j: usize| {
            let m: f64 = (0..n).map(|i| ds.points.get(i, j)).sum::<f64>() / n as f64;
            (0..n).map(|i| (ds.points.get(i, j) - m).powi(2)).sum::<f64>() / n as f64
        };
        let mean_signal_var: f64 = (0..20).map(|j| col_var(&t1, j)).sum::<f64>() / 20.0;
        let expected_noise = mean_signal_var / 10.0;
        // average variance excess across columns should be ~ signal_var / 10
        let excess: f64 = (0..20)
            .map(|j| col_var(&t5, j) - col_var(&t1, j))
            .sum::<f64>()
            / 20.0;
        assert!(
            (excess - expected_noise).abs() < 0.10 * expected_noise,
            "excess {excess} vs expected {expected_noise}"
        );
    }

    #[test]
    fn infeasible_placement_errors() {
        // 1-D with many clusters cannot satisfy the separation constraint
        let spec = SynthSpec::new(Family::T1, 500, 1, 60, 1);
        assert!(generate(&spec).is_err());
    }
}
