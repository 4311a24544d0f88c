//! Wall-clock scaling harness for the five clustering methods.
//!
//! Times clustering only (not sharpening or projection), one method at a
//! time on a single thread, and reports the median over repeats.

use std::time::Instant;

use crate::clustering::{dbscan, dbscan_auto_params, hc, kmeans, spectral, Linkage, Method};
use crate::error::{Error, Result};
use crate::synth::{generate, Family, SynthSpec};

#[derive(Debug, Clone)]
pub struct TimingRow {
    pub method: Method,
    pub n_points: usize,
    pub dims: usize,
    pub median_seconds: f64,
    pub repeats: usize,
}

const N_CLUSTERS: usize = 5;
const MIN_RELIABLE_SECONDS: f64 = 1e-3;

/// For each N, generate a fixed 5-cluster dataset in `dims` dimensions and
/// time every method end-to-end. Sub-millisecond medians are re-measured
/// with triple the repeat count.
pub fn run_scaling(
    sizes: &[usize],
    dims: usize,
    repeats: usize,
    seed: u64,
) -> Result<Vec<TimingRow>> {
    if sizes.is_empty() {
        return Err(Error::config("bench: sizes must be non-empty"));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config("bench: sizes must be strictly ascending"));
    }
    let repeats = repeats.max(3);

    let mut rows = Vec::new();
    for &n in sizes {
        let spec = SynthSpec::new(Family::T1, n, dims, N_CLUSTERS, seed);
        let data = generate(&spec)?;
        for method in Method::ALL {
            let mut reps = repeats;
            let mut median = measure(method, &data, seed, reps)?;
            if median < MIN_RELIABLE_SECONDS {
                reps = repeats * 3;
                median = measure(method, &data, seed, reps)?;
            }
            rows.push(TimingRow {
                method,
                n_points: n,
                dims,
                median_seconds: median,
                repeats: reps,
            });
        }
    }
    Ok(rows)
}

fn measure(method: Method, data: &crate::dataset::Dataset, seed: u64, repeats: usize) -> Result<f64> {
    let points = &data.points;
    let mut samples = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        match method {
            Method::Kmeans => {
                kmeans(points, N_CLUSTERS, 10, 100, seed)?;
            }
            Method::HcComplete => {
                hc(points, N_CLUSTERS, Linkage::Complete)?;
            }
            Method::HcWard => {
                hc(points, N_CLUSTERS, Linkage::Ward)?;
            }
            Method::Dbscan => {
                let (eps, min_pts) = dbscan_auto_params(points)?;
                dbscan(points, eps, min_pts)?;
            }
            Method::Spectral => {
                spectral(points, N_CLUSTERS, None, seed)?;
            }
        }
        samples.push(start.elapsed().as_secs_f64());
    }
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(samples[samples.len() / 2])
}

pub fn write_csv(rows: &[TimingRow], path: &std::path::Path) -> Result<()> {
    let mut out = String::from("method,N,dims,median_seconds,repeats\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.method.name(),
            r.n_points,
            r.dims,
            r.median_seconds,
            r.repeats
        ));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Log-log growth slope of median time vs N, by least squares.
pub fn loglog_slope(rows: &[TimingRow], method: Method) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.method == method && r.median_seconds > 0.0)
        .map(|r| ((r.n_points as f64).ln(), r.median_seconds.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx: f64 = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my: f64 = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_row_per_method() {
        let rows = run_scaling(&[200], 2, 3, 1).unwrap();
        assert_eq!(rows.len(), 5);
        let methods: Vec<Method> = rows.iter().map(|r| r.method).collect();
        assert_eq!(methods, Method::ALL.to_vec());
        for r in &rows {
            assert!(r.median_seconds > 0.0);
            assert!(r.repeats >= 3);
        }
    }

    #[test]
    fn sizes_must_ascend() {
        assert!(run_scaling(&[100, 100], 2, 3, 1).is_err());
        assert!(run_scaling(&[], 2, 3, 1).is_err());
    }
}
