//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.
//!
//! Criteria 4 and 5 need the UCI WiFi and HAR exports as CSV (see the README
//! for the expected layout). They look in `$SDRLAB_DATA_DIR`, falling back to
//! `<workspace>/data/`; when the files are absent the criterion is reported
//! as SKIP rather than silently passing.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sdrlab::clustering::{
    dbscan, dbscan_auto_params, hc, kmeans, spectral, Linkage, Metadata, Method,
};
use sdrlab::dataset::{load_csv, ClassMap, Dataset};
use sdrlab::linalg::{squared_distance, Matrix};
use sdrlab::metrics::{
    accuracy, accuracy_matched_count, brute_force_matched_count, confusion, evaluate, nmi, purity,
};
use sdrlab::pipeline::{run_pipeline, PipelineConfig};
use sdrlab::projection::{classical_mds, lmds, pca_reduce};
use sdrlab::sharpen::{sharpen, SharpenParams};
use sdrlab::synth::{generate, Family, SynthSpec};
use sdrlab::{bench, knn};

fn data_dir() -> PathBuf {
    std::env::var_os("SDRLAB_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR"))
                .join("../..")
                .join("data")
        })
}

/// sharpen (defaults) -> lmds -> one clustering method -> metrics
fn run_condition(
    data: &Dataset,
    sharpened: bool,
    method: Method,
    k: usize,
    seed: u64,
) -> sdrlab::metrics::MetricReport {
    let staged = if sharpened {
        let params = SharpenParams::defaults_for(data.n_points(), seed);
        sharpen(data, &params).unwrap()
    } else {
        data.clone()
    };
    let n_landmarks = sdrlab::projection::default_n_landmarks(staged.n_points());
    let proj = lmds(&staged, n_landmarks, 2, seed).unwrap();
    let result = match method {
        Method::Kmeans => kmeans(&proj.coords, k, 10, 100, seed).unwrap(),
        Method::HcComplete => hc(&proj.coords, k, Linkage::Complete).unwrap(),
        Method::HcWard => hc(&proj.coords, k, Linkage::Ward).unwrap(),
        Method::Dbscan => {
            let (eps, min_pts) = dbscan_auto_params(&proj.coords).unwrap();
            dbscan(&proj.coords, eps, min_pts).unwrap()
        }
        Method::Spectral => spectral(&proj.coords, k, None, seed).unwrap(),
    };
    evaluate(&result.labels, data.labels.as_deref().unwrap()).unwrap()
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values[values.len() / 2]
}

#[test]
fn criterion_01_metric_oracle_equivalence() {
    let start = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1);
    for case in 0..500 {
        let k_pred = rng.gen_range(1..=6i64);
        let k_true = rng.gen_range(1..=6i64);
        let pred: Vec<i64> = (0..100).map(|_| rng.gen_range(0..k_pred)).collect();
        let truth: Vec<i64> = (0..100).map(|_| rng.gen_range(0..k_true)).collect();
        let cm = confusion(&pred, &truth).unwrap();
        // bit-equal integer matched counts before the division by N
        assert_eq!(
            accuracy_matched_count(&cm),
            brute_force_matched_count(&cm).unwrap(),
            "case {case}"
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "oracle comparison took {elapsed:.2} s");
    println!("criterion 1 PASS: accuracy == brute-force accuracy on 500 pairs ({elapsed:.2} s)");
}

#[test]
fn criterion_02_metric_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
    for _ in 0..1000 {
        let k_pred = rng.gen_range(1..=7i64);
        let k_true = rng.gen_range(1..=7i64);
        let with_noise = rng.gen_bool(0.3);
        let lo = if with_noise { -1 } else { 0 };
        let pred: Vec<i64> = (0..80).map(|_| rng.gen_range(lo..k_pred)).collect();
        let truth: Vec<i64> = (0..80).map(|_| rng.gen_range(0..k_true)).collect();

        let a = accuracy(&pred, &truth).unwrap();
        let p = purity(&pred, &truth).unwrap();
        let m = nmi(&pred, &truth).unwrap();
        assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&m));
        assert!(p >= a - 1e-15, "purity {p} < accuracy {a}");
        // symmetry: noise labels are only legal on the predicted side, so
        // swap-compare with the noise-free version of pred
        let clean: Vec<i64> = pred.iter().map(|&l| l.max(0)).collect();
        assert!((nmi(&clean, &truth).unwrap() - nmi(&truth, &clean).unwrap()).abs() < 1e-12);

        // nmi(L, L) = 1 for non-degenerate L (no noise labels, >= 2 classes)
        if clean.iter().any(|&l| l != clean[0]) {
            assert!((nmi(&clean, &clean).unwrap() - 1.0).abs() < 1e-12);
        }
    }
    println!("criterion 2 PASS: bounds, purity >= accuracy, nmi(L,L)=1, nmi symmetry (1000 pairs)");
}

#[test]
fn criterion_03_synthetic_kmeans_above_090() {
    let start = std::time::Instant::now();
    for family in [Family::T1, Family::T2, Family::T3, Family::T5, Family::T4] {
        let mut accs = Vec::new();
        let mut purs = Vec::new();
        let mut nmis = Vec::new();
        for seed in 0..10u64 {
            let spec = SynthSpec::new(family, 1000, 20, 5, seed);
            let ds = generate(&spec).unwrap();
            // T4 is scored against super-class labels (3); sub-class is exempt
            let k = ds.n_classes();
            let report = run_condition(&ds, true, Method::Kmeans, k, seed);
            accs.push(report.accuracy);
            purs.push(report.purity);
            nmis.push(report.nmi);
        }
        let (a, p, m) = (median(&mut accs), median(&mut purs), median(&mut nmis));
        assert!(
            a >= 0.90 && p >= 0.90 && m >= 0.90,
            "{family:?}: median accuracy {a:.4}, purity {p:.4}, nmi {m:.4}"
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 300.0, "synthetic grid took {elapsed:.1} s");
    println!(
        "criterion 3 PASS: SLMDS + k-means medians >= 0.90 on T1,T2,T3,T5 and T4 super-class ({elapsed:.1} s)"
    );
}

#[test]
fn criterion_04_wifi_slmds_beats_lmds() {
    let path = data_dir().join("wifi.csv");
    if !path.exists() {
        println!(
            "criterion 4 SKIP: WiFi dataset not present at {} (see README: data setup)",
            path.display()
        );
        return;
    }
    let start = std::time::Instant::now();
    let ds = load_csv(&path, Some("room")).unwrap();
    let k = ds.n_classes();

    let mut medians = BTreeMap::new();
    for method in [Method::Kmeans, Method::HcWard] {
        for sharpened in [false, true] {
            let mut accs: Vec<f64> = (0..10u64)
                .map(|seed| run_condition(&ds, sharpened, method, k, seed).accuracy)
                .collect();
            medians.insert((method, sharpened), median(&mut accs));
        }
    }

    let km_lmds = medians[&(Method::Kmeans, false)];
    let km_slmds = medians[&(Method::Kmeans, true)];
    let hw_lmds = medians[&(Method::HcWard, false)];
    let hw_slmds = medians[&(Method::HcWard, true)];

    assert!(km_slmds > km_lmds, "k-means: slmds {km_slmds:.4} <= lmds {km_lmds:.4}");
    assert!(hw_slmds > hw_lmds, "hc-ward: slmds {hw_slmds:.4} <= lmds {hw_lmds:.4}");
    assert!((km_lmds - 0.9160).abs() <= 0.06, "k-means lmds {km_lmds:.4} not within 0.06 of 0.9160");
    assert!((km_slmds - 0.9395).abs() <= 0.06, "k-means slmds {km_slmds:.4} not within 0.06 of 0.9395");
    assert!((hw_lmds - 0.9040).abs() <= 0.06, "hc-ward lmds {hw_lmds:.4} not within 0.06 of 0.9040");
    assert!((hw_slmds - 0.9395).abs() <= 0.06, "hc-ward slmds {hw_slmds:.4} not within 0.06 of 0.9395");

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 120.0, "WiFi grid took {elapsed:.1} s");
    println!(
        "criterion 4 PASS: WiFi k-means {km_slmds:.4} > {km_lmds:.4}, hc-ward {hw_slmds:.4} > {hw_lmds:.4} ({elapsed:.1} s)"
    );
}

#[test]
fn criterion_05_har_near_saturation() {
    let path = data_dir().join("har.csv");
    if !path.exists() {
        println!(
            "criterion 5 SKIP: HAR dataset not present at {} (see README: data setup)",
            path.display()
        );
        return;
    }
    let ds = load_csv(&path, Some("activity")).unwrap();

    // regroup six activities into three super-classes by name
    let names = ds.label_names.as_ref().expect("activity names required");
    let pairs: Vec<(i64, i64)> = names
        .iter()
        .enumerate()
        .map(|(id, name)| {
            let n = name.to_ascii_uppercase();
            let sup = if n.contains("WALK") {
                0
            } else if n.contains("SIT") || n.contains("STAND") {
                1
            } else {
                2 // laying
            };
            (id as i64, sup)
        })
        .collect();
    let map = ClassMap::from_pairs(&pairs).unwrap();
    let mut ds = ds;
    ds.labels = Some(sdrlab::dataset::regroup(ds.labels.as_ref().unwrap(), &map).unwrap());

    let (reduced, eigvals) = pca_reduce(&ds, 0.8).unwrap();
    let total: f64 = eigvals.iter().sum();
    let kept: f64 = eigvals.iter().take(reduced.n_dims()).sum();
    println!(
        "criterion 5 info: PCA kept {} dims at {:.4} variance share",
        reduced.n_dims(),
        kept / total
    );

    let k = reduced.n_classes();
    let mut accs = Vec::new();
    let mut purs = Vec::new();
    let mut nmis = Vec::new();
    for seed in 0..5u64 {
        let r = run_condition(&reduced, true, Method::Kmeans, k, seed);
        accs.push(r.accuracy);
        purs.push(r.purity);
        nmis.push(r.nmi);
    }
    let (a, p, m) = (median(&mut accs), median(&mut purs), median(&mut nmis));
    assert!(a >= 0.95, "HAR* SLMDS k-means accuracy {a:.4} < 0.95");
    assert!(p >= 0.95, "HAR* SLMDS k-means purity {p:.4} < 0.95");
    assert!(m >= 0.90, "HAR* SLMDS k-means nmi {m:.4} < 0.90");
    println!(
        "criterion 5 PASS: HAR* SLMDS k-means accuracy {a:.4}, purity {p:.4}, nmi {m:.4} (PCA dims = {})",
        reduced.n_dims()
    );
}

// ---- criterion 6 oracles ----------------------------------------------

/// Exhaustive minimum-SSE partition over all k^n assignments.
fn exhaustive_min_sse(points: &Matrix, k: usize) -> (f64, Vec<usize>) {
    let n = points.rows();
    let d = points.cols();
    let mut assignment = vec![0usize; n];
    let mut best_sse = f64::INFINITY;
    let mut best = assignment.clone();
    loop {
        // SSE of this assignment (skip ones that miss a cluster)
        let mut counts = vec![0usize; k];
        for &a in &assignment {
            counts[a] += 1;
        }
        if counts.iter().all(|&c| c > 0) {
            let mut centroids = vec![vec![0.0; d]; k];
            for (i, &a) in assignment.iter().enumerate() {
                for (c, &v) in centroids[a].iter_mut().zip(points.row(i)) {
                    *c += v;
                }
            }
            for (c, cnt) in centroids.iter_mut().zip(&counts) {
                for v in c.iter_mut() {
                    *v /= *cnt as f64;
                }
            }
            let sse: f64 = assignment
                .iter()
                .enumerate()
                .map(|(i, &a)| squared_distance(points.row(i), &centroids[a]))
                .sum();
            if sse < best_sse {
                best_sse = sse;
                best = assignment.clone();
            }
        }
        // next assignment in base-k counting
        let mut pos = 0;
        loop {
            if pos == n {
                return (best_sse, best);
            }
            assignment[pos] += 1;
            if assignment[pos] < k {
                break;
            }
            assignment[pos] = 0;
            pos += 1;
        }
    }
}

fn same_partition(a: &[i64], b: &[usize]) -> bool {
    let n = a.len();
    (0..n).all(|i| (0..n).all(|j| (a[i] == a[j]) == (b[i] == b[j])))
}

#[test]
fn criterion_06_small_instance_clustering_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC6);

    // k-means vs exhaustive minimum-SSE partition
    for case in 0..15 {
        let n = rng.gen_range(5..=8);
        let k = rng.gen_range(2..=3);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)])
            .collect();
        let pts = Matrix::from_rows(&rows);
        let (best_sse, best) = exhaustive_min_sse(&pts, k);
        let r = kmeans(&pts, k, 50, 200, case).unwrap();
        let sse = match &r.metadata {
            Metadata::Kmeans { sse, .. } => *sse,
            _ => unreachable!(),
        };
        assert!(
            (sse - best_sse).abs() <= 1e-9 * best_sse.max(1.0),
            "case {case}: kmeans SSE {sse} vs optimum {best_sse}"
        );
        assert!(same_partition(&r.labels, &best), "case {case}: partition differs");
    }

    // hc vs naive recompute-from-scratch agglomeration
    for case in 0..15u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(case);
        let n = rng.gen_range(5..=8);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)])
            .collect();
        let pts = Matrix::from_rows(&rows);
        for linkage in [Linkage::Complete, Linkage::Ward] {
            for k in 1..=n.min(4) {
                let fast = hc(&pts, k, linkage).unwrap();
                let slow = naive_agglomerate(&pts, k, linkage);
                assert!(
                    same_partition(&fast.labels, &slow),
                    "case {case} {linkage:?} k={k}"
                );
            }
        }
    }

    // dbscan vs brute-force reachability closure
    for case in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(case ^ 0xD0);
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|_| vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)])
            .collect();
        let pts = Matrix::from_rows(&rows);
        let fast = dbscan(&pts, 0.9, 4).unwrap();
        let slow = oracle_dbscan(&pts, 0.9, 4);
        for i in 0..50 {
            assert_eq!(fast.labels[i] == -1, slow[i] == -1, "case {case}: noise flag {i}");
            for j in 0..50 {
                assert_eq!(
                    fast.labels[i] == fast.labels[j] && fast.labels[i] != -1,
                    slow[i] == slow[j] && slow[i] != -1,
                    "case {case}: pair ({i},{j})"
                );
            }
        }
    }

    // spectral recovers disconnected kNN-graph components exactly
    let mut rows = Vec::new();
    for i in 0..10 {
        rows.push(vec![i as f64 * 0.1, 0.0]);
    }
    for i in 0..10 {
        rows.push(vec![100.0 + i as f64 * 0.1, 0.0]);
    }
    let pts = Matrix::from_rows(&rows);
    let r = spectral(&pts, 2, Some(3), 1).unwrap();
    let truth: Vec<usize> = (0..20).map(|i| i / 10).collect();
    assert!(same_partition(&r.labels, &truth), "spectral component recovery");

    println!("criterion 6 PASS: kmeans/hc/dbscan/spectral match their oracles on small instances");
}

fn naive_agglomerate(points: &Matrix, k: usize, linkage: Linkage) -> Vec<usize> {
    let n = points.rows();
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    while clusters.len() > k {
        let mut best = (0usize, 1usize);
        let mut best_d = f64::INFINITY;
        for a in 0..clusters.len() {
            for b in (a + 1)..clusters.len() {
                let d = match linkage {
                    Linkage::Complete => {
                        let mut m: f64 = 0.0;
                        for &i in &clusters[a] {
                            for &j in &clusters[b] {
                                m = m.max(squared_distance(points.row(i), points.row(j)).sqrt());
                            }
                        }
                        m
                    }
                    Linkage::Ward => {
                        let mean = |c: &[usize]| -> Vec<f64> {
                            let d = points.cols();
                            let mut m = vec![0.0; d];
                            for &i in c {
                                for (mm, &v) in m.iter_mut().zip(points.row(i)) {
                                    *mm += v;
                                }
                            }
                            m.iter().map(|v| v / c.len() as f64).collect()
                        };
                        let (ma, mb) = (mean(&clusters[a]), mean(&clusters[b]));
                        let (sa, sb) = (clusters[a].len() as f64, clusters[b].len() as f64);
                        sa * sb / (sa + sb) * squared_distance(&ma, &mb)
                    }
                };
                if d < best_d {
                    best_d = d;
                    best = (a, b);
                }
            }
        }
        let merged = clusters.remove(best.1);
        clusters[best.0].extend(merged);
    }
    let mut labels = vec![0usize; n];
    for (c, members) in clusters.iter().enumerate() {
        for &i in members {
            labels[i] = c;
        }
    }
    labels
}

fn oracle_dbscan(points: &Matrix, eps: f64, min_pts: usize) -> Vec<i64> {
    let n = points.rows();
    let within = |i: usize, j: usize| squared_distance(points.row(i), points.row(j)) <= eps * eps;
    let core: Vec<bool> = (0..n)
        .map(|i| (0..n).filter(|&j| within(i, j)).count() >= min_pts)
        .collect();
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
fn criterion_07_numerical_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC7);

    // classical MDS recovers a random 2-D configuration within 1e-6 relative
    let rows: Vec<Vec<f64>> = (0..12)
        .map(|_| vec![rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)])
        .collect();
    let pts = Matrix::from_rows(&rows);
    let d = knn::distance_matrix(&pts);
    let p = classical_mds(&d, 2).unwrap();
    let rec = knn::distance_matrix(&p.coords);
    for i in 0..12 {
        for j in 0..12 {
            let want = d.get(i, j);
            assert!(
                (rec.get(i, j) - want).abs() <= 1e-6 * want.max(1.0),
                "mds recovery at ({i},{j})"
            );
        }
    }

    // pca retained variance >= requested fraction
    for _ in 0..10 {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|_| (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let ds = Dataset::new(Matrix::from_rows(&rows), None, "pca").unwrap();
        let fraction = rng.gen_range(0.3..1.0);
        let (out, eig) = pca_reduce(&ds, fraction).unwrap();
        let total: f64 = eig.iter().sum();
        let kept: f64 = eig.iter().take(out.n_dims()).sum();
        assert!(kept / total >= fraction - 1e-12);
    }

    // k-means per-iteration SSE non-increasing on 100 random instances
    for case in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(case);
        let n = rng.gen_range(20..80);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)])
            .collect();
        let pts = Matrix::from_rows(&rows);
        let k = rng.gen_range(2..=5);
        let r = kmeans(&pts, k, 3, 100, case).unwrap();
        match &r.metadata {
            Metadata::Kmeans { sse_history, .. } => {
                for w in sse_history.windows(2) {
                    assert!(w[1] <= w[0] + 1e-9, "case {case}: SSE increased");
                }
            }
            _ => unreachable!(),
        }
    }

    // Laplacian eigenvalues in [-1e-9, 2 + 1e-9]
    for case in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(case ^ 0x7A);
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|_| vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)])
            .collect();
        let pts = Matrix::from_rows(&rows);
        let r = spectral(&pts, 4, None, case).unwrap();
        match &r.metadata {
            Metadata::Spectral { eigenvalues, .. } => {
                for &l in eigenvalues {
                    assert!((-1e-9..=2.0 + 1e-9).contains(&l), "eigenvalue {l}");
                }
            }
            _ => unreachable!(),
        }
    }

    println!("criterion 7 PASS: MDS recovery, PCA variance, k-means SSE monotone, Laplacian range");
}

#[test]
fn criterion_08_knee_rule_unit() {
    use sdrlab::clustering::{auto_min_pts, knee_index};

    assert_eq!(auto_min_pts(100), 5); // ln 100 = 4.605 -> 5
    assert_eq!(auto_min_pts(2981), 8); // ln 2981 = 8.000
    assert_eq!(auto_min_pts(24075), 10); // ln 24075 = 10.089

    // [1,1,1,1,10]: knee at index 3 (max chord distance 6.75 / sqrt(1 + 2.25^2))
    assert_eq!(knee_index(&[1.0, 1.0, 1.0, 1.0, 10.0]), 3);
    // perfectly linear plot: all chord distances 0, tie-break to index 0
    assert_eq!(knee_index(&[1.0, 2.0, 3.0, 4.0, 5.0]), 0);

    println!("criterion 8 PASS: knee indices and min_pts = round(ln N) spot checks");
}

#[test]
fn criterion_09_timing_ordering() {
    let start = std::time::Instant::now();
    let sizes = [1 << 10, 1 << 12, 1 << 14];
    let rows = bench::run_scaling(&sizes, 2, 3, 9).unwrap();

    let at = |method: Method, n: usize| {
        rows.iter()
            .find(|r| r.method == method && r.n_points == n)
            .unwrap()
            .median_seconds
    };
    let largest = 1 << 14;
    let km = at(Method::Kmeans, largest);
    for method in [Method::HcComplete, Method::HcWard, Method::Dbscan, Method::Spectral] {
        assert!(
            km < at(method, largest),
            "k-means {km:.4} s not fastest at N = {largest}: {} took {:.4} s",
            method.name(),
            at(method, largest)
        );
    }

    let km_slope = bench::loglog_slope(&rows, Method::Kmeans).unwrap();
    for method in [Method::HcComplete, Method::HcWard] {
        let slope = bench::loglog_slope(&rows, method).unwrap();
        assert!(
            slope > km_slope,
            "{} slope {slope:.2} <= k-means slope {km_slope:.2}",
            method.name()
        );
    }

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 600.0, "timing harness took {elapsed:.0} s");
    println!(
        "criterion 9 PASS: k-means fastest at N = 2^14 and HC grows steeper (slopes hc vs km: {:.2}/{:.2} vs {km_slope:.2}; {elapsed:.0} s)",
        bench::loglog_slope(&rows, Method::HcComplete).unwrap(),
        bench::loglog_slope(&rows, Method::HcWard).unwrap()
    );
}

#[test]
fn criterion_10_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let base = PipelineConfig::parse_config_text(
        "input.synth.family = T2\ninput.synth.n = 200\ninput.synth.dims = 8\n\
         input.synth.clusters = 3\nseed = 11\nmethods = kmeans,dbscan\nconditions = lmds,slmds\n",
    )
    .unwrap();

    let mut artifacts = Vec::new();
    for run in 0..2 {
        let mut map = base.clone();
        map.insert(
            "out_dir".into(),
            tmp.path().join(format!("run{run}")).display().to_string(),
        );
        let cfg = PipelineConfig::from_map(&map).unwrap();
        let dir = run_pipeline(&cfg).unwrap();
        let mut bundle = Vec::new();
        for f in [
            "labels_lmds_kmeans.csv",
            "labels_slmds_kmeans.csv",
            "labels_slmds_dbscan.csv",
            "report_slmds_kmeans.json",
            "report_lmds_dbscan.json",
            "scatter_slmds_kmeans.svg",
            "scatter_lmds_dbscan.svg",
            "summary.csv",
        ] {
            bundle.push(std::fs::read(dir.join(f)).unwrap());
        }
        artifacts.push(bundle);
    }
    assert_eq!(artifacts[0], artifacts[1], "artifacts differ between identical runs");
    println!("criterion 10 PASS: byte-identical labels, reports, and SVG across two runs");
}
