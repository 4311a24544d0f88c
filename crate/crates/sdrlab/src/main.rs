//! Command-line front end for the sharpening + projection + clustering
//! pipeline. Exit codes: 0 success, 2 config error, 3 data error, 4 numeric
//! failure.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sdrlab::clustering::{self, Linkage, Method};
use sdrlab::dataset::{self, Dataset};
use sdrlab::error::{Error, Result};
use sdrlab::pipeline::{run_pipeline, PipelineConfig};
use sdrlab::projection;
use sdrlab::sharpen::{sharpen, SharpenParams};
use sdrlab::synth::{generate, Family, SynthSpec};
use sdrlab::{bench, metrics, plot};

#[derive(Parser)]
#[command(name = "sdrlab", version, about = "Density sharpening, landmark MDS projection, clustering, and external validation metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic Gaussian dataset (families T1-T5)
    Synth(SynthArgs),
    /// Sharpen point density by iterated mean shift toward kNN centroids
    Sharpen(SharpenArgs),
    /// Project to low dimension with landmark MDS (or PCA)
    Project(ProjectArgs),
    /// Label points with one of the five clustering methods
    Cluster(ClusterArgs),
    /// Score predicted labels against ground truth
    Evaluate(EvaluateArgs),
    /// Run the full load -> [sharpen] -> project -> cluster -> evaluate grid
    Pipeline(PipelineArgs),
    /// Wall-clock scaling comparison of the five clustering methods
    Bench(BenchArgs),
    /// Render a labeled 2-D projection as an SVG scatter plot
    Plot(PlotArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Family: T1 (equal), T2 (varying density), T3 (skewed), T4 (sub-clustered), T5 (noisy)
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 5000)]
    n: usize,
    #[arg(long, default_value_t = 20)]
    dims: usize,
    #[arg(long, default_value_t = 5)]
    clusters: usize,
    /// Signal-to-noise ratio for T5 (linear variance ratio, not dB)
    #[arg(long, default_value_t = 10.0)]
    snr: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SharpenArgs {
    /// Neighborhood size; defaults to round(sqrt(N))
    #[arg(long)]
    k: Option<usize>,
    /// Step size alpha in (0, 1]
    #[arg(long, default_value_t = 0.3)]
    alpha: f64,
    #[arg(long, default_value_t = 10)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "in")]
    input: PathBuf,
    /// Ground-truth column passed through untouched (auto-detects "label")
    #[arg(long)]
    label_col: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ProjectArgs {
    /// lmds or pca
    #[arg(long, default_value = "lmds")]
    method: String,
    /// Landmark count; defaults to max(50, round(sqrt(N)))
    #[arg(long)]
    landmarks: Option<usize>,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Cumulative variance fraction kept when --method pca
    #[arg(long, default_value_t = 0.8)]
    variance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    label_col: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClusterArgs {
    /// kmeans, hc_complete, hc_ward, dbscan, or spectral
    #[arg(long)]
    method: String,
    /// Cluster count for kmeans/hc/spectral; defaults to the ground-truth class count
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 10)]
    replicates: usize,
    /// Estimate DBSCAN eps and MinPts from the k-distance knee rule.
    /// eps is a Euclidean radius (comparisons run on squared distances,
    /// which preserves the ordering); the knee is found on the distance
    /// plot itself.
    #[arg(long, default_value_t = false)]
    auto_params: bool,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    min_pts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    label_col: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Predicted labels CSV (single "cluster" column, -1 = noise)
    #[arg(long)]
    pred: PathBuf,
    /// Dataset CSV carrying the ground-truth column
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    label_col: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PipelineArgs {
    /// Flat key=value config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override or add a config entry (repeatable), e.g. --set sharpen.alpha=0.5
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Seeds per condition; reports carry mean and std over runs
    #[arg(long)]
    runs: Option<usize>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated ascending observation counts
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    dims: usize,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PlotArgs {
    /// 2-D projection CSV (columns p1,p2; label column ignored)
    #[arg(long = "in")]
    input: PathBuf,
    /// Labels CSV ("cluster" column); omit to color by the projection's own label column
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Use the explicit label column, else auto-detect one literally named
/// "label" so artifact CSVs round-trip without flags.
fn load_with_auto_label(path: &Path, label_col: Option<&str>) -> Result<Dataset> {
    match label_col {
        Some(c) => dataset::load_csv(path, Some(c)),
        None => {
            let header = std::fs::read_to_string(path)
                .map_err(|e| Error::io(path, e))?
                .lines()
                .next()
                .unwrap_or("")
                .to_string();
            let has_label = header.split(',').any(|h| h.trim() == "label");
            dataset::load_csv(path, has_label.then_some("label"))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(a) => {
            let family: Family = a.family.parse()?;
            let mut spec = SynthSpec::new(family, a.n, a.dims, a.clusters, a.seed);
            spec.snr = a.snr;
            let ds = generate(&spec)?;
            dataset::save_csv(&ds, &a.out)?;
            eprintln!("wrote {} ({} x {})", a.out.display(), ds.n_points(), ds.n_dims());
            Ok(())
        }
        Command::Sharpen(a) => {
            let ds = load_with_auto_label(&a.input, a.label_col.as_deref())?;
            let params = SharpenParams {
                k_neighbors: a
                    .k
                    .unwrap_or_else(|| SharpenParams::defaults_for(ds.n_points(), a.seed).k_neighbors),
                step_size: a.alpha,
                iterations: a.iters,
                seed: a.seed,
            };
            let out = sharpen(&ds, &params)?;
            dataset::save_csv(&out, &a.out)?;
            eprintln!(
                "sharpened {} points (k = {}, alpha = {}, iters = {})",
                out.n_points(),
                params.k_neighbors,
                params.step_size,
                params.iterations
            );
            Ok(())
        }
        Command::Project(a) => {
            let ds = load_with_auto_label(&a.input, a.label_col.as_deref())?;
            match a.method.as_str() {
                "lmds" => {
                    let landmarks = a
                        .landmarks
                        .unwrap_or_else(|| projection::default_n_landmarks(ds.n_points()));
                    let proj = projection::lmds(&ds, landmarks, a.dim, a.seed)?;
                    write_projection_csv(&proj.coords, ds.labels.as_deref(), &a.out)?;
                    if !proj.negative_eigenvalues.is_empty() {
                        eprintln!(
                            "note: {} negative eigenvalues clamped to zero",
                            proj.negative_eigenvalues.len()
                        );
                    }
                    eprintln!("projected to {} dims with {landmarks} landmarks", a.dim);
                }
                "pca" => {
                    let (reduced, eig) = projection::pca_reduce(&ds, a.variance)?;
                    write_projection_csv(&reduced.points, reduced.labels.as_deref(), &a.out)?;
                    let total: f64 = eig.iter().sum();
                    let kept: f64 = eig.iter().take(reduced.n_dims()).sum();
                    eprintln!(
                        "kept {} components ({:.4} of variance)",
                        reduced.n_dims(),
                        kept / total
                    );
                }
                other => {
                    return Err(Error::config(format!(
                        "unknown projection method '{other}' (expected lmds or pca)"
                    )))
                }
            }
            Ok(())
        }
        Command::Cluster(a) => {
            let method: Method = a.method.parse()?;
            let ds = load_with_auto_label(&a.input, a.label_col.as_deref())?;
            let k = a.k.or_else(|| {
                let c = ds.n_classes();
                (c > 0).then_some(c)
            });
            let need_k = || {
                k.ok_or_else(|| {
                    Error::config("supply --k or a ground-truth label column".to_string())
                })
            };
            let result = match method {
                Method::Kmeans => clustering::kmeans(&ds.points, need_k()?, a.replicates, 100, a.seed)?,
                Method::HcComplete => clustering::hc(&ds.points, need_k()?, Linkage::Complete)?,
                Method::HcWard => clustering::hc(&ds.points, need_k()?, Linkage::Ward)?,
                Method::Dbscan => {
                    let (eps, min_pts) = if a.auto_params {
                        clustering::dbscan_auto_params(&ds.points)?
                    } else {
                        (
                            a.eps.ok_or_else(|| {
                                Error::config("dbscan needs --eps/--min-pts or --auto-params")
                            })?,
                            a.min_pts.ok_or_else(|| {
                                Error::config("dbscan needs --eps/--min-pts or --auto-params")
                            })?,
                        )
                    };
                    eprintln!("dbscan eps = {eps}, min_pts = {min_pts}");
                    clustering::dbscan(&ds.points, eps, min_pts)?
                }
                Method::Spectral => clustering::spectral(&ds.points, need_k()?, None, a.seed)?,
            };
            let mut out = String::from("cluster\n");
            for l in &result.labels {
                out.push_str(&format!("{l}\n"));
            }
            std::fs::write(&a.out, out).map_err(|e| Error::io(&a.out, e))?;
            eprintln!("{} clusters written to {}", result.n_clusters, a.out.display());
            Ok(())
        }
        Command::Evaluate(a) => {
            let pred_ds = dataset::load_csv(&a.pred, None).map_err(|e| {
                Error::data(format!("predicted labels: {e}"))
            })?;
            let pred: Vec<i64> = pred_ds.points.column(0).iter().map(|&v| v as i64).collect();
            let truth_ds = dataset::load_csv(&a.truth, Some(&a.label_col))?;
            let n_truth = truth_ds.n_points();
            let truth = truth_ds
                .labels
                .ok_or_else(|| Error::data("truth file has no labels"))?;
            let report = metrics::evaluate(&pred, &truth)?;
            let json = serde_json::json!({
                "accuracy": report.accuracy,
                "purity": report.purity,
                "nmi": report.nmi,
                "n_predicted_clusters": report.n_predicted_clusters,
                "noise_fraction": report.noise_fraction,
                "n_points": n_truth,
                "pred_file": a.pred.display().to_string(),
                "truth_file": a.truth.display().to_string(),
                "label_col": a.label_col,
                "noise_handling": "noise counts as error under accuracy, majority row under purity",
            });
            let text = serde_json::to_string_pretty(&json)
                .map_err(|e| Error::data(format!("report serialization: {e}")))?;
            std::fs::write(&a.out, text + "\n").map_err(|e| Error::io(&a.out, e))?;
            println!(
                "accuracy = {:.4}  purity = {:.4}  nmi = {:.4}",
                report.accuracy, report.purity, report.nmi
            );
            Ok(())
        }
        Command::Pipeline(a) => {
            let mut map = match &a.config {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                    PipelineConfig::parse_config_text(&text)?
                }
                None => BTreeMap::new(),
            };
            for s in &a.sets {
                let (k, v) = s
                    .split_once('=')
                    .ok_or_else(|| Error::config(format!("--set expects KEY=VALUE, got '{s}'")))?;
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
            if let Some(seed) = a.seed {
                map.insert("seed".into(), seed.to_string());
            }
            if let Some(dir) = &a.out_dir {
                map.insert("out_dir".into(), dir.display().to_string());
            }
            if let Some(runs) = a.runs {
                map.insert("runs".into(), runs.to_string());
            }
            let config = PipelineConfig::from_map(&map)?;
            let dir = run_pipeline(&config)?;
            println!("run directory: {}", dir.display());
            Ok(())
        }
        Command::Bench(a) => {
            let rows = bench::run_scaling(&a.sizes, a.dims, a.repeats, a.seed)?;
            bench::write_csv(&rows, &a.out)?;
            for r in &rows {
                println!(
                    "{:<12} N = {:<7} median = {:.6} s ({} repeats)",
                    r.method.name(),
                    r.n_points,
                    r.median_seconds,
                    r.repeats
                );
            }
            Ok(())
        }
        Command::Plot(a) => {
            let proj = load_with_auto_label(&a.input, None)?;
            let labels: Vec<i64> = match &a.labels {
                Some(path) => {
                    let l = dataset::load_csv(path, None)?;
                    l.points.column(0).iter().map(|&v| v as i64).collect()
                }
                None => proj
                    .labels
                    .clone()
                    .ok_or_else(|| Error::data("no --labels file and no label column in input"))?,
            };
            plot::plot_scatter(&proj.points, &labels, &a.out)?;
            eprintln!("wrote {}", a.out.display());
            Ok(())
        }
    }
}

fn write_projection_csv(
    coords: &sdrlab::linalg::Matrix,
    labels: Option<&[i64]>,
    path: &Path,
) -> Result<()> {
    let mut out = String::new();
    let mut header: Vec<String> = (1..=coords.cols()).map(|a| format!("p{a}")).collect();
    if labels.is_some() {
        header.push("label".to_string());
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..coords.rows() {
        let mut row: Vec<String> = coords.row(i).iter().map(|v| format!("{v}")).collect();
        if let Some(l) = labels {
            row.push(l[i].to_string());
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
