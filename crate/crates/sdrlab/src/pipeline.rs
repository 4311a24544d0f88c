//! End-to-end orchestration: load -> [sharpen] -> project -> cluster ->
//! evaluate -> plot, with a flat key=value config, per-run seeding, and a
//! reproducibility manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::clustering::{self, ClusteringResult, Linkage, Method};
use crate::dataset::{self, ClassMap, Dataset};
use crate::error::{Error, Result};
use crate::metrics::{self, MetricReport};
use crate::plot;
use crate::projection::{self, default_n_landmarks};
use crate::sharpen::{sharpen, SharpenParams};
use crate::synth::{Family, SynthSpec};

/// The two experimental conditions: projection of raw data (lmds) and of
/// sharpened data (slmds).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Lmds,
    Slmds,
}

impl Condition {
    pub fn name(&self) -> &'static str {
        match self {
            Condition::Lmds => "lmds",
            Condition::Slmds => "slmds",
        }
    }
}

impl std::str::FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lmds" => Ok(Condition::Lmds),
            "slmds" => Ok(Condition::Slmds),
            other => Err(Error::config(format!(
                "unknown condition '{other}' (expected lmds or slmds)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum InputSource {
    File {
        path: PathBuf,
        label_col: Option<String>,
    },
    Synth(SynthSpec),
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub input: InputSource,
    pub standardize: bool,
    pub regroup: Option<ClassMap>,
    pub pca_variance: Option<f64>,
    pub conditions: Vec<Condition>,
    pub sharpen_k: Option<usize>,
    pub sharpen_alpha: f64,
    pub sharpen_iters: usize,
    pub n_landmarks: Option<usize>,
    pub target_dim: usize,
    pub methods: Vec<Method>,
    /// Cluster count for k-means/HC/spectral; defaults to the ground-truth
    /// class count.
    pub k: Option<usize>,
    pub runs: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl PipelineConfig {
    /// Parse flat key=value text ('#' starts a comment). CLI overrides are
    /// applied by merging into the same map before building.
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let get = |k: &str| map.get(k).map(String::as_str);
        let parse_num = |k: &str| -> Result<Option<f64>> {
            get(k)
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| Error::config(format!("bad numeric value for {k}: '{v}'")))
                })
                .transpose()
        };
        let parse_usize = |k: &str| -> Result<Option<usize>> {
            get(k)
                .map(|v| {
                    v.parse::<usize>()
                        .map_err(|_| Error::config(format!("bad integer value for {k}: '{v}'")))
                })
                .transpose()
        };

        let input = if let Some(path) = get("input.file") {
            InputSource::File {
                path: PathBuf::from(path),
                label_col: get("input.label_col").map(str::to_string),
            }
        } else if let Some(family) = get("input.synth.family") {
            let family: Family = family.parse()?;
            let mut spec = SynthSpec::new(
                family,
                parse_usize("input.synth.n")?.unwrap_or(1000),
                parse_usize("input.synth.dims")?.unwrap_or(20),
                parse_usize("input.synth.clusters")?.unwrap_or(5),
                parse_usize("seed")?.unwrap_or(0) as u64,
            );
            if let Some(snr) = parse_num("input.synth.snr")? {
                spec.snr = snr;
            }
            InputSource::Synth(spec)
        } else {
            return Err(Error::config(
                "config must set input.file or input.synth.family",
            ));
        };

        let conditions: Vec<Condition> = get("conditions")
            .unwrap_or("lmds,slmds")
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<Result<_>>()?;
        if conditions.is_empty() {
            return Err(Error::config("at least one condition required"));
        }
        let methods: Vec<Method> = get("methods")
            .unwrap_or("kmeans,hc_complete,hc_ward,dbscan,spectral")
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<Result<_>>()?;
        if methods.is_empty() {
            return Err(Error::config("at least one clustering method required"));
        }

        let seed = parse_usize("seed")?.ok_or_else(|| Error::config("seed is required"))? as u64;

        Ok(PipelineConfig {
            input,
            standardize: get("standardize").map_or(false, |v| v == "true" || v == "1"),
            regroup: get("regroup").map(ClassMap::parse).transpose()?,
            pca_variance: parse_num("pca_variance")?,
            conditions,
            sharpen_k: parse_usize("sharpen.k")?,
            sharpen_alpha: parse_num("sharpen.alpha")?.unwrap_or(0.3),
            sharpen_iters: parse_usize("sharpen.iters")?.unwrap_or(10),
            n_landmarks: parse_usize("project.landmarks")?,
            target_dim: parse_usize("project.dim")?.unwrap_or(2),
            methods,
            k: parse_usize("k")?,
            runs: parse_usize("runs")?.unwrap_or(1).max(1),
            seed,
            out_dir: PathBuf::from(get("out_dir").unwrap_or("run")),
        })
    }

    pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
        let mut map = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("config line {}: missing '='", lineno + 1)))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(map)
    }
}

#[derive(Debug, Serialize)]
struct CellReport {
    dataset: String,
    condition: Condition,
    method: Method,
    seed: u64,
    runs: Vec<MetricReport>,
    mean: MetricSummary,
    std: MetricSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pca: Option<PcaInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

#[derive(Debug, Serialize, Clone, Copy)]
struct MetricSummary {
    accuracy: f64,
    purity: f64,
    nmi: f64,
}

#[derive(Debug, Serialize, Clone)]
struct PcaInfo {
    kept_dims: usize,
    variance_share: f64,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Execute the configured grid and return the run directory.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PathBuf> {
    let dir = config.out_dir.clone();
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    match run_pipeline_inner(config, &dir) {
        Ok(()) => Ok(dir),
        Err(e) => {
            // keep partial artifacts, mark the run as failed
            let marker = dir.join("FAILED");
            let _ = std::fs::write(&marker, format!("{e}\n"));
            Err(e)
        }
    }
}

fn run_pipeline_inner(config: &PipelineConfig, dir: &Path) -> Result<()> {
    // ---- load stage
    let mut data = match &config.input {
        InputSource::File { path, label_col } => {
            dataset::load_csv(path, label_col.as_deref())
                .map_err(|e| stage_err("load", e))?
        }
        InputSource::Synth(spec) => crate::synth::generate(spec).map_err(|e| stage_err("load", e))?,
    };
    if let Some(map) = &config.regroup {
        let labels = data
            .labels
            .as_ref()
            .ok_or_else(|| Error::data("regroup requested but dataset has no labels"))?;
        data.labels = Some(dataset::regroup(labels, map).map_err(|e| stage_err("regroup", e))?);
    }
    if config.standardize {
        data = dataset::standardize(&data);
    }
    let mut pca_info = None;
    if let Some(fraction) = config.pca_variance {
        let (reduced, eigvals) =
            projection::pca_reduce(&data, fraction).map_err(|e| stage_err("pca", e))?;
        let total: f64 = eigvals.iter().sum();
        let kept: f64 = eigvals.iter().take(reduced.n_dims()).sum();
        pca_info = Some(PcaInfo {
            kept_dims: reduced.n_dims(),
            variance_share: kept / total,
        });
        data = reduced;
    }

    write_manifest(config, &data, pca_info.as_ref(), dir)?;

    let n_landmarks = config
        .n_landmarks
        .unwrap_or_else(|| default_n_landmarks(data.n_points()));
    let k_default = config.k.or_else(|| {
        let c = data.n_classes();
        (c > 0).then_some(c)
    });

    // accumulated mean metrics for the summary table
    let mut summary: BTreeMap<(Condition, Method), MetricSummary> = BTreeMap::new();
    let mut cell_notes: Vec<String> = Vec::new();

    for &condition in &config.conditions {
        // per-run artifacts are produced for the first seed only
        let mut per_method_runs: BTreeMap<Method, Vec<MetricReport>> = BTreeMap::new();

        for run in 0..config.runs {
            let run_seed = config.seed.wrapping_add(run as u64);
            let stage_input = match condition {
                Condition::Lmds => data.clone(),
                Condition::Slmds => {
                    let params = SharpenParams {
                        k_neighbors: config
                            .sharpen_k
                            .unwrap_or_else(|| {
                                SharpenParams::defaults_for(data.n_points(), run_seed).k_neighbors
                            }),
                        step_size: config.sharpen_alpha,
                        iterations: config.sharpen_iters,
                        seed: run_seed,
                    };
                    sharpen(&data, &params).map_err(|e| stage_err("sharpen", e))?
                }
            };
            let proj = projection::lmds(&stage_input, n_landmarks, config.target_dim, run_seed)
                .map_err(|e| stage_err("project", e))?;

            if run == 0 {
                write_projection_csv(
                    &proj.coords,
                    data.labels.as_deref(),
                    &dir.join(format!("projection_{}.csv", condition.name())),
                )?;
            }

            for &method in &config.methods {
                let result = cluster_one(method, &proj.coords, k_default, run_seed)
                    .map_err(|e| stage_err("cluster", e))?;
                if run == 0 {
                    write_labels_csv(
                        &result.labels,
                        &dir.join(format!("labels_{}_{}.csv", condition.name(), method.name())),
                    )?;
                    plot::plot_scatter(
                        &proj.coords,
                        &result.labels,
                        &dir.join(format!("scatter_{}_{}.svg", condition.name(), method.name())),
                    )
                    .map_err(|e| stage_err("plot", e))?;
                }
                if let Some(truth) = data.labels.as_deref() {
                    let report = metrics::evaluate(&result.labels, truth)
                        .map_err(|e| stage_err("evaluate", e))?;
                    per_method_runs.entry(method).or_default().push(report);
                }
            }
        }

        for (&method, runs) in &per_method_runs {
            let acc: Vec<f64> = runs.iter().map(|r| r.accuracy).collect();
            let pur: Vec<f64> = runs.iter().map(|r| r.purity).collect();
            let nm: Vec<f64> = runs.iter().map(|r| r.nmi).collect();
            let (ma, sa) = mean_std(&acc);
            let (mp, sp) = mean_std(&pur);
            let (mn, sn) = mean_std(&nm);
            let note = if method == Method::Dbscan {
                Some(
                    "noise points count as errors under accuracy and as a majority row under purity"
                        .to_string(),
                )
            } else {
                None
            };
            let report = CellReport {
                dataset: data.name.clone(),
                condition,
                method,
                seed: config.seed,
                runs: runs.clone(),
                mean: MetricSummary {
                    accuracy: ma,
                    purity: mp,
                    nmi: mn,
                },
                std: MetricSummary {
                    accuracy: sa,
                    purity: sp,
                    nmi: sn,
                },
                pca: pca_info.clone(),
                note,
            };
            let path = dir.join(format!("report_{}_{}.json", condition.name(), method.name()));
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::data(format!("report serialization: {e}")))?;
            std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
            summary.insert((condition, method), report.mean);
            if let Some(n) = &report.note {
                if !cell_notes.contains(n) {
                    cell_notes.push(n.clone());
                }
            }
        }
    }

    if !summary.is_empty() {
        write_summary_csv(config, &data.name, &summary, dir)?;
    }
    Ok(())
}

fn stage_err(stage: &str, e: Error) -> Error {
    match e {
        Error::Config(m) => Error::Config(format!("[stage {stage}] {m}")),
        Error::Data(m) => Error::Data(format!("[stage {stage}] {m}")),
        Error::Numeric(m) => Error::Numeric(format!("[stage {stage}] {m}")),
        other => other,
    }
}

pub fn cluster_one(
    method: Method,
    points: &crate::linalg::Matrix,
    k: Option<usize>,
    seed: u64,
) -> Result<ClusteringResult> {
    let need_k = || {
        k.ok_or_else(|| {
            Error::config(format!(
                "method {} needs a cluster count: supply k or ground-truth labels",
                method.name()
            ))
        })
    };
    match method {
        Method::Kmeans => clustering::kmeans(points, need_k()?, 10, 100, seed),
        Method::HcComplete => clustering::hc(points, need_k()?, Linkage::Complete),
        Method::HcWard => clustering::hc(points, need_k()?, Linkage::Ward),
        Method::Dbscan => {
            let (eps, min_pts) = clustering::dbscan_auto_params(points)?;
            clustering::dbscan(points, eps, min_pts)
        }
        Method::Spectral => clustering::spectral(points, need_k()?, None, seed),
    }
}

fn write_manifest(
    config: &PipelineConfig,
    data: &Dataset,
    pca: Option<&PcaInfo>,
    dir: &Path,
) -> Result<()> {
    let mut m = String::new();
    let _ = writeln!(m, "dataset = {}", data.name);
    let _ = writeln!(m, "n_points = {}", data.n_points());
    let _ = writeln!(m, "n_dims = {}", data.n_dims());
    let _ = writeln!(m, "n_classes = {}", data.n_classes());
    match &config.input {
        InputSource::File { path, label_col } => {
            let _ = writeln!(m, "input.file = {}", path.display());
            if let Some(l) = label_col {
                let _ = writeln!(m, "input.label_col = {l}");
            }
        }
        InputSource::Synth(spec) => {
            let _ = writeln!(m, "input.synth.family = {}", spec.family);
            let _ = writeln!(m, "input.synth.n = {}", spec.n_points);
            let _ = writeln!(m, "input.synth.dims = {}", spec.n_dims);
            let _ = writeln!(m, "input.synth.clusters = {}", spec.n_clusters);
            let _ = writeln!(m, "input.synth.snr = {}", spec.snr);
        }
    }
    let _ = writeln!(m, "standardize = {}", config.standardize);
    if let Some(p) = config.pca_variance {
        let _ = writeln!(m, "pca_variance = {p}");
    }
    if let Some(info) = pca {
        let _ = writeln!(m, "pca_kept_dims = {}", info.kept_dims);
        let _ = writeln!(m, "pca_variance_share = {}", info.variance_share);
    }
    let _ = writeln!(
        m,
        "conditions = {}",
        config
            .conditions
            .iter()
            .map(Condition::name)
            .collect::<Vec<_>>()
            .join(",")
    );
    let _ = writeln!(
        m,
        "sharpen.k = {}",
        config
            .sharpen_k
            .unwrap_or_else(|| SharpenParams::defaults_for(data.n_points(), 0).k_neighbors)
    );
    let _ = writeln!(m, "sharpen.alpha = {}", config.sharpen_alpha);
    let _ = writeln!(m, "sharpen.iters = {}", config.sharpen_iters);
    let _ = writeln!(
        m,
        "project.landmarks = {}",
        config
            .n_landmarks
            .unwrap_or_else(|| default_n_landmarks(data.n_points()))
    );
    let _ = writeln!(m, "project.dim = {}", config.target_dim);
    let _ = writeln!(
        m,
        "methods = {}",
        config
            .methods
            .iter()
            .map(Method::name)
            .collect::<Vec<_>>()
            .join(",")
    );
    if let Some(k) = config.k {
        let _ = writeln!(m, "k = {k}");
    }
    let _ = writeln!(m, "runs = {}", config.runs);
    let _ = writeln!(m, "seed = {}", config.seed);
    let path = dir.join("manifest.txt");
    std::fs::write(&path, m).map_err(|e| Error::io(&path, e))
}

fn write_projection_csv(
    coords: &crate::linalg::Matrix,
    labels: Option<&[i64]>,
    path: &Path,
) -> Result<()> {
    let mut out = String::new();
    let dims = coords.cols();
    let mut header: Vec<String> = (1..=dims).map(|a| format!("p{a}")).collect();
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

fn write_labels_csv(labels: &[i64], path: &Path) -> Result<()> {
    let mut out = String::from("cluster\n");
    for l in labels {
        let _ = writeln!(out, "{l}");
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn write_summary_csv(
    config: &PipelineConfig,
    dataset: &str,
    summary: &BTreeMap<(Condition, Method), MetricSummary>,
    dir: &Path,
) -> Result<()> {
    let mut out = String::from("dataset,condition,metric,runs");
    for method in &config.methods {
        let _ = write!(out, ",{}", method.name());
    }
    out.push('\n');
    for &condition in &config.conditions {
        for metric in ["accuracy", "purity", "nmi"] {
            let _ = write!(out, "{dataset},{},{metric},{}", condition.name(), config.runs);
            for method in &config.methods {
                match summary.get(&(condition, *method)) {
                    Some(s) => {
                        let v = match metric {
                            "accuracy" => s.accuracy,
                            "purity" => s.purity,
                            _ => s.nmi,
                        };
                        let _ = write!(out, ",{v}");
                    }
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
    }
    let path = dir.join("summary.csv");
    std::fs::write(&path, out).map_err(|e| Error::io(&path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_map() -> BTreeMap<String, String> {
        PipelineConfig::parse_config_text(
            "input.synth.family = T1\ninput.synth.n = 120\ninput.synth.dims = 5\n\
             input.synth.clusters = 3\nseed = 7\nmethods = kmeans\nconditions = lmds,slmds\n",
        )
        .unwrap()
    }

    #[test]
    fn config_parse_and_defaults() {
        let cfg = PipelineConfig::from_map(&base_map()).unwrap();
        assert_eq!(cfg.conditions, vec![Condition::Lmds, Condition::Slmds]);
        assert_eq!(cfg.methods, vec![Method::Kmeans]);
        assert_eq!(cfg.runs, 1);
        assert!(!cfg.standardize);
    }

    #[test]
    fn config_requires_seed_and_input() {
        let mut map = base_map();
        map.remove("seed");
        assert!(PipelineConfig::from_map(&map).is_err());
        let mut map = base_map();
        map.remove("input.synth.family");
        assert!(PipelineConfig::from_map(&map).is_err());
    }

    #[test]
    fn full_run_produces_artifacts() {
        let tmp = tempfile::tempdir().unwrap();
        let mut map = base_map();
        map.insert("out_dir".into(), tmp.path().join("run").display().to_string());
        let cfg = PipelineConfig::from_map(&map).unwrap();
        let dir = run_pipeline(&cfg).unwrap();
        for f in [
            "manifest.txt",
            "summary.csv",
            "projection_lmds.csv",
            "projection_slmds.csv",
            "labels_lmds_kmeans.csv",
            "labels_slmds_kmeans.csv",
            "report_lmds_kmeans.json",
            "report_slmds_kmeans.json",
            "scatter_lmds_kmeans.svg",
            "scatter_slmds_kmeans.svg",
        ] {
            assert!(dir.join(f).exists(), "missing {f}");
        }
        assert!(!dir.join("FAILED").exists());
    }

    #[test]
    fn determinism_byte_for_byte() {
        let tmp = tempfile::tempdir().unwrap();
        let mut files = Vec::new();
        for run in 0..2 {
            let mut map = base_map();
            map.insert(
                "out_dir".into(),
                tmp.path().join(format!("run{run}")).display().to_string(),
            );
            let cfg = PipelineConfig::from_map(&map).unwrap();
            let dir = run_pipeline(&cfg).unwrap();
            files.push((
                std::fs::read(dir.join("labels_slmds_kmeans.csv")).unwrap(),
                std::fs::read(dir.join("report_slmds_kmeans.json")).unwrap(),
                std::fs::read(dir.join("scatter_slmds_kmeans.svg")).unwrap(),
                std::fs::read(dir.join("summary.csv")).unwrap(),
            ));
        }
        assert_eq!(files[0], files[1]);
    }

    #[test]
    fn failed_marker_on_stage_error() {
        let tmp = tempfile::tempdir().unwrap();
        let mut map = base_map();
        map.insert("out_dir".into(), tmp.path().join("bad").display().to_string());
        // landmark count exceeding N fails in the project stage
        map.insert("project.landmarks".into(), "5000".into());
        let cfg = PipelineConfig::from_map(&map).unwrap();
        let err = run_pipeline(&cfg).unwrap_err();
        assert!(err.to_string().contains("project"), "{err}");
        assert!(tmp.path().join("bad").join("FAILED").exists());
    }

    #[test]
    fn summary_has_all_cells() {
        let tmp = tempfile::tempdir().unwrap();
        let mut map = base_map();
        map.insert("methods".into(), "kmeans,dbscan".into());
        map.insert("out_dir".into(), tmp.path().join("grid").display().to_string());
        let cfg = PipelineConfig::from_map(&map).unwrap();
        let dir = run_pipeline(&cfg).unwrap();
        let summary = std::fs::read_to_string(dir.join("summary.csv")).unwrap();
        // header + 2 conditions x 3 metrics
        assert_eq!(summary.lines().count(), 1 + 2 * 3);
        for line in summary.lines().skip(1) {
            // every method column populated
            assert_eq!(line.split(',').count(), 4 + 2);
            assert!(!line.ends_with(','));
        }
    }
}
