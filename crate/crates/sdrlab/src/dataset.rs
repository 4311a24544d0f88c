//! Dataset loading, validation, standardization, and ground-truth relabeling.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// An N x n observation matrix plus optional integer ground-truth labels.
///
/// Labels are re-encoded to contiguous 0-based integers at load time; the
/// original textual names, when present, are kept in `label_names` (index =
/// encoded id). `sublabels` carries a second, finer labeling when a dataset
/// defines one (the sub-clustered synthetic family does).
#[derive(Debug, Clone)]
pub struct Dataset {
    pub points: Matrix,
    pub labels: Option<Vec<i64>>,
    pub sublabels: Option<Vec<i64>>,
    pub label_names: Option<Vec<String>>,
    pub name: String,
}

impl Dataset {
    pub fn new(points: Matrix, labels: Option<Vec<i64>>, name: impl Into<String>) -> Result<Self> {
        let ds = Dataset {
            points,
            labels,
            sublabels: None,
            label_names: None,
            name: name.into(),
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn n_points(&self) -> usize {
        self.points.rows()
    }

    pub fn n_dims(&self) -> usize {
        self.points.cols()
    }

    /// Number of distinct ground-truth classes (0 when unlabeled).
    pub fn n_classes(&self) -> usize {
        match &self.labels {
            Some(l) => {
                let mut seen: Vec<i64> = l.clone();
                seen.sort_unstable();
                seen.dedup();
                seen.len()
            }
            None => 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.points.rows() == 0 || self.points.cols() == 0 {
            return Err(Error::data("dataset must have N >= 1 and n >= 1"));
        }
        if !self.points.is_finite() {
            return Err(Error::data("dataset contains non-finite coordinates"));
        }
        if let Some(l) = &self.labels {
            if l.len() != self.points.rows() {
                return Err(Error::data(format!(
                    "label length {} does not match N = {}",
                    l.len(),
                    self.points.rows()
                )));
            }
            if l.iter().any(|&v| v < 0) {
                return Err(Error::data("ground-truth labels must be non-negative"));
            }
        }
        Ok(())
    }
}

/// Total map from sub-class ids to contiguous 0-based super-class ids.
#[derive(Debug, Clone)]
pub struct ClassMap {
    mapping: BTreeMap<i64, i64>,
    pub names: Option<Vec<String>>,
}

impl ClassMap {
    pub fn from_pairs(pairs: &[(i64, i64)]) -> Result<Self> {
        let mapping: BTreeMap<i64, i64> = pairs.iter().copied().collect();
        let mut images: Vec<i64> = mapping.values().copied().collect();
        images.sort_unstable();
        images.dedup();
        for (want, &got) in images.iter().enumerate() {
            if got != want as i64 {
                return Err(Error::config(format!(
                    "super-class ids must be contiguous from 0, found {got}"
                )));
            }
        }
        Ok(ClassMap {
            mapping,
            names: None,
        })
    }

    /// Parse "0=0,1=1,2=2,3=3,4=3" style text.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for part in text.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (from, to) = part
                .split_once('=')
                .ok_or_else(|| Error::config(format!("bad class-map entry '{part}'")))?;
            let from: i64 = from
                .trim()
                .parse()
                .map_err(|_| Error::config(format!("bad sub-class id '{from}'")))?;
            let to: i64 = to
                .trim()
                .parse()
                .map_err(|_| Error::config(format!("bad super-class id '{to}'")))?;
            pairs.push((from, to));
        }
        ClassMap::from_pairs(&pairs)
    }

    pub fn image(&self, sub: i64) -> Option<i64> {
        self.mapping.get(&sub).copied()
    }
}

/// Element-wise relabeling of ground truth through a class map.
pub fn regroup(labels: &[i64], map: &ClassMap) -> Result<Vec<i64>> {
    labels
        .iter()
        .map(|&l| {
            map.image(l)
                .ok_or_else(|| Error::data(format!("label {l} has no image in the class map")))
        })
        .collect()
}

/// Column-wise z-scoring; constant columns map to all-zero.
pub fn standardize(data: &Dataset) -> Dataset {
    let n = data.n_points();
    let d = data.n_dims();
    let mut out = data.points.clone();
    for j in 0..d {
        let mean: f64 = (0..n).map(|i| out.get(i, j)).sum::<f64>() / n as f64;
        let var: f64 = (0..n).map(|i| (out.get(i, j) - mean).powi(2)).sum::<f64>() / n as f64;
        let sd = var.sqrt();
        if sd > 0.0 {
            for i in 0..n {
                let v = (out.get(i, j) - mean) / sd;
                out.set(i, j, v);
            }
        } else {
            for i in 0..n {
                out.set(i, j, 0.0);
            }
        }
    }
    Dataset {
        points: out,
        labels: data.labels.clone(),
        sublabels: data.sublabels.clone(),
        label_names: data.label_names.clone(),
        name: data.name.clone(),
    }
}

/// Load a CSV file (UTF-8, header row, comma-separated).
///
/// `label_column` names the ground-truth column; its values may be text and
/// are re-encoded to 0-based integers in order of first occurrence. A column
/// literally named `sublabel` is treated as auxiliary integer labels rather
/// than a feature (the synthetic generator writes one for the sub-clustered
/// family).
pub fn load_csv(path: &Path, label_column: Option<&str>) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::data(format!("cannot open {}: {e}", path.display())),
            _ => Error::data(format!("{}: {e}", path.display())),
        })?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::data(format!("{}: bad header: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() {
        return Err(Error::data(format!("{}: empty file", path.display())));
    }

    let label_idx = match label_column {
        Some(name) => Some(headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::data(format!(
                "{}: label column '{name}' not found in header",
                path.display()
            ))
        })?),
        None => None,
    };
    let sublabel_idx = headers
        .iter()
        .position(|h| h == "sublabel")
        .filter(|&i| Some(i) != label_idx);

    let arity = headers.len();
    let mut points: Vec<f64> = Vec::new();
    let mut raw_labels: Vec<String> = Vec::new();
    let mut sublabels: Vec<i64> = Vec::new();
    let mut n_rows = 0usize;

    for (row_no, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| Error::data(format!("{}: row {}: {e}", path.display(), row_no + 2)))?;
        if record.len() != arity {
            return Err(Error::data(format!(
                "{}: row {}: expected {} columns, found {}",
                path.display(),
                row_no + 2,
                arity,
                record.len()
            )));
        }
        for (col, cell) in record.iter().enumerate() {
            if Some(col) == label_idx {
                raw_labels.push(cell.to_string());
                continue;
            }
            if Some(col) == sublabel_idx {
                let v: i64 = cell.trim().parse().map_err(|_| {
                    Error::data(format!(
                        "{}: row {}, column '{}': non-integer sublabel '{cell}'",
                        path.display(),
                        row_no + 2,
                        headers[col]
                    ))
                })?;
                sublabels.push(v);
                continue;
            }
            let v: f64 = cell.trim().parse().map_err(|_| {
                Error::data(format!(
                    "{}: row {}, column '{}': non-numeric cell '{cell}'",
                    path.display(),
                    row_no + 2,
                    headers[col]
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::data(format!(
                    "{}: row {}, column '{}': non-finite value",
                    path.display(),
                    row_no + 2,
                    headers[col]
                )));
            }
            points.push(v);
        }
        n_rows += 1;
    }

    if n_rows == 0 {
        return Err(Error::data(format!("{}: no data rows", path.display())));
    }

    let n_features = arity - label_idx.map_or(0, |_| 1) - sublabel_idx.map_or(0, |_| 1);
    if n_features == 0 {
        return Err(Error::data(format!(
            "{}: no numeric feature columns",
            path.display()
        )));
    }

    // first-occurrence encoding of label values
    let (labels, label_names) = if label_idx.is_some() {
        let mut names: Vec<String> = Vec::new();
        let mut encoded = Vec::with_capacity(n_rows);
        for raw in &raw_labels {
            let id = match names.iter().position(|n| n == raw) {
                Some(i) => i,
                None => {
                    names.push(raw.clone());
                    names.len() - 1
                }
            };
            encoded.push(id as i64);
        }
        (Some(encoded), Some(names))
    } else {
        (None, None)
    };

    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());

    let mut ds = Dataset::new(Matrix::from_vec(n_rows, n_features, points), labels, stem)?;
    ds.label_names = label_names;
    ds.sublabels = if sublabel_idx.is_some() {
        Some(sublabels)
    } else {
        None
    };
    Ok(ds)
}

/// Write a dataset as CSV with feature columns `f0..f{n-1}` plus `label`
/// (and `sublabel`) columns when present. Floats use shortest round-trip
/// formatting so load_csv(save_csv(d)) reproduces the points bit-exactly.
pub fn save_csv(data: &Dataset, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| {
        Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::Other, e.to_string()),
        )
    })?;
    let n = data.n_points();
    let d = data.n_dims();

    let mut header: Vec<String> = (0..d).map(|j| format!("f{j}")).collect();
    if data.labels.is_some() {
        header.push("label".to_string());
    }
    if data.sublabels.is_some() {
        header.push("sublabel".to_string());
    }
    w.write_record(&header)
        .map_err(|e| Error::data(format!("{}: {e}", path.display())))?;

    for i in 0..n {
        let mut rec: Vec<String> = data.points.row(i).iter().map(|v| format!("{v}")).collect();
        if let Some(l) = &data.labels {
            rec.push(l[i].to_string());
        }
        if let Some(s) = &data.sublabels {
            rec.push(s[i].to_string());
        }
        w.write_record(&rec)
            .map_err(|e| Error::data(format!("{}: {e}", path.display())))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
