//! The five labeling methods: k-means, hierarchical (complete and ward
//! linkage), DBSCAN with automatic parameter estimation, and spectral
//! clustering on a kNN graph.

mod dbscan;
mod hc;
mod kmeans;
mod spectral;

pub use dbscan::{auto_min_pts, dbscan, dbscan_auto_params, knee_index};
pub use hc::{hc, Linkage};
pub use kmeans::kmeans;
pub use spectral::spectral;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Kmeans,
    HcComplete,
    HcWard,
    Dbscan,
    Spectral,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Kmeans,
        Method::HcComplete,
        Method::HcWard,
        Method::Dbscan,
        Method::Spectral,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Kmeans => "kmeans",
            Method::HcComplete => "hc_complete",
            Method::HcWard => "hc_ward",
            Method::Dbscan => "dbscan",
            Method::Spectral => "spectral",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s {
            "kmeans" => Ok(Method::Kmeans),
            "hc_complete" => Ok(Method::HcComplete),
            "hc_ward" => Ok(Method::HcWard),
            "dbscan" => Ok(Method::Dbscan),
            "spectral" => Ok(Method::Spectral),
            other => Err(crate::error::Error::config(format!(
                "unknown clustering method '{other}' (expected kmeans, hc_complete, hc_ward, dbscan, spectral)"
            ))),
        }
    }
}

/// One merge step of an agglomerative hierarchy, identified by any member
/// point of each merged cluster.
#[derive(Debug, Clone, Serialize)]
pub struct MergeStep {
    pub cluster_a: usize,
    pub cluster_b: usize,
    pub dissimilarity: f64,
    pub size: usize,
}

/// Method-specific byproducts kept alongside the labels.
#[derive(Debug, Clone, Serialize)]
pub enum Metadata {
    Kmeans {
        centroids: Vec<Vec<f64>>,
        sse: f64,
        /// SSE after each Lloyd iteration of the winning replicate.
        sse_history: Vec<f64>,
    },
    Hierarchical {
        merges: Vec<MergeStep>,
    },
    Dbscan {
        eps: f64,
        min_pts: usize,
        core: Vec<bool>,
    },
    Spectral {
        /// The k smallest Laplacian eigenvalues used for the embedding.
        eigenvalues: Vec<f64>,
        n_components: usize,
        warning: Option<String>,
    },
}

/// Labels plus method bookkeeping. Label -1 marks DBSCAN noise; all other
/// labels are contiguous from 0 and every one occurs at least once.
#[derive(Debug, Clone)]
pub struct ClusteringResult {
    pub labels: Vec<i64>,
    pub n_clusters: usize,
    pub method: Method,
    pub metadata: Metadata,
}

/// Relabel arbitrary non-negative labels to contiguous 0-based ids in order
/// of first occurrence; -1 passes through.
pub(crate) fn canonicalize_labels(labels: &mut [i64]) -> usize {
    let mut map: Vec<i64> = Vec::new();
    for l in labels.iter_mut() {
        if *l < 0 {
            continue;
        }
        let id = match map.iter().position(|&m| m == *l) {
            Some(i) => i,
            None => {
                map.push(*l);
                map.len() - 1
            }
        };
        *l = id as i64;
    }
    map.len()
}
