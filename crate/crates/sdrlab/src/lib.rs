//! Density-sharpening + landmark MDS + clustering pipeline.
//!
//! The library sharpens high-dimensional point clouds by iterated mean-shift
//! toward k-nearest-neighbor centroids, projects them to 2-D with Landmark
//! MDS, labels the projection with five clustering methods (k-means,
//! hierarchical complete/ward, DBSCAN, spectral), and scores the labels
//! against ground truth with permutation-matched accuracy, purity, and NMI.

pub mod bench;
pub mod clustering;
pub mod dataset;
pub mod error;
pub mod knn;
pub mod linalg;
pub mod metrics;
pub mod pipeline;
pub mod plot;
pub mod projection;
pub mod sharpen;
pub mod synth;

pub use error::{Error, Result};
