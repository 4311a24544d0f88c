//! Deterministic SVG scatter plots of 2-D projections, colored by label.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Fixed palette, cycled when there are more than 12 clusters.
const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
];
const NOISE_COLOR: &str = "#999999";

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const RADIUS: f64 = 2.5;

/// Render one circle per point. Noise (-1) is gray; axes are autoscaled
/// with a 5% margin. Output bytes are a pure function of the input.
pub fn scatter_svg(coords: &Matrix, labels: &[i64]) -> Result<String> {
    if coords.cols() != 2 {
        return Err(Error::config(format!(
            "scatter plot requires a 2-D projection, got {} dims",
            coords.cols()
        )));
    }
    if labels.len() != coords.rows() {
        return Err(Error::data("scatter plot: label / coordinate length mismatch"));
    }

    let n = coords.rows();
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        min_x = min_x.min(coords.get(i, 0));
        max_x = max_x.max(coords.get(i, 0));
        min_y = min_y.min(coords.get(i, 1));
        max_y = max_y.max(coords.get(i, 1));
    }
    let pad = |lo: f64, hi: f64| {
        let span = (hi - lo).max(1e-9);
        (lo - 0.05 * span, hi + 0.05 * span)
    };
    let (x0, x1) = pad(min_x, max_x);
    let (y0, y1) = pad(min_y, max_y);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    for i in 0..n {
        let px = (coords.get(i, 0) - x0) / (x1 - x0) * WIDTH;
        // SVG y axis points down
        let py = HEIGHT - (coords.get(i, 1) - y0) / (y1 - y0) * HEIGHT;
        let color = if labels[i] < 0 {
            NOISE_COLOR
        } else {
            PALETTE[(labels[i] as usize) % PALETTE.len()]
        };
        let _ = writeln!(
            svg,
            r#"<circle cx="{px:.3}" cy="{py:.3}" r="{RADIUS}" fill="{color}"/>"#
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn plot_scatter(coords: &Matrix, labels: &[i64], out: &Path) -> Result<()> {
    let svg = scatter_svg(coords, labels)?;
    std::fs::write(out, svg).map_err(|e| Error::io(out, e))
}
