//! Edge-score inputs: precomputed maps and an image-gradient fallback.

use std::fs;
use std::path::Path;

use super::pgm::GrayImage;
use super::{pfm, pgm, raster};
use crate::error::{Error, Result};
use crate::scene::{EdgeMap, GridDims};

/// Loads a PFM (clamped to `[0, 1]`) or 8-bit PGM (scaled by its maxval) edge map.
pub fn load_edge_map(path: &Path, dims: GridDims) -> Result<EdgeMap> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let format_err = |(offset, msg)| Error::Format {
        path: path.to_path_buf(),
        offset,
        msg,
    };
    let scores: Vec<f64> = if bytes.starts_with(b"Pf") || bytes.starts_with(b"PF") {
        let img = pfm::decode(&bytes).map_err(format_err)?;
        dims.check(img.width, img.height)?;
        img.data
            .iter()
            .map(|v| {
                if v.is_nan() {
                    0.0
                } else {
                    (*v as f64).clamp(0.0, 1.0)
                }
            })
            .collect()
    } else {
        let img = pgm::decode(&bytes).map_err(format_err)?;
        dims.check(img.width, img.height)?;
        let max = img.maxval as f64;
        img.data.iter().map(|v| *v as f64 / max).collect()
    };
    EdgeMap::new(dims, scores)
}

/// Gradient-magnitude edges from an 8-bit grayscale PGM or PNG.
pub fn fallback_edges_from_file(path: &Path, dims: GridDims) -> Result<EdgeMap> {
    let img = raster::read_gray8(path)?;
    dims.check(img.width, img.height)?;
    fallback_edges(&img)
}

/// Central-difference gradient magnitude normalized by its 99th percentile.
///
/// A derivative component is zero wherever one of its two neighbors falls off
/// the grid. When the 99th percentile is zero the maximum is used instead.
pub fn fallback_edges(img: &GrayImage) -> Result<EdgeMap> {
    let dims = GridDims::new(img.width, img.height)?;
    let (w, h) = (img.width, img.height);
    let at = |u: usize, v: usize| img.data[v * w + u] as f64;
    let mut mag = vec![0.0f64; w * h];
    for v in 0..h {
        for u in 0..w {
            let gx = if u > 0 && u + 1 < w {
                (at(u + 1, v) - at(u - 1, v)) / 2.0
            } else {
                0.0
            };
            let gy = if v > 0 && v + 1 < h {
                (at(u, v + 1) - at(u, v - 1)) / 2.0
            } else {
                0.0
            };
            mag[v * w + u] = gx.hypot(gy);
        }
    }
    let mut sorted = mag.clone();
    sorted.sort_by(f64::total_cmp);
    let rank = ((0.99 * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    let mut norm = sorted[rank];
    if norm <= 0.0 {
        norm = *sorted.last().unwrap();
    }
    let scores = if norm > 0.0 {
        mag.iter().map(|m| (m / norm).clamp(0.0, 1.0)).collect()
    } else {
        vec![0.0; w * h]
    };
    EdgeMap::new(dims, scores)
}
