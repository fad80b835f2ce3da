use std::fs;
use std::path::Path;

use serde::Serialize;

use super::{pfm, pgm, raster};
use crate::error::{Error, Result};
use crate::scene::DenseDepthMap;

pub const INVERSE_DEPTH_FILE: &str = "inverse_depth.pfm";
pub const VIS_FILE: &str = "depth_vis.png";
pub const VALIDITY_FILE: &str = "validity.pgm";
pub const META_FILE: &str = "meta.json";

#[derive(Debug, Serialize)]
struct Meta<'a, S: Serialize> {
    width: usize,
    height: usize,
    unit: &'static str,
    d_min: Option<f64>,
    d_max: Option<f64>,
    valid_pixels: usize,
    solver: &'a S,
}

/// Visualization levels: valid pixels spread over `[0, 65535]`, invalid pixels 0.
/// A degenerate range maps every valid pixel to 65535.
pub fn visualization(map: &DenseDepthMap) -> Vec<u16> {
    let range = map.valid_range();
    map.inverse_depth
        .iter()
        .zip(&map.valid)
        .map(|(&d, &ok)| match (ok, range) {
            (false, _) | (_, None) => 0,
            (true, Some((lo, hi))) if hi > lo => {
                (65535.0 * (d - lo) / (hi - lo)).round().clamp(0.0, 65535.0) as u16
            }
            (true, Some(_)) => 65535,
        })
        .collect()
}

/// Writes the inverse-depth PFM, 16-bit visualization, validity mask and metadata.
pub fn write_outputs<S: Serialize>(map: &DenseDepthMap, out_dir: &Path, solver: &S) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let (w, h) = (map.dims.width, map.dims.height);
    let data: Vec<f32> = map.inverse_depth.iter().map(|v| *v as f32).collect();
    pfm::write(&out_dir.join(INVERSE_DEPTH_FILE), w, h, &data)?;
    raster::write_png_gray16(&out_dir.join(VIS_FILE), w, h, &visualization(map))?;
    let mask: Vec<u8> = map.valid.iter().map(|v| if *v { 255 } else { 0 }).collect();
    pgm::write(&out_dir.join(VALIDITY_FILE), w, h, &mask)?;
    let range = map.valid_range();
    let meta = Meta {
        width: w,
        height: h,
        unit: "inverse-depth",
        d_min: range.map(|r| r.0),
        d_max: range.map(|r| r.1),
        valid_pixels: map.valid.iter().filter(|v| **v).count(),
        solver,
    };
    let path = out_dir.join(META_FILE);
    let json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    fs::write(&path, json).map_err(|e| Error::io(&path, e))
}
