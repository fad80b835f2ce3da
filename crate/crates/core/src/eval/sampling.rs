use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::scene::{DepthSample, PixelCoord, ScalarMap};

/// Samples `depth` on the lattice `u, v = offset (mod stride)`, skipping non-finite or non-positive pixels.
pub fn stride_sample(depth: &ScalarMap, stride: usize, offset: usize) -> Result<Vec<DepthSample>> {
    if stride == 0 {
        return Err(Error::config("stride", "must be >= 1"));
    }
    if offset >= stride {
        return Err(Error::config("offset", "must be smaller than stride"));
    }
    let dims = depth.dims;
    let mut out = Vec::new();
    for v in (offset..dims.height).step_by(stride) {
        for u in (offset..dims.width).step_by(stride) {
            let p = PixelCoord::new(u, v);
            let z = depth.at(p);
            if z.is_finite() && z > 0.0 {
                out.push(DepthSample {
                    pixel: p,
                    z,
                    id: out.len(),
                });
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Invalid(
            "no valid pixel on the sampling lattice".into(),
        ));
    }
    Ok(out)
}

/// Keeps every `keep_rows`-th distinct row and every `keep_cols`-th distinct column of the kept rows.
///
/// Ranks count distinct coordinate values present in the input, smallest first.
/// Surviving samples are renumbered in input order.
pub fn decimate_scanlines(
    samples: &[DepthSample],
    keep_rows: usize,
    keep_cols: usize,
) -> Result<Vec<DepthSample>> {
    if keep_rows == 0 {
        return Err(Error::config("keep_rows", "must be >= 1"));
    }
    if keep_cols == 0 {
        return Err(Error::config("keep_cols", "must be >= 1"));
    }
    let rows: Vec<usize> = samples
        .iter()
        .map(|s| s.pixel.v)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let kept_rows: BTreeSet<usize> = rows.iter().copied().step_by(keep_rows).collect();
    let cols: Vec<usize> = samples
        .iter()
        .filter(|s| kept_rows.contains(&s.pixel.v))
        .map(|s| s.pixel.u)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let kept_cols: BTreeSet<usize> = cols.iter().copied().step_by(keep_cols).collect();
    Ok(samples
        .iter()
        .filter(|s| kept_rows.contains(&s.pixel.v) && kept_cols.contains(&s.pixel.u))
        .enumerate()
        .map(|(id, s)| DepthSample { id, ..*s })
        .collect())
}
