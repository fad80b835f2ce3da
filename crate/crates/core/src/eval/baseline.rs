//! Reference interpolators: nearest sample and bilinear on a stride lattice.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scene::{DenseDepthMap, DepthSample, GridDims};

/// Each pixel copies the depth of its Euclidean-nearest sample; ties go to the lower id.
///
/// Samples are binned into square buckets and searched ring by ring until
/// no unvisited ring can hold a closer sample.
pub fn baseline_nearest(samples: &[DepthSample], dims: GridDims) -> Result<DenseDepthMap> {
    if samples.is_empty() {
        return Err(Error::EmptySeeds);
    }
    let area = dims.len() as f64 / samples.len() as f64;
    let bucket = (area.sqrt().ceil() as usize).max(1);
    let bw = dims.width.div_ceil(bucket);
    let bh = dims.height.div_ceil(bucket);
    let mut bins: Vec<Vec<usize>> = vec![Vec::new(); bw * bh];
    for (k, s) in samples.iter().enumerate() {
        bins[(s.pixel.v / bucket) * bw + s.pixel.u / bucket].push(k);
    }
    let mut inverse_depth = vec![0.0; dims.len()];
    for v in 0..dims.height {
        for u in 0..dims.width {
            let (bu, bv) = ((u / bucket) as i64, (v / bucket) as i64);
            let mut best: Option<(usize, usize)> = None;
            let mut ring = 0i64;
            loop {
                for ju in bu - ring..=bu + ring {
                    for jv in bv - ring..=bv + ring {
                        let on_ring = (ju - bu).abs() == ring || (jv - bv).abs() == ring;
                        if !on_ring || ju < 0 || jv < 0 || ju >= bw as i64 || jv >= bh as i64 {
                            continue;
                        }
                        for &k in &bins[jv as usize * bw + ju as usize] {
                            let p = samples[k].pixel;
                            let du = p.u.abs_diff(u);
                            let dv = p.v.abs_diff(v);
                            let d2 = du * du + dv * dv;
                            let better = match best {
                                None => true,
                                Some((bd, bk)) => {
                                    d2 < bd || (d2 == bd && samples[k].id < samples[bk].id)
                                }
                            };
                            if better {
                                best = Some((d2, k));
                            }
                        }
                    }
                }
                // every bucket beyond this ring is at least ring * bucket + 1 pixels away
                let reach = (ring as usize * bucket + 1).pow(2);
                let exhausted = ring as usize > bw.max(bh);
                if exhausted || best.is_some_and(|(bd, _)| bd < reach) {
                    break;
                }
                ring += 1;
            }
            let (_, k) = best.expect("at least one sample");
            inverse_depth[v * dims.width + u] = 1.0 / samples[k].z;
        }
    }
    DenseDepthMap::all_valid(dims, inverse_depth)
}

/// Bilinear interpolation of depth between lattice samples.
///
/// The lattice is `offset + k * stride` on both axes, with `offset` taken
/// from the smallest sampled coordinate; every lattice node inside the grid
/// must carry a sample. Pixels outside the lattice hull are clamped onto it.
pub fn baseline_bilinear(
    samples: &[DepthSample],
    dims: GridDims,
    stride: usize,
) -> Result<DenseDepthMap> {
    if stride == 0 {
        return Err(Error::config("stride", "must be >= 1"));
    }
    if samples.is_empty() {
        return Err(Error::EmptySeeds);
    }
    let off_u = samples.iter().map(|s| s.pixel.u).min().unwrap();
    let off_v = samples.iter().map(|s| s.pixel.v).min().unwrap();
    let nu = (dims.width - off_u - 1) / stride + 1;
    let nv = (dims.height - off_v - 1) / stride + 1;
    let by_pixel: HashMap<(usize, usize), f64> = samples
        .iter()
        .map(|s| ((s.pixel.u, s.pixel.v), s.z))
        .collect();
    let mut node = vec![0.0; nu * nv];
    for j in 0..nv {
        for i in 0..nu {
            let (u, v) = (off_u + i * stride, off_v + j * stride);
            node[j * nu + i] = *by_pixel
                .get(&(u, v))
                .ok_or(Error::IncompleteLattice { u, v })?;
        }
    }
    // lattice index and fractional weight along one axis, clamped to the hull
    let axis = |x: usize, off: usize, count: usize| -> (usize, usize, f64) {
        if x <= off || count == 1 {
            return (0, 0, 0.0);
        }
        let t = (x - off) as f64 / stride as f64;
        let lo = ((x - off) / stride).min(count - 1);
        if lo == count - 1 {
            return (lo, lo, 0.0);
        }
        (lo, lo + 1, t - lo as f64)
    };
    let mut inverse_depth = vec![0.0; dims.len()];
    for v in 0..dims.height {
        let (j0, j1, fv) = axis(v, off_v, nv);
        for u in 0..dims.width {
            let (i0, i1, fu) = axis(u, off_u, nu);
            let top = node[j0 * nu + i0] * (1.0 - fu) + node[j0 * nu + i1] * fu;
            let bottom = node[j1 * nu + i0] * (1.0 - fu) + node[j1 * nu + i1] * fu;
            let z = top * (1.0 - fv) + bottom * fv;
            inverse_depth[v * dims.width + u] = 1.0 / z;
        }
    }
    DenseDepthMap::all_valid(dims, inverse_depth)
}
