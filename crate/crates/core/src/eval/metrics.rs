use serde::Serialize;

use crate::error::{Error, Result};
use crate::scene::{DenseDepthMap, DepthUnit, ScalarMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub mae: f64,
    pub rmse: f64,
    pub unit: DepthUnit,
    pub n_pixels: usize,
}

/// Mean absolute and root-mean-square error over masked-in pixels with a valid prediction.
///
/// `gt` must already be in `unit`; the prediction is converted from inverse depth.
pub fn mae(
    pred: &DenseDepthMap,
    gt: &ScalarMap,
    mask: &[bool],
    unit: DepthUnit,
) -> Result<Metrics> {
    if pred.dims != gt.dims {
        return Err(Error::DimensionMismatch {
            expected: (gt.dims.width, gt.dims.height),
            found: (pred.dims.width, pred.dims.height),
        });
    }
    if mask.len() != gt.dims.len() {
        return Err(Error::Invalid(format!(
            "mask has {} entries, grid needs {}",
            mask.len(),
            gt.dims.len()
        )));
    }
    let (mut abs, mut sq, mut n) = (0.0, 0.0, 0usize);
    for i in 0..mask.len() {
        if !mask[i] || !pred.valid[i] || !gt.data[i].is_finite() {
            continue;
        }
        let e = unit.from_inverse_depth(pred.inverse_depth[i]) - gt.data[i];
        abs += e.abs();
        sq += e * e;
        n += 1;
    }
    if n == 0 {
        return Err(Error::EmptyEvaluation);
    }
    Ok(Metrics {
        mae: abs / n as f64,
        rmse: (sq / n as f64).sqrt(),
        unit,
        n_pixels: n,
    })
}
