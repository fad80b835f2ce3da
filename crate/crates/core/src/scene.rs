//! Domain types shared by every stage of the pipeline.

use crate::error::{Error, Result};

/// Size of the pixel grid every per-pixel map lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridDims {
    pub width: usize,
    pub height: usize,
}

impl GridDims {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Invalid(format!(
                "grid must be at least 1x1, got {width}x{height}"
            )));
        }
        Ok(Self { width, height })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.width * self.height
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, p: PixelCoord) -> usize {
        p.v * self.width + p.u
    }

    #[inline]
    pub fn coord(&self, index: usize) -> PixelCoord {
        PixelCoord {
            u: index % self.width,
            v: index / self.width,
        }
    }

    #[inline]
    pub fn contains(&self, u: i64, v: i64) -> bool {
        u >= 0 && v >= 0 && (u as usize) < self.width && (v as usize) < self.height
    }

    /// Maps a pixel into the shared plane frame: centered, scaled by the longer side.
    #[inline]
    pub fn normalize(&self, p: PixelCoord) -> NormalizedCoord {
        let scale = self.width.max(self.height) as f64;
        NormalizedCoord {
            u: (p.u as f64 - self.width as f64 / 2.0) / scale,
            v: (p.v as f64 - self.height as f64 / 2.0) / scale,
        }
    }

    #[inline]
    pub fn normalize_index(&self, index: usize) -> NormalizedCoord {
        self.normalize(self.coord(index))
    }

    /// Errors unless this grid is `width` x `height`.
    pub fn check(&self, width: usize, height: usize) -> Result<()> {
        if self.width != width || self.height != height {
            return Err(Error::DimensionMismatch {
                expected: (self.width, self.height),
                found: (width, height),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PixelCoord {
    pub u: usize,
    pub v: usize,
}

impl PixelCoord {
    pub fn new(u: usize, v: usize) -> Self {
        Self { u, v }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedCoord {
    pub u: f64,
    pub v: f64,
}

impl NormalizedCoord {
    /// Homogeneous vector `(u', v', 1)`.
    #[inline]
    pub fn homogeneous(&self) -> [f64; 3] {
        [self.u, self.v, 1.0]
    }
}

/// One sparse measurement. `z` is always depth, never inverse depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthSample {
    pub pixel: PixelCoord,
    pub z: f64,
    pub id: usize,
}

impl DepthSample {
    #[inline]
    pub fn inverse_depth(&self) -> f64 {
        1.0 / self.z
    }
}

/// Unit of a scalar value on disk or in a metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DepthUnit {
    Depth,
    InverseDepth,
    /// Numerically identical to inverse depth: disparity inputs are loaded as inverse depth.
    Disparity,
}

impl DepthUnit {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "depth" => Some(Self::Depth),
            "inverse-depth" | "inverse_depth" => Some(Self::InverseDepth),
            "disparity" => Some(Self::Disparity),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Depth => "depth",
            Self::InverseDepth => "inverse-depth",
            Self::Disparity => "disparity",
        }
    }

    /// Converts an inverse-depth value into this unit.
    #[inline]
    pub fn from_inverse_depth(&self, inv: f64) -> f64 {
        match self {
            Self::Depth => 1.0 / inv,
            Self::InverseDepth | Self::Disparity => inv,
        }
    }

    /// Converts a value in this unit into depth.
    #[inline]
    pub fn to_depth(&self, value: f64) -> f64 {
        match self {
            Self::Depth => value,
            Self::InverseDepth | Self::Disparity => 1.0 / value,
        }
    }
}

/// Row-major scalar image.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarMap {
    pub dims: GridDims,
    pub data: Vec<f64>,
}

impl ScalarMap {
    pub fn new(dims: GridDims, data: Vec<f64>) -> Result<Self> {
        if data.len() != dims.len() {
            return Err(Error::Invalid(format!(
                "map has {} values, grid needs {}",
                data.len(),
                dims.len()
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn filled(dims: GridDims, value: f64) -> Self {
        Self {
            dims,
            data: vec![value; dims.len()],
        }
    }

    #[inline]
    pub fn at(&self, p: PixelCoord) -> f64 {
        self.data[self.dims.index(p)]
    }
}

/// Per-pixel edge scores in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMap(ScalarMap);

impl EdgeMap {
    pub fn new(dims: GridDims, scores: Vec<f64>) -> Result<Self> {
        if let Some(bad) = scores.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return Err(Error::Invalid(format!("edge score {bad} outside [0, 1]")));
        }
        Ok(Self(ScalarMap::new(dims, scores)?))
    }

    pub fn zeros(dims: GridDims) -> Self {
        Self(ScalarMap::filled(dims, 0.0))
    }

    pub fn dims(&self) -> GridDims {
        self.0.dims
    }

    pub fn scores(&self) -> &[f64] {
        &self.0.data
    }

    #[inline]
    pub fn score(&self, index: usize) -> f64 {
        self.0.data[index]
    }
}

/// Per-pixel label distributions, stored pixel-major (`L` values per pixel).
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticMap {
    dims: GridDims,
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl SemanticMap {
    /// Builds a map from raw non-negative scores, renormalizing each pixel.
    /// Pixels whose scores sum to zero become uniform.
    pub fn from_scores(dims: GridDims, labels: Vec<String>, mut scores: Vec<f64>) -> Result<Self> {
        let l = labels.len();
        if l == 0 {
            return Err(Error::Invalid(
                "semantic map needs at least one label".into(),
            ));
        }
        if scores.len() != dims.len() * l {
            return Err(Error::Invalid(format!(
                "semantic map has {} scores, expected {}",
                scores.len(),
                dims.len() * l
            )));
        }
        if let Some(bad) = scores.iter().find(|s| !(**s >= 0.0) || !s.is_finite()) {
            return Err(Error::Invalid(format!("invalid semantic score {bad}")));
        }
        for px in scores.chunks_exact_mut(l) {
            let sum: f64 = px.iter().sum();
            if sum > 0.0 {
                px.iter_mut().for_each(|s| *s /= sum);
            } else {
                px.iter_mut().for_each(|s| *s = 1.0 / l as f64);
            }
        }
        Ok(Self {
            dims,
            labels,
            probs: scores,
        })
    }

    /// One-hot map from per-pixel label indices.
    pub fn one_hot(dims: GridDims, labels: Vec<String>, label_of: &[usize]) -> Result<Self> {
        let l = labels.len();
        let mut scores = vec![0.0; dims.len() * l];
        for (i, &k) in label_of.iter().enumerate() {
            if k >= l {
                return Err(Error::Invalid(format!("label index {k} out of range")));
            }
            scores[i * l + k] = 1.0;
        }
        Self::from_scores(dims, labels, scores)
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn probs(&self, index: usize) -> &[f64] {
        let l = self.labels.len();
        &self.probs[index * l..(index + 1) * l]
    }

    /// Index of the most probable label; ties resolve to the lower index.
    pub fn argmax(&self, index: usize) -> usize {
        let mut best = 0;
        let p = self.probs(index);
        for (k, &v) in p.iter().enumerate().skip(1) {
            if v > p[best] {
                best = k;
            }
        }
        best
    }
}

/// Dense inverse-depth estimate with a validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseDepthMap {
    pub dims: GridDims,
    pub inverse_depth: Vec<f64>,
    pub valid: Vec<bool>,
}

impl DenseDepthMap {
    pub fn new(dims: GridDims, inverse_depth: Vec<f64>, valid: Vec<bool>) -> Result<Self> {
        if inverse_depth.len() != dims.len() || valid.len() != dims.len() {
            return Err(Error::Invalid("dense map size does not match grid".into()));
        }
        Ok(Self {
            dims,
            inverse_depth,
            valid,
        })
    }

    /// Every pixel valid, values taken as given.
    pub fn all_valid(dims: GridDims, inverse_depth: Vec<f64>) -> Result<Self> {
        Self::new(dims, inverse_depth, vec![true; dims.len()])
    }

    /// Range of inverse depth over valid pixels, `None` if nothing is valid.
    pub fn valid_range(&self) -> Option<(f64, f64)> {
        self.inverse_depth
            .iter()
            .zip(&self.valid)
            .filter(|(_, v)| **v)
            .fold(None, |acc, (&d, _)| match acc {
                None => Some((d, d)),
                Some((lo, hi)) => Some((lo.min(d), hi.max(d))),
            })
    }
}
