//! Synthetic piecewise-planar scenes with exact ground truth.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::sampling::stride_sample;
use crate::energy::Plane;
use crate::error::{Error, Result};
use crate::io::{pfm, pgm, samples::write_samples, semprob};
use crate::scene::{DepthSample, EdgeMap, GridDims, PixelCoord, ScalarMap, SemanticMap};

/// A labeled planar region. `polygon: None` claims every pixel no earlier region took.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub name: String,
    pub plane: Plane,
    pub polygon: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub dims: GridDims,
    pub regions: Vec<Region>,
    pub stride: usize,
    pub offset: usize,
    /// Standard deviation of Gaussian inverse-depth noise on samples.
    pub noise: f64,
    /// Fraction of samples displaced as gross outliers (rounded to a count).
    pub outlier_fraction: f64,
    /// Outliers move by a uniform draw from `[m, 2m]` in inverse depth.
    pub outlier_magnitude: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SyntheticScene {
    pub dims: GridDims,
    pub regions: Vec<Region>,
    /// Region index of every pixel.
    pub region_of: Vec<usize>,
    pub gt_inverse_depth: ScalarMap,
    pub edges: EdgeMap,
    pub semantics: SemanticMap,
    pub samples: Vec<DepthSample>,
    /// Ids of displaced samples, ascending.
    pub outlier_ids: Vec<usize>,
}

impl SyntheticScene {
    pub fn gt_depth(&self) -> ScalarMap {
        ScalarMap {
            dims: self.dims,
            data: self.gt_inverse_depth.data.iter().map(|d| 1.0 / d).collect(),
        }
    }

    /// Region of the pixel carrying sample `id`.
    pub fn sample_region(&self, id: usize) -> usize {
        self.region_of[self.dims.index(self.samples[id].pixel)]
    }
}

/// Even-odd test of a point against a closed polygon.
fn inside(polygon: &[(f64, f64)], x: f64, y: f64) -> bool {
    let mut hit = false;
    let mut j = polygon.len() - 1;
    for i in 0..polygon.len() {
        let (xi, yi) = polygon[i];
        let (xj, yj) = polygon[j];
        if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
            hit = !hit;
        }
        j = i;
    }
    hit
}

/// Builds ground truth, aligned edges, one-hot labels and stride samples.
///
/// Pixel centers `(u + 0.5, v + 0.5)` are tested against the polygons in
/// order. Edge score is 1 on pixels with a 4-neighbor in another region.
pub fn make_scene(spec: &SceneSpec) -> Result<SyntheticScene> {
    let dims = spec.dims;
    if spec.regions.is_empty() {
        return Err(Error::Invalid("scene needs at least one region".into()));
    }
    if !(spec.noise >= 0.0)
        || !(0.0..=1.0).contains(&spec.outlier_fraction)
        || !(spec.outlier_magnitude >= 0.0)
    {
        return Err(Error::Invalid(
            "noise, outlier fraction or magnitude out of range".into(),
        ));
    }
    let mut region_of = vec![usize::MAX; dims.len()];
    for (i, slot) in region_of.iter_mut().enumerate() {
        let p = dims.coord(i);
        let (x, y) = (p.u as f64 + 0.5, p.v as f64 + 0.5);
        *slot = spec
            .regions
            .iter()
            .position(|r| {
                r.polygon
                    .as_ref()
                    .is_none_or(|poly| poly.len() >= 3 && inside(poly, x, y))
            })
            .ok_or_else(|| Error::Invalid(format!("pixel ({}, {}) is in no region", p.u, p.v)))?;
    }
    let mut gt = vec![0.0; dims.len()];
    for (i, &r) in region_of.iter().enumerate() {
        let d = spec.regions[r].plane.eval(&dims.normalize_index(i));
        if !(d > 0.0) || !d.is_finite() {
            let p = dims.coord(i);
            return Err(Error::Invalid(format!(
                "plane of region {:?} is not positive at ({}, {})",
                spec.regions[r].name, p.u, p.v
            )));
        }
        gt[i] = d;
    }
    let mut edge = vec![0.0; dims.len()];
    for i in 0..dims.len() {
        let p = dims.coord(i);
        let (u, v) = (p.u as i64, p.v as i64);
        let differs = [(1, 0), (-1, 0), (0, 1), (0, -1)].iter().any(|(du, dv)| {
            dims.contains(u + du, v + dv)
                && region_of[((v + dv) as usize) * dims.width + (u + du) as usize] != region_of[i]
        });
        if differs {
            edge[i] = 1.0;
        }
    }
    let labels = spec.regions.iter().map(|r| r.name.clone()).collect();
    let semantics = SemanticMap::one_hot(dims, labels, &region_of)?;
    let gt_inverse_depth = ScalarMap::new(dims, gt)?;
    let depth = ScalarMap {
        dims,
        data: gt_inverse_depth.data.iter().map(|d| 1.0 / d).collect(),
    };
    let mut samples = stride_sample(&depth, spec.stride, spec.offset)?;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    if spec.noise > 0.0 {
        let normal = Normal::new(0.0, spec.noise).map_err(|e| Error::Invalid(e.to_string()))?;
        for s in &mut samples {
            let inv = 1.0 / s.z + normal.sample(&mut rng);
            s.z = 1.0 / inv.max(1e-9);
        }
    }
    let count = (spec.outlier_fraction * samples.len() as f64).round() as usize;
    let mut outlier_ids = index::sample(&mut rng, samples.len(), count).into_vec();
    outlier_ids.sort_unstable();
    for &k in &outlier_ids {
        let inv = 1.0 / samples[k].z;
        let shift = spec.outlier_magnitude * rng.random_range(1.0..2.0);
        let down = rng.random_bool(0.5) && inv - shift > 0.1 * inv;
        let moved = if down { inv - shift } else { inv + shift };
        samples[k].z = 1.0 / moved;
    }
    Ok(SyntheticScene {
        dims,
        regions: spec.regions.clone(),
        region_of,
        gt_inverse_depth,
        edges: EdgeMap::new(dims, edge)?,
        semantics,
        samples,
        outlier_ids,
    })
}

fn parse_plane(text: &str) -> Option<Plane> {
    let v: Vec<f64> = text
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .ok()?;
    (v.len() == 3).then(|| Plane::new(v[0], v[1], v[2]))
}

fn parse_polygon(text: &str) -> Option<Option<Vec<(f64, f64)>>> {
    if text.trim() == "*" {
        return Some(None);
    }
    let mut pts = Vec::new();
    for pair in text.split_whitespace() {
        let (x, y) = pair.split_once(',')?;
        pts.push((x.parse().ok()?, y.parse().ok()?));
    }
    (pts.len() >= 3).then_some(Some(pts))
}

/// Parses a scene description of `key = value` lines.
///
/// `region = <name> | <a> <b> <c> | <x,y x,y ...>` may repeat; a polygon of
/// `*` takes the remaining pixels. Other keys: `width`, `height`, `stride`,
/// `offset`, `noise`, `outlier_fraction`, `outlier_magnitude`, `seed`.
pub fn parse_scene_spec(text: &str) -> Result<SceneSpec> {
    let mut width = None;
    let mut height = None;
    let mut spec = SceneSpec {
        dims: GridDims {
            width: 1,
            height: 1,
        },
        regions: Vec::new(),
        stride: 16,
        offset: 0,
        noise: 0.0,
        outlier_fraction: 0.0,
        outlier_magnitude: 0.1,
        seed: 0,
    };
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| Error::Parse {
            path: Default::default(),
            line: k + 1,
            msg: msg.to_string(),
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad("expected 'key = value'"))?;
        let (key, value) = (key.trim(), value.trim());
        fn num<T: std::str::FromStr>(v: &str) -> Option<T> {
            v.parse().ok()
        }
        match key {
            "width" => width = Some(num(value).ok_or_else(|| bad("bad width"))?),
            "height" => height = Some(num(value).ok_or_else(|| bad("bad height"))?),
            "stride" => spec.stride = num(value).ok_or_else(|| bad("bad stride"))?,
            "offset" => spec.offset = num(value).ok_or_else(|| bad("bad offset"))?,
            "noise" => spec.noise = num(value).ok_or_else(|| bad("bad noise"))?,
            "outlier_fraction" => {
                spec.outlier_fraction = num(value).ok_or_else(|| bad("bad outlier_fraction"))?
            }
            "outlier_magnitude" => {
                spec.outlier_magnitude = num(value).ok_or_else(|| bad("bad outlier_magnitude"))?
            }
            "seed" => spec.seed = num(value).ok_or_else(|| bad("bad seed"))?,
            "region" => {
                let parts: Vec<&str> = value.split('|').map(str::trim).collect();
                if parts.len() != 3 || parts[0].is_empty() || parts[0].contains(char::is_whitespace)
                {
                    return Err(bad(
                        "expected 'region = <name> | <a> <b> <c> | <polygon or *>'",
                    ));
                }
                spec.regions.push(Region {
                    name: parts[0].to_string(),
                    plane: parse_plane(parts[1]).ok_or_else(|| bad("bad plane"))?,
                    polygon: parse_polygon(parts[2]).ok_or_else(|| bad("bad polygon"))?,
                });
            }
            other => return Err(bad(&format!("unknown key {other:?}"))),
        }
    }
    let width = width.ok_or_else(|| Error::config("width", "missing"))?;
    let height = height.ok_or_else(|| Error::config("height", "missing"))?;
    spec.dims = GridDims::new(width, height)?;
    Ok(spec)
}

pub const SCENE_SAMPLES: &str = "samples.csv";
pub const SCENE_EDGES: &str = "edges.pfm";
pub const SCENE_SEMANTICS: &str = "semantics.bin";
pub const SCENE_GT: &str = "gt_inverse_depth.pfm";
pub const SCENE_MASK: &str = "gt_mask.pgm";
pub const SCENE_REGIONS: &str = "regions.pgm";
pub const SCENE_OUTLIERS: &str = "outliers.csv";
pub const SCENE_CONFIG: &str = "config.toml";

/// Writes the scene files plus a `config.toml` pointing the upsampler at them.
pub fn write_scene(scene: &SyntheticScene, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let (w, h) = (scene.dims.width, scene.dims.height);
    write_samples(&dir.join(SCENE_SAMPLES), &scene.samples)?;
    let edges: Vec<f32> = scene.edges.scores().iter().map(|v| *v as f32).collect();
    pfm::write(&dir.join(SCENE_EDGES), w, h, &edges)?;
    semprob::write(&dir.join(SCENE_SEMANTICS), &scene.semantics)?;
    let gt: Vec<f32> = scene
        .gt_inverse_depth
        .data
        .iter()
        .map(|v| *v as f32)
        .collect();
    pfm::write(&dir.join(SCENE_GT), w, h, &gt)?;
    pgm::write(&dir.join(SCENE_MASK), w, h, &vec![255; scene.dims.len()])?;
    let regions: Vec<u8> = scene.region_of.iter().map(|r| (r % 256) as u8).collect();
    pgm::write(&dir.join(SCENE_REGIONS), w, h, &regions)?;
    let mut ids = String::from("id,u,v\n");
    for &k in &scene.outlier_ids {
        let p: PixelCoord = scene.samples[k].pixel;
        writeln!(ids, "{k},{},{}", p.u, p.v).unwrap();
    }
    let path = dir.join(SCENE_OUTLIERS);
    fs::write(&path, ids).map_err(|e| Error::io(&path, e))?;
    let config = format!(
        "width = {w}\nheight = {h}\nsamples = \"{SCENE_SAMPLES}\"\nedges = \"{SCENE_EDGES}\"\nsemantics = \"{SCENE_SEMANTICS}\"\ngt = \"{SCENE_GT}\"\nmask = \"{SCENE_MASK}\"\nsample_units = \"depth\"\nmetric_unit = \"inverse-depth\"\n"
    );
    let path = dir.join(SCENE_CONFIG);
    fs::write(&path, config).map_err(|e| Error::io(&path, e))
}
