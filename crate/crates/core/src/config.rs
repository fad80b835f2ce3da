//! Run configuration: `key = value` TOML text, overridable from the command line.
//!
//! Precedence is command-line overrides, then the file, then the defaults below.
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `width`, `height` | from inputs | grid size |
//! | `samples`, `edges`, `semantics`, `image`, `gt`, `mask` | unset | input paths, relative to the config file |
//! | `out_dir` | `out` | output directory |
//! | `sample_units` | `depth` | `depth` or `inverse-depth` (use the latter for disparity) |
//! | `metric_unit` | `inverse-depth` | `depth`, `inverse-depth` or `disparity` |
//! | `w_i`, `w_s`, `w_d` | 20, 20, 1 | geodesic edge, label and length weights |
//! | `n_neighbors`, `d_max`, `epsilon` | 10, 1.0, 1e-3 | cell graph pruning and weighting |
//! | `w_una`, `w_c`, `lambda_c` | see [`EnergyParams`] | energy weights |
//! | `outlier_prior`, `outlier_tau`, `outlier_scale` | 0.1, 0.01, 0.002 | outlier model |
//! | `max_iters`, `tol_energy`, `schedule`, `tikhonov` | 50, 1e-7, `gauss-seidel`, 1e-9 | solver |
//! | `ground_labels` | `[]` | labels initialized as ground |
//! | `z_max` | 1e4 | depth cap for rendering |
//! | `trace` | true | write `energy_trace.csv` |
//! | `debug` | false | write `voronoi.pgm` and `celldist.csv` |

use std::fs;
use std::path::{Path, PathBuf};

use crate::energy::EnergyParams;
use crate::error::{Error, Result};
use crate::geodesic::{CellGraphParams, GeodesicWeights};
use crate::scene::DepthUnit;
use crate::solver::{Schedule, SolverConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub width: Option<usize>,
    pub height: Option<usize>,
    pub samples: Option<PathBuf>,
    pub edges: Option<PathBuf>,
    pub semantics: Option<PathBuf>,
    pub image: Option<PathBuf>,
    pub gt: Option<PathBuf>,
    pub mask: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub geodesic: GeodesicWeights,
    pub graph: CellGraphParams,
    pub energy: EnergyParams,
    pub solver: SolverConfig,
    pub sample_units: DepthUnit,
    pub metric_unit: DepthUnit,
    pub trace: bool,
    pub debug: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            width: None,
            height: None,
            samples: None,
            edges: None,
            semantics: None,
            image: None,
            gt: None,
            mask: None,
            out_dir: PathBuf::from("out"),
            geodesic: GeodesicWeights::default(),
            graph: CellGraphParams::default(),
            energy: EnergyParams::default(),
            solver: SolverConfig::default(),
            sample_units: DepthUnit::Depth,
            metric_unit: DepthUnit::InverseDepth,
            trace: true,
            debug: false,
        }
    }
}

fn type_error(key: &str, want: &str, got: &toml::Value) -> Error {
    Error::config(key, format!("expected {want}, found {}", got.type_str()))
}

fn as_f64(key: &str, v: &toml::Value) -> Result<f64> {
    match v {
        toml::Value::Float(f) => Ok(*f),
        toml::Value::Integer(i) => Ok(*i as f64),
        other => Err(type_error(key, "a number", other)),
    }
}

fn as_usize(key: &str, v: &toml::Value) -> Result<usize> {
    match v {
        toml::Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        toml::Value::Integer(_) => Err(Error::config(key, "must be >= 0")),
        other => Err(type_error(key, "an integer", other)),
    }
}

fn as_str<'a>(key: &str, v: &'a toml::Value) -> Result<&'a str> {
    v.as_str().ok_or_else(|| type_error(key, "a string", v))
}

fn as_bool(key: &str, v: &toml::Value) -> Result<bool> {
    v.as_bool().ok_or_else(|| type_error(key, "a boolean", v))
}

fn as_unit(key: &str, v: &toml::Value) -> Result<DepthUnit> {
    let s = as_str(key, v)?;
    DepthUnit::parse(s).ok_or_else(|| Error::config(key, format!("unknown unit {s:?}")))
}

/// Parses an override value as TOML, falling back to a bare string.
fn parse_value(raw: &str) -> toml::Value {
    let raw = raw.trim();
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

impl RunConfig {
    /// Reads a config file; relative paths inside resolve against its directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::from_toml_str(&text, base).map_err(|e| match e {
            Error::Parse { line, msg, .. } => Error::Parse {
                path: path.to_path_buf(),
                line,
                msg,
            },
            other => other,
        })
    }

    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse {
            path: PathBuf::new(),
            line: e
                .span()
                .map(|s| text[..s.start].matches('\n').count() + 1)
                .unwrap_or(0),
            msg: e.message().to_string(),
        })?;
        let mut cfg = Self::default();
        for (key, value) in &table {
            cfg.set(key, value, base_dir)?;
        }
        Ok(cfg)
    }

    /// Applies `key=value` overrides; path values resolve against the working directory.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for item in overrides {
            let item = item.as_ref();
            let (key, raw) = item
                .split_once('=')
                .ok_or_else(|| Error::config(item, "override must look like key=value"))?;
            self.set(key.trim(), &parse_value(raw), Path::new(""))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, v: &toml::Value, base: &Path) -> Result<()> {
        let path = |v: &toml::Value| -> Result<PathBuf> { Ok(base.join(as_str(key, v)?)) };
        match key {
            "width" => self.width = Some(as_usize(key, v)?),
            "height" => self.height = Some(as_usize(key, v)?),
            "samples" => self.samples = Some(path(v)?),
            "edges" => self.edges = Some(path(v)?),
            "semantics" => self.semantics = Some(path(v)?),
            "image" => self.image = Some(path(v)?),
            "gt" => self.gt = Some(path(v)?),
            "mask" => self.mask = Some(path(v)?),
            "out_dir" => self.out_dir = path(v)?,
            "sample_units" => self.sample_units = as_unit(key, v)?,
            "metric_unit" => self.metric_unit = as_unit(key, v)?,
            "w_i" => self.geodesic.w_i = as_f64(key, v)?,
            "w_s" => self.geodesic.w_s = as_f64(key, v)?,
            "w_d" => self.geodesic.w_d = as_f64(key, v)?,
            "n_neighbors" => self.graph.max_neighbors = as_usize(key, v)?,
            "d_max" => self.graph.d_max = as_f64(key, v)?,
            "epsilon" => self.graph.epsilon = as_f64(key, v)?,
            "w_una" => self.energy.w_una = as_f64(key, v)?,
            "w_c" => self.energy.w_c = as_f64(key, v)?,
            "lambda_c" => self.energy.lambda_c = as_f64(key, v)?,
            "outlier_prior" => self.energy.outlier.prior = as_f64(key, v)?,
            "outlier_tau" => self.energy.outlier.tau = as_f64(key, v)?,
            "outlier_scale" => self.energy.outlier.scale = as_f64(key, v)?,
            "max_iters" => self.solver.max_iters = as_usize(key, v)?,
            "tol_energy" => self.solver.tol_energy = as_f64(key, v)?,
            "tikhonov" => self.solver.tikhonov = as_f64(key, v)?,
            "z_max" => self.solver.z_max = as_f64(key, v)?,
            "schedule" => {
                let s = as_str(key, v)?;
                self.solver.schedule = Schedule::parse(s)
                    .ok_or_else(|| Error::config(key, format!("unknown schedule {s:?}")))?;
            }
            "ground_labels" => {
                self.solver.ground_labels = match v {
                    toml::Value::Array(items) => items
                        .iter()
                        .map(|i| as_str(key, i).map(str::to_owned))
                        .collect::<Result<_>>()?,
                    toml::Value::String(s) => s
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(str::to_owned)
                        .collect(),
                    other => return Err(type_error(key, "an array of strings", other)),
                }
            }
            "trace" => self.trace = as_bool(key, v)?,
            "debug" => self.debug = as_bool(key, v)?,
            other => return Err(Error::config(other, "unknown key")),
        }
        Ok(())
    }

    /// Checks every numeric constraint; errors name the offending key.
    pub fn validate(&self) -> Result<()> {
        if self.width == Some(0) {
            return Err(Error::config("width", "must be >= 1"));
        }
        if self.height == Some(0) {
            return Err(Error::config("height", "must be >= 1"));
        }
        if self.sample_units == DepthUnit::Disparity {
            return Err(Error::config(
                "sample_units",
                "use inverse-depth for disparity samples",
            ));
        }
        self.geodesic.validate()?;
        self.graph.validate()?;
        self.energy.validate()?;
        self.solver.validate()
    }

    /// Checks that every configured input file exists.
    pub fn check_inputs(&self) -> Result<()> {
        let named = [
            ("samples", &self.samples),
            ("edges", &self.edges),
            ("semantics", &self.semantics),
            ("image", &self.image),
            ("gt", &self.gt),
            ("mask", &self.mask),
        ];
        for (key, path) in named {
            if let Some(p) = path {
                if !p.is_file() {
                    return Err(Error::config(
                        key,
                        format!("file {} does not exist", p.display()),
                    ));
                }
            }
        }
        Ok(())
    }
}
