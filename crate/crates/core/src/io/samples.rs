//! CSV sample files: rows `u,v,value` with an optional `u,v,z` header.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scene::{DepthSample, DepthUnit, GridDims, PixelCoord};

pub fn load_samples(path: &Path, units: DepthUnit, dims: GridDims) -> Result<Vec<DepthSample>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_samples(&text, units, dims).map_err(|e| match e {
        Error::Parse { line, msg, .. } => Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        },
        other => other,
    })
}

fn is_header(fields: &[&str]) -> bool {
    fields.len() == 3
        && fields[0].eq_ignore_ascii_case("u")
        && fields[1].eq_ignore_ascii_case("v")
        && fields[2].parse::<f64>().is_err()
}

/// Parses sample rows; errors carry 1-based line numbers with an empty path.
pub fn parse_samples(text: &str, units: DepthUnit, dims: GridDims) -> Result<Vec<DepthSample>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut first = true;
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if first {
            first = false;
            if is_header(&fields) {
                continue;
            }
        }
        let bad = |msg: String| Error::Parse {
            path: Default::default(),
            line: line_no,
            msg,
        };
        if fields.len() != 3 {
            return Err(bad(format!("expected 3 fields, found {}", fields.len())));
        }
        let u: i64 = fields[0]
            .parse()
            .map_err(|_| bad(format!("bad column index {:?}", fields[0])))?;
        let v: i64 = fields[1]
            .parse()
            .map_err(|_| bad(format!("bad row index {:?}", fields[1])))?;
        let value: f64 = fields[2]
            .parse()
            .map_err(|_| bad(format!("bad value {:?}", fields[2])))?;
        if !dims.contains(u, v) {
            return Err(Error::OutOfBounds {
                u,
                v,
                width: dims.width,
                height: dims.height,
            });
        }
        let (u, v) = (u as usize, v as usize);
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::NonPositive { u, v, value });
        }
        if !seen.insert((u, v)) {
            return Err(Error::DuplicatePixel { u, v });
        }
        out.push(DepthSample {
            pixel: PixelCoord::new(u, v),
            z: units.to_depth(value),
            id: out.len(),
        });
    }
    Ok(out)
}

/// Writes samples as depth, with the standard header.
pub fn write_samples(path: &Path, samples: &[DepthSample]) -> Result<()> {
    let mut text = String::from("u,v,z\n");
    for s in samples {
        // {:?} on f64 is the shortest round-trip representation
        writeln!(text, "{},{},{:?}", s.pixel.u, s.pixel.v, s.z).unwrap();
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
