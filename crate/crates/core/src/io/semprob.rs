//! SEMPROB label-probability stacks.
//!
//! Layout: `SEMPROB <W> <H> <L>\n`, a line of `L` label names, then `W*H*L`
//! little-endian f32 values, label-major, each plane row-major top-down.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scene::{GridDims, SemanticMap};

pub fn encode(map: &SemanticMap) -> Vec<u8> {
    let dims = map.dims();
    let l = map.num_labels();
    let mut out = format!(
        "SEMPROB {} {} {}\n{}\n",
        dims.width,
        dims.height,
        l,
        map.labels().join(" ")
    )
    .into_bytes();
    out.reserve(dims.len() * l * 4);
    for k in 0..l {
        for i in 0..dims.len() {
            out.extend_from_slice(&(map.probs(i)[k] as f32).to_le_bytes());
        }
    }
    out
}

pub fn write(path: &Path, map: &SemanticMap) -> Result<()> {
    fs::write(path, encode(map)).map_err(|e| Error::io(path, e))
}

pub fn load_semantic_map(path: &Path) -> Result<SemanticMap> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes).map_err(|(offset, msg)| Error::Format {
        path: path.to_path_buf(),
        offset,
        msg,
    })
}

fn line(bytes: &[u8], start: usize) -> std::result::Result<(&str, usize), (usize, String)> {
    let end = bytes[start..]
        .iter()
        .position(|b| *b == b'\n')
        .map(|p| start + p)
        .ok_or((start, "unterminated header line".to_string()))?;
    let text = std::str::from_utf8(&bytes[start..end])
        .map_err(|_| (start, "non-UTF-8 header".to_string()))?;
    Ok((text, end + 1))
}

pub fn decode(bytes: &[u8]) -> std::result::Result<SemanticMap, (usize, String)> {
    let (first, next) = line(bytes, 0)?;
    let fields: Vec<&str> = first.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "SEMPROB" {
        return Err((0, "expected header 'SEMPROB <W> <H> <L>'".into()));
    }
    let parse = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| (0usize, format!("bad {what} {s:?}")))
    };
    let width = parse(fields[1], "width")?;
    let height = parse(fields[2], "height")?;
    let l = parse(fields[3], "label count")?;
    if l == 0 {
        return Err((0, "label count must be at least 1".into()));
    }
    let dims = GridDims::new(width, height).map_err(|e| (0, e.to_string()))?;
    let (names, payload) = line(bytes, next)?;
    let labels: Vec<String> = names.split_whitespace().map(str::to_owned).collect();
    if labels.len() != l {
        return Err((
            next,
            format!("header declares {l} labels, name line has {}", labels.len()),
        ));
    }
    let n = dims.len();
    let need = n * l * 4;
    if bytes.len() - payload != need {
        return Err((
            payload,
            format!(
                "payload has {} bytes, expected {need}",
                bytes.len() - payload
            ),
        ));
    }
    let mut scores = vec![0f64; n * l];
    for (k, chunk) in bytes[payload..].chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
        if !(v >= 0.0) || !v.is_finite() {
            return Err((payload + 4 * k, format!("invalid score {v}")));
        }
        let (label, pixel) = (k / n, k % n);
        scores[pixel * l + label] = v as f64;
    }
    SemanticMap::from_scores(dims, labels, scores).map_err(|e| (payload, e.to_string()))
}
