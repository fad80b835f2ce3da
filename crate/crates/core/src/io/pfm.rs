//! Grayscale PFM (`Pf`) reading and writing.
//!
//! Files store rows bottom-up; in memory everything is top-down row-major.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PfmImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f32>,
}

/// Encodes a little-endian grayscale PFM.
pub fn encode(width: usize, height: usize, data: &[f32]) -> Vec<u8> {
    assert_eq!(data.len(), width * height, "pfm payload size");
    let header = format!("Pf\n{width} {height}\n-1.0\n");
    let mut out = Vec::with_capacity(header.len() + data.len() * 4);
    out.extend_from_slice(header.as_bytes());
    for row in (0..height).rev() {
        for v in &data[row * width..(row + 1) * width] {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn write(path: &Path, width: usize, height: usize, data: &[f32]) -> Result<()> {
    fs::write(path, encode(width, height, data)).map_err(|e| Error::io(path, e))
}

pub fn read(path: &Path) -> Result<PfmImage> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes).map_err(|(offset, msg)| Error::Format {
        path: path.to_path_buf(),
        offset,
        msg,
    })
}

/// Reads one whitespace-delimited header token starting at `*pos`.
fn token<'a>(bytes: &'a [u8], pos: &mut usize) -> std::result::Result<&'a str, (usize, String)> {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err((start, "unexpected end of header".into()));
    }
    std::str::from_utf8(&bytes[start..*pos]).map_err(|_| (start, "non-ASCII header".into()))
}

pub fn decode(bytes: &[u8]) -> std::result::Result<PfmImage, (usize, String)> {
    let mut pos = 0;
    let magic = token(bytes, &mut pos)?;
    match magic {
        "Pf" => {}
        "PF" => return Err((0, "color PFM not supported, expected grayscale 'Pf'".into())),
        other => return Err((0, format!("bad magic {other:?}"))),
    }
    let at = pos;
    let width: usize = token(bytes, &mut pos)?
        .parse()
        .map_err(|_| (at, "bad width".to_string()))?;
    let at = pos;
    let height: usize = token(bytes, &mut pos)?
        .parse()
        .map_err(|_| (at, "bad height".to_string()))?;
    let at = pos;
    let scale: f64 = token(bytes, &mut pos)?
        .parse()
        .map_err(|_| (at, "bad scale".to_string()))?;
    if width == 0 || height == 0 {
        return Err((at, "zero dimension".into()));
    }
    if scale == 0.0 || !scale.is_finite() {
        return Err((at, "scale must be finite and non-zero".into()));
    }
    // exactly one whitespace byte separates the header from the payload
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err((pos, "missing header terminator".into()));
    }
    pos += 1;
    let need = width * height * 4;
    if bytes.len() - pos != need {
        return Err((
            pos,
            format!("payload has {} bytes, expected {need}", bytes.len() - pos),
        ));
    }
    let little = scale < 0.0;
    let mut data = vec![0f32; width * height];
    for (k, chunk) in bytes[pos..].chunks_exact(4).enumerate() {
        let b = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little {
            f32::from_le_bytes(b)
        } else {
            f32::from_be_bytes(b)
        };
        let file_row = k / width;
        let col = k % width;
        data[(height - 1 - file_row) * width + col] = v;
    }
    Ok(PfmImage {
        width,
        height,
        data,
    })
}
