//! 8-bit PGM (binary `P5` and ASCII `P2`).

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub data: Vec<u8>,
}

pub fn encode(width: usize, height: usize, data: &[u8]) -> Vec<u8> {
    assert_eq!(data.len(), width * height, "pgm payload size");
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(data);
    out
}

pub fn write(path: &Path, width: usize, height: usize, data: &[u8]) -> Result<()> {
    fs::write(path, encode(width, height, data)).map_err(|e| Error::io(path, e))
}

pub fn read(path: &Path) -> Result<GrayImage> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes).map_err(|(offset, msg)| Error::Format {
        path: path.to_path_buf(),
        offset,
        msg,
    })
}

fn skip_space_and_comments(bytes: &[u8], pos: &mut usize) {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else {
            return;
        }
    }
}

fn number(bytes: &[u8], pos: &mut usize) -> std::result::Result<usize, (usize, String)> {
    skip_space_and_comments(bytes, pos);
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if start == *pos {
        return Err((start, "expected a decimal number".into()));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .unwrap()
        .parse()
        .map_err(|_| (start, "number out of range".into()))
}

pub fn decode(bytes: &[u8]) -> std::result::Result<GrayImage, (usize, String)> {
    if bytes.len() < 2 || bytes[0] != b'P' || !(bytes[1] == b'5' || bytes[1] == b'2') {
        return Err((0, "expected PGM magic P5 or P2".into()));
    }
    let ascii = bytes[1] == b'2';
    let mut pos = 2;
    let width = number(bytes, &mut pos)?;
    let height = number(bytes, &mut pos)?;
    let at = pos;
    let maxval = number(bytes, &mut pos)?;
    if width == 0 || height == 0 {
        return Err((at, "zero dimension".into()));
    }
    if maxval == 0 || maxval > 255 {
        return Err((at, format!("maxval {maxval} unsupported, expected 8-bit")));
    }
    let n = width * height;
    let data = if ascii {
        let mut data = Vec::with_capacity(n);
        for _ in 0..n {
            let at = pos;
            let v = number(bytes, &mut pos)?;
            if v > maxval {
                return Err((at, format!("sample {v} exceeds maxval {maxval}")));
            }
            data.push(v as u8);
        }
        data
    } else {
        if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
            return Err((pos, "missing header terminator".into()));
        }
        pos += 1;
        if bytes.len() - pos != n {
            return Err((
                pos,
                format!("payload has {} bytes, expected {n}", bytes.len() - pos),
            ));
        }
        bytes[pos..].to_vec()
    };
    Ok(GrayImage {
        width,
        height,
        maxval: maxval as u16,
        data,
    })
}
