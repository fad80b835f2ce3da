//! PNG access and format sniffing for 8-bit guidance images.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use super::pgm::{self, GrayImage};
use crate::error::{Error, Result};

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

fn png_error(path: &Path, msg: impl std::fmt::Display) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        offset: 0,
        msg: format!("png: {msg}"),
    }
}

/// Decodes a PNG to 8-bit grayscale; color inputs are reduced with Rec. 601 luma.
pub fn read_png_gray8(path: &Path) -> Result<GrayImage> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut decoder = png::Decoder::new(std::io::BufReader::new(file));
    decoder.set_transformations(png::Transformations::EXPAND | png::Transformations::STRIP_16);
    let mut reader = decoder.read_info().map_err(|e| png_error(path, e))?;
    let mut buf = vec![0; reader.output_buffer_size()];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| png_error(path, e))?;
    let (width, height) = (info.width as usize, info.height as usize);
    let channels = info.color_type.samples();
    let buf = &buf[..info.buffer_size()];
    let mut data = Vec::with_capacity(width * height);
    for row in buf.chunks_exact(info.line_size) {
        for px in row[..width * channels].chunks_exact(channels) {
            let g = match channels {
                1 | 2 => px[0],
                _ => {
                    let y = 0.299 * px[0] as f64 + 0.587 * px[1] as f64 + 0.114 * px[2] as f64;
                    y.round().clamp(0.0, 255.0) as u8
                }
            };
            data.push(g);
        }
    }
    Ok(GrayImage {
        width,
        height,
        maxval: 255,
        data,
    })
}

pub fn write_png_gray16(path: &Path, width: usize, height: usize, data: &[u16]) -> Result<()> {
    assert_eq!(data.len(), width * height, "png payload size");
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), width as u32, height as u32);
    encoder.set_color(png::ColorType::Grayscale);
    encoder.set_depth(png::BitDepth::Sixteen);
    let mut writer = encoder.write_header().map_err(|e| png_error(path, e))?;
    let bytes: Vec<u8> = data.iter().flat_map(|v| v.to_be_bytes()).collect();
    writer
        .write_image_data(&bytes)
        .map_err(|e| png_error(path, e))?;
    writer.finish().map_err(|e| png_error(path, e))
}

/// Reads a 16-bit grayscale PNG back into samples.
pub fn read_png_gray16(path: &Path) -> Result<(usize, usize, Vec<u16>)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let decoder = png::Decoder::new(std::io::BufReader::new(file));
    let mut reader = decoder.read_info().map_err(|e| png_error(path, e))?;
    let mut buf = vec![0; reader.output_buffer_size()];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| png_error(path, e))?;
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Sixteen {
        return Err(png_error(path, "expected 16-bit grayscale"));
    }
    let data = buf[..info.buffer_size()]
        .chunks_exact(2)
        .map(|b| u16::from_be_bytes([b[0], b[1]]))
        .collect();
    Ok((info.width as usize, info.height as usize, data))
}

/// Loads an 8-bit grayscale image from PGM or PNG, chosen by file signature.
pub fn read_gray8(path: &Path) -> Result<GrayImage> {
    let head = fs::read(path).map_err(|e| Error::io(path, e))?;
    if head.starts_with(PNG_MAGIC) {
        read_png_gray8(path)
    } else {
        pgm::decode(&head).map_err(|(offset, msg)| Error::Format {
            path: path.to_path_buf(),
            offset,
            msg,
        })
    }
}
