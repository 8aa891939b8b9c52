//! Quantization to 8-bit images and the float sidecar container.
//!
//! Quantization is round-half-up, fixed here so golden files stay
//! bit-exact across platforms. The sidecar stores the pre-quantization
//! planes as little-endian `f32`, row-major and channel-planar, after a
//! single-line JSON header.

use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::encoder::Normalization;
use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::model::{Matrix, SegmentBounds, StarGray, StarRgb};

/// Round half up: 0.5 -> 1, 1.5 -> 2, -0.5 -> 0.
pub fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

/// Quantize one nonnegative plane against a normalization denominator.
/// A denominator of zero (all-zero input) maps everything to zero.
pub fn quantize_plane(m: &Matrix, denom: f64) -> Vec<u8> {
    m.values()
        .iter()
        .map(|v| {
            let scaled = if denom > 0.0 { v / denom * 255.0 } else { 0.0 };
            round_half_up(scaled).clamp(0.0, 255.0) as u8
        })
        .collect()
}

/// Quantize a plane without normalization: clamp to [0, 255] and round.
pub fn quantize_plane_raw(m: &Matrix) -> Vec<u8> {
    m.values()
        .iter()
        .map(|v| round_half_up(*v).clamp(0.0, 255.0) as u8)
        .collect()
}

/// Quantize a signed plane (Sobel output): normalize by the per-plane
/// maximum absolute value, scale to ±127 and shift by +128 so zero lands
/// on 128. An all-zero plane maps entirely to 128.
pub fn quantize_signed_plane(m: &Matrix) -> Vec<u8> {
    let max_abs = m.max_abs();
    m.values()
        .iter()
        .map(|v| {
            let scaled = if max_abs > 0.0 { v / max_abs * 127.0 } else { 0.0 };
            round_half_up(scaled + 128.0).clamp(0.0, 255.0) as u8
        })
        .collect()
}

/// Quantize a tri-channel image under the given normalization mode.
pub fn star_rgb_to_image(star: &StarRgb, mode: Normalization) -> image::RgbImage {
    let (w, h) = (star.width(), star.height());
    let planes: Vec<Vec<u8>> = match mode {
        Normalization::GlobalMax => {
            let denom = star.channels().iter().map(|c| c.max()).fold(0.0, f64::max);
            star.channels().iter().map(|c| quantize_plane(c, denom)).collect()
        }
        Normalization::PerChannelMax => star
            .channels()
            .iter()
            .map(|c| quantize_plane(c, c.max()))
            .collect(),
        Normalization::None => star.channels().iter().map(|c| quantize_plane_raw(c)).collect(),
    };
    let mut img = image::RgbImage::new(w as u32, h as u32);
    for (idx, px) in img.pixels_mut().enumerate() {
        *px = image::Rgb([planes[0][idx], planes[1][idx], planes[2][idx]]);
    }
    img
}

/// 8-bit export of a grayscale star: the accumulation plane plus the
/// optional signed gradient planes.
pub struct StarGrayExport {
    pub m: image::GrayImage,
    pub m_x: Option<image::GrayImage>,
    pub m_y: Option<image::GrayImage>,
}

pub fn star_gray_to_images(star: &StarGray, mode: Normalization) -> StarGrayExport {
    let (w, h) = (star.m.width() as u32, star.m.height() as u32);
    let m_bytes = match mode {
        Normalization::None => quantize_plane_raw(&star.m),
        // single channel: global and per-channel coincide
        _ => quantize_plane(&star.m, star.m.max()),
    };
    let to_gray = |bytes: Vec<u8>| image::GrayImage::from_raw(w, h, bytes).expect("sized buffer");
    StarGrayExport {
        m: to_gray(m_bytes),
        m_x: star.m_x.as_ref().map(|p| to_gray(quantize_signed_plane(p))),
        m_y: star.m_y.as_ref().map(|p| to_gray(quantize_signed_plane(p))),
    }
}

/// What the sidecar planes represent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SidecarKind {
    /// One plane: the grayscale accumulation matrix.
    Gray,
    /// Three planes: accumulation matrix plus signed X/Y gradients.
    GraySobel,
    /// Three planes: R, G, B channel accumulations.
    Rgb,
    /// One plane of height 1: a feature vector.
    Vector,
}

pub const SIDECAR_VERSION: u32 = 1;

/// One-line JSON header preceding the raw plane data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SidecarHeader {
    pub version: u32,
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub clip_id: String,
    pub kind: SidecarKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Metric>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segment_bounds: Option<SegmentBounds>,
}

/// Write header plus planes. Every plane must match the header geometry.
pub fn write_sidecar(mut w: impl Write, header: &SidecarHeader, planes: &[&Matrix]) -> Result<()> {
    if planes.len() != header.channels {
        return Err(Error::BadSidecar(format!(
            "{} planes for {} channels",
            planes.len(),
            header.channels
        )));
    }
    if header.clip_id.contains(['\n', '\r']) {
        return Err(Error::BadSidecar("clip_id contains line breaks".into()));
    }
    let line = serde_json::to_string(header)?;
    w.write_all(line.as_bytes())?;
    w.write_all(b"\n")?;
    let mut buf = Vec::with_capacity(header.width * header.height * 4);
    for plane in planes {
        if plane.width() != header.width || plane.height() != header.height {
            return Err(Error::BadSidecar("plane geometry mismatch".into()));
        }
        buf.clear();
        for v in plane.values() {
            buf.extend_from_slice(&(*v as f32).to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

/// Read a sidecar back: header plus one `f32` vector per plane.
pub fn read_sidecar(r: impl Read) -> Result<(SidecarHeader, Vec<Vec<f32>>)> {
    let mut reader = std::io::BufReader::new(r);
    let mut line = String::new();
    reader.read_line(&mut line)?;
    let header: SidecarHeader = serde_json::from_str(line.trim_end())?;
    if header.version != SIDECAR_VERSION {
        return Err(Error::BadSidecar(format!(
            "unsupported version {}",
            header.version
        )));
    }
    if header.width == 0 || header.height == 0 || header.channels == 0 {
        return Err(Error::BadSidecar("empty geometry".into()));
    }
    let plane_len = header.width * header.height;
    let mut planes = Vec::with_capacity(header.channels);
    let mut bytes = vec![0u8; plane_len * 4];
    for _ in 0..header.channels {
        reader.read_exact(&mut bytes)?;
        planes.push(
            bytes
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect(),
        );
    }
    Ok((header, planes))
}
