//! Shared domain types: pixels, frames, clips, and the accumulation
//! matrices the encoders produce.
//!
//! Channel intensities are stored as `f64` end to end; quantization to
//! 8-bit happens only at export. All types are immutable value objects
//! after construction and safe to share across threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One RGB pixel. Channels are nonnegative reals, nominal range `[0, 255]`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Pixel {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

/// ITU-R BT.601 luma weights, the common default for consumer video.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

impl Pixel {
    pub fn new(r: f64, g: f64, b: f64) -> Self {
        Self { r, g, b }
    }

    pub fn gray(v: f64) -> Self {
        Self { r: v, g: v, b: v }
    }

    /// Euclidean length of the channel vector.
    pub fn norm(&self) -> f64 {
        (self.r * self.r + self.g * self.g + self.b * self.b).sqrt()
    }

    /// BT.601 luminance.
    pub fn luminance(&self) -> f64 {
        LUMA_WEIGHTS[0] * self.r + LUMA_WEIGHTS[1] * self.g + LUMA_WEIGHTS[2] * self.b
    }

    pub fn is_valid(&self) -> bool {
        [self.r, self.g, self.b]
            .iter()
            .all(|c| c.is_finite() && *c >= 0.0)
    }
}

/// One video frame: a row-major grid of pixels.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    width: usize,
    height: usize,
    data: Vec<Pixel>,
}

impl Frame {
    pub fn new(width: usize, height: usize, data: Vec<Pixel>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidGeometry(format!(
                "frame must be at least 1x1, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidGeometry(format!(
                "frame data length {} does not match {width}x{height}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Build a frame from a generator called as `f(row, col)`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> Pixel) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for i in 0..height {
            for j in 0..width {
                data.push(f(i, j));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn constant(width: usize, height: usize, p: Pixel) -> Self {
        Self {
            width,
            height,
            data: vec![p; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Pixel at (row, col).
    pub fn get(&self, row: usize, col: usize) -> Pixel {
        self.data[row * self.width + col]
    }

    pub fn pixels(&self) -> &[Pixel] {
        &self.data
    }

    /// Per-pixel BT.601 luminance, replicated into all three channels.
    pub fn to_grayscale(&self) -> Frame {
        Frame {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|p| Pixel::gray(p.luminance())).collect(),
        }
    }
}

/// An ordered sequence of equally sized frames constituting one gesture clip.
#[derive(Clone, Debug)]
pub struct ClipSource {
    frames: Vec<Frame>,
    clip_id: String,
    label: Option<String>,
}

impl ClipSource {
    /// At least two frames, all of identical dimensions.
    pub fn new(frames: Vec<Frame>, clip_id: impl Into<String>, label: Option<String>) -> Result<Self> {
        if frames.len() < 2 {
            return Err(Error::TooFewFrames(frames.len()));
        }
        let (w, h) = (frames[0].width(), frames[0].height());
        for f in &frames[1..] {
            if f.width() != w || f.height() != h {
                return Err(Error::DimensionMismatch {
                    expected_width: w,
                    expected_height: h,
                    width: f.width(),
                    height: f.height(),
                });
            }
        }
        Ok(Self {
            frames,
            clip_id: clip_id.into(),
            label,
        })
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    /// Memory size: the number of frames.
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn width(&self) -> usize {
        self.frames[0].width()
    }

    pub fn height(&self) -> usize {
        self.frames[0].height()
    }

    pub fn clip_id(&self) -> &str {
        &self.clip_id
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// The same clip with frame order reversed.
    pub fn reversed(&self) -> ClipSource {
        let mut frames = self.frames.clone();
        frames.reverse();
        ClipSource {
            frames,
            clip_id: format!("{}-reversed", self.clip_id),
            label: self.label.clone(),
        }
    }
}

/// A row-major grid of real values. Accumulation outputs are nonnegative
/// by construction; Sobel gradient planes are signed.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::InvalidGeometry(format!(
                "matrix data length {} does not match {width}x{height}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.data[row * self.width + col] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Largest value (0.0 for an empty matrix; never constructed here).
    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// A contiguous 1-based inclusive range of frame indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameRange {
    pub start: usize,
    pub end: usize,
}

impl FrameRange {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }
}

/// The three sub-video ranges used by the tri-segment encoder, in order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentBounds {
    pub first: FrameRange,
    pub middle: FrameRange,
    pub last: FrameRange,
}

impl SegmentBounds {
    pub fn as_array(&self) -> [FrameRange; 3] {
        [self.first, self.middle, self.last]
    }
}

/// Single-channel condensed image: the accumulation matrix plus optional
/// Sobel gradient planes.
#[derive(Clone, Debug)]
pub struct StarGray {
    pub m: Matrix,
    pub m_x: Option<Matrix>,
    pub m_y: Option<Matrix>,
}

/// Three-channel condensed image. R/G/B hold the accumulations of the
/// first/middle/last sub-videos.
#[derive(Clone, Debug)]
pub struct StarRgb {
    pub r: Matrix,
    pub g: Matrix,
    pub b: Matrix,
    pub segment_bounds: SegmentBounds,
}

impl StarRgb {
    pub fn width(&self) -> usize {
        self.r.width()
    }

    pub fn height(&self) -> usize {
        self.r.height()
    }

    pub fn channels(&self) -> [&Matrix; 3] {
        [&self.r, &self.g, &self.b]
    }
}
