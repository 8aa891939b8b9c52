//! Geometric transforms and the augmentation pipeline.
//!
//! Everything randomized is driven by an explicit ChaCha stream; the same
//! `(seed, clip_id)` always produces the same bytes, no matter how many
//! entries run in parallel. Global random state is never touched.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::model::{Frame, Pixel};

/// Crop window selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CropSpec {
    /// Fixed window centered with floor((size - window) / 2) offsets.
    Center { width: usize, height: usize },
    /// Window offsets drawn uniformly from the valid range.
    Random { width: usize, height: usize },
}

impl CropSpec {
    pub fn window(&self) -> (usize, usize) {
        match *self {
            CropSpec::Center { width, height } | CropSpec::Random { width, height } => {
                (width, height)
            }
        }
    }
}

/// Additive Gaussian noise parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub mu: f64,
    pub sigma: f64,
}

/// The full transform pipeline configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformSpec {
    /// Frame size before encoding, (width, height).
    pub resize_to: (usize, usize),
    pub crop: Option<CropSpec>,
    pub hflip_prob: f64,
    /// Rotation angles are drawn uniformly from ±this bound (degrees).
    pub rotation_degrees: f64,
    pub noise: Option<NoiseSpec>,
}

impl TransformSpec {
    /// Training-style pipeline: 160x120 resize, random 140x110 crop,
    /// coin-flip horizontal mirror, ±5° rotation, unit Gaussian noise.
    pub fn training() -> Self {
        Self {
            resize_to: (160, 120),
            crop: Some(CropSpec::Random {
                width: 140,
                height: 110,
            }),
            hflip_prob: 0.5,
            rotation_degrees: 5.0,
            noise: Some(NoiseSpec { mu: 0.0, sigma: 1.0 }),
        }
    }

    /// Evaluation-style pipeline: 160x120 resize, center 140x110 crop,
    /// nothing randomized.
    pub fn evaluation() -> Self {
        Self {
            resize_to: (160, 120),
            crop: Some(CropSpec::Center {
                width: 140,
                height: 110,
            }),
            hflip_prob: 0.0,
            rotation_degrees: 0.0,
            noise: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (rw, rh) = self.resize_to;
        if rw == 0 || rh == 0 {
            return Err(Error::InvalidConfig("resize target must be at least 1x1".into()));
        }
        if let Some(crop) = &self.crop {
            let (cw, ch) = crop.window();
            if cw == 0 || ch == 0 {
                return Err(Error::InvalidConfig("crop window must be at least 1x1".into()));
            }
            if cw > rw || ch > rh {
                return Err(Error::CropTooLarge {
                    crop_width: cw,
                    crop_height: ch,
                    width: rw,
                    height: rh,
                });
            }
        }
        if !(0.0..=1.0).contains(&self.hflip_prob) {
            return Err(Error::InvalidConfig(format!(
                "hflip_prob {} outside [0, 1]",
                self.hflip_prob
            )));
        }
        if !self.rotation_degrees.is_finite() || self.rotation_degrees < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "rotation bound {} must be finite and nonnegative",
                self.rotation_degrees
            )));
        }
        if let Some(noise) = &self.noise {
            if !noise.mu.is_finite() || !noise.sigma.is_finite() || noise.sigma < 0.0 {
                return Err(Error::InvalidConfig("bad noise parameters".into()));
            }
        }
        Ok(())
    }
}

/// Bilinear resize with pixel centers at `(i + 0.5) / n`; edge samples
/// clamp to the border.
pub fn resize(frame: &Frame, out_width: usize, out_height: usize) -> Result<Frame> {
    if out_width == 0 || out_height == 0 {
        return Err(Error::InvalidConfig("resize target must be at least 1x1".into()));
    }
    let (in_w, in_h) = (frame.width(), frame.height());
    let scale_x = in_w as f64 / out_width as f64;
    let scale_y = in_h as f64 / out_height as f64;
    let clamp = |v: isize, hi: usize| v.clamp(0, hi as isize - 1) as usize;
    Ok(Frame::from_fn(out_width, out_height, |oi, oj| {
        let y = (oi as f64 + 0.5) * scale_y - 0.5;
        let x = (oj as f64 + 0.5) * scale_x - 0.5;
        let y0 = y.floor();
        let x0 = x.floor();
        let fy = y - y0;
        let fx = x - x0;
        let r0 = clamp(y0 as isize, in_h);
        let r1 = clamp(y0 as isize + 1, in_h);
        let c0 = clamp(x0 as isize, in_w);
        let c1 = clamp(x0 as isize + 1, in_w);
        let lerp = |a: f64, b: f64, t: f64| a * (1.0 - t) + b * t;
        let sample = |ch: fn(Pixel) -> f64| {
            let top = lerp(ch(frame.get(r0, c0)), ch(frame.get(r0, c1)), fx);
            let bot = lerp(ch(frame.get(r1, c0)), ch(frame.get(r1, c1)), fx);
            lerp(top, bot, fy)
        };
        Pixel::new(sample(|p| p.r), sample(|p| p.g), sample(|p| p.b))
    }))
}

fn crop_at(frame: &Frame, left: usize, top: usize, width: usize, height: usize) -> Frame {
    Frame::from_fn(width, height, |i, j| frame.get(top + i, left + j))
}

fn check_window(frame: &Frame, width: usize, height: usize) -> Result<()> {
    if width > frame.width() || height > frame.height() || width == 0 || height == 0 {
        return Err(Error::CropTooLarge {
            crop_width: width,
            crop_height: height,
            width: frame.width(),
            height: frame.height(),
        });
    }
    Ok(())
}

/// Center crop: `floor((W - w) / 2)` left offset, same rule for top.
pub fn crop_center(frame: &Frame, width: usize, height: usize) -> Result<Frame> {
    check_window(frame, width, height)?;
    let left = (frame.width() - width) / 2;
    let top = (frame.height() - height) / 2;
    Ok(crop_at(frame, left, top, width, height))
}

/// Random crop with offsets drawn uniformly over the valid range.
pub fn crop_random(
    frame: &Frame,
    width: usize,
    height: usize,
    rng: &mut impl Rng,
) -> Result<Frame> {
    check_window(frame, width, height)?;
    let left = rng.gen_range(0..=frame.width() - width);
    let top = rng.gen_range(0..=frame.height() - height);
    Ok(crop_at(frame, left, top, width, height))
}

/// Horizontal mirror (columns reversed).
pub fn hflip(frame: &Frame) -> Frame {
    let w = frame.width();
    Frame::from_fn(w, frame.height(), |i, j| frame.get(i, w - 1 - j))
}

/// Rotate about the image center with bilinear resampling; samples
/// falling outside the source are zero.
pub fn rotate(frame: &Frame, degrees: f64) -> Frame {
    let (w, h) = (frame.width(), frame.height());
    let (sin, cos) = degrees.to_radians().sin_cos();
    let cx = (w as f64 - 1.0) / 2.0;
    let cy = (h as f64 - 1.0) / 2.0;
    let sample_zero = |r: isize, c: isize, ch: fn(Pixel) -> f64| -> f64 {
        if r < 0 || c < 0 || r >= h as isize || c >= w as isize {
            0.0
        } else {
            ch(frame.get(r as usize, c as usize))
        }
    };
    Frame::from_fn(w, h, |i, j| {
        let dx = j as f64 - cx;
        let dy = i as f64 - cy;
        let x = cos * dx + sin * dy + cx;
        let y = -sin * dx + cos * dy + cy;
        let x0 = x.floor();
        let y0 = y.floor();
        let fx = x - x0;
        let fy = y - y0;
        let (c0, r0) = (x0 as isize, y0 as isize);
        let blend = |ch: fn(Pixel) -> f64| {
            let top = sample_zero(r0, c0, ch) * (1.0 - fx) + sample_zero(r0, c0 + 1, ch) * fx;
            let bot =
                sample_zero(r0 + 1, c0, ch) * (1.0 - fx) + sample_zero(r0 + 1, c0 + 1, ch) * fx;
            top * (1.0 - fy) + bot * fy
        };
        Pixel::new(blend(|p| p.r), blend(|p| p.g), blend(|p| p.b))
    })
}

/// Additive per-channel Gaussian noise, clamped to `[0, 255]`.
pub fn add_gaussian_noise(frame: &Frame, noise: NoiseSpec, rng: &mut impl Rng) -> Frame {
    let normal = Normal::new(noise.mu, noise.sigma).expect("validated sigma");
    let mut draw = || normal.sample(rng);
    Frame::from_fn(frame.width(), frame.height(), |i, j| {
        let p = frame.get(i, j);
        Pixel::new(
            (p.r + draw()).clamp(0.0, 255.0),
            (p.g + draw()).clamp(0.0, 255.0),
            (p.b + draw()).clamp(0.0, 255.0),
        )
    })
}

/// Derive a per-clip seed from the run seed and the clip id. Stable
/// across platforms, so parallel batch order never changes outputs.
pub fn derive_seed(seed: u64, clip_id: &str) -> u64 {
    // FNV-1a over the id, then a splitmix64 finalizer round
    let mut hash: u64 = 0xcbf29ce484222325;
    for byte in clip_id.as_bytes() {
        hash ^= *byte as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    let mut z = seed ^ hash;
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Apply the augmentation pipeline in fixed order: crop, horizontal
/// flip, rotation, noise. Fully determined by `seed`; disabled stages
/// draw nothing, so the all-disabled spec is the identity.
pub fn augment(frame: &Frame, spec: &TransformSpec, seed: u64) -> Result<Frame> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut img = frame.clone();
    match spec.crop {
        Some(CropSpec::Center { width, height }) => img = crop_center(&img, width, height)?,
        Some(CropSpec::Random { width, height }) => {
            img = crop_random(&img, width, height, &mut rng)?
        }
        None => {}
    }
    if spec.hflip_prob > 0.0 && rng.gen::<f64>() < spec.hflip_prob {
        img = hflip(&img);
    }
    if spec.rotation_degrees > 0.0 {
        let angle = rng.gen_range(-spec.rotation_degrees..=spec.rotation_degrees);
        img = rotate(&img, angle);
    }
    if let Some(noise) = spec.noise {
        if noise.sigma > 0.0 || noise.mu != 0.0 {
            img = add_gaussian_noise(&img, noise, &mut rng);
        }
    }
    Ok(img)
}
