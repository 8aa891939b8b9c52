//! Per-pixel-pair distance functions.
//!
//! Three metrics are available to the encoders:
//!
//! - [`abs_gray_diff`]: absolute difference of grayscale intensities, the
//!   legacy accumulation term.
//! - [`euclidean_diff`]: L2 distance between the RGB channel vectors.
//! - [`cosine_scaled_diff`]: intensity-norm difference scaled by a
//!   chromatic agreement factor derived from cosine similarity. An
//!   intensity-only change (collinear vectors) passes through at full
//!   weight; a pure hue rotation at constant intensity scores zero.
//!
//! All metrics are pure, symmetric in their arguments, and nonnegative.

use serde::{Deserialize, Serialize};

use crate::model::Pixel;

/// Norms below this are treated as zero: a black pixel has no chromatic
/// direction, so the fallback scores the pair by intensity change alone.
pub const ZERO_NORM_EPS: f64 = 1e-12;

/// Absolute difference of two grayscale intensities.
pub fn abs_gray_diff(a: f64, b: f64) -> f64 {
    (a - b).abs()
}

/// Euclidean (L2) distance between two pixels' channel vectors.
pub fn euclidean_diff(a: Pixel, b: Pixel) -> f64 {
    Pixel::new(a.r - b.r, a.g - b.g, a.b - b.b).norm()
}

/// Full decomposition of the cosine-scaled distance between two pixels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceBreakdown {
    /// `1 - cos(theta)` where `theta` is the angle between the channel
    /// vectors. In `[0, 1]` for nonnegative pixels, `[0, 2]` in general.
    pub lambda: f64,
    /// `1 - lambda / 2`; in `[0.5, 1]` for nonnegative pixels.
    pub chroma_factor: f64,
    pub norm_a: f64,
    pub norm_b: f64,
    /// `chroma_factor * |norm_a - norm_b|`.
    pub value: f64,
}

/// Cosine-scaled distance between two pixels.
///
/// If either vector has (near-)zero norm, `lambda` is forced to 0 and the
/// result degenerates to the plain intensity difference `|‖a‖ - ‖b‖|`.
/// The cosine is clamped to `[-1, 1]` to guard against rounding.
pub fn cosine_scaled_diff(a: Pixel, b: Pixel) -> DistanceBreakdown {
    let norm_a = a.norm();
    let norm_b = b.norm();
    let lambda = if norm_a < ZERO_NORM_EPS || norm_b < ZERO_NORM_EPS {
        0.0
    } else {
        let dot = a.r * b.r + a.g * b.g + a.b * b.b;
        let cos = (dot / (norm_a * norm_b)).clamp(-1.0, 1.0);
        1.0 - cos
    };
    let chroma_factor = 1.0 - lambda / 2.0;
    DistanceBreakdown {
        lambda,
        chroma_factor,
        norm_a,
        norm_b,
        value: chroma_factor * (norm_a - norm_b).abs(),
    }
}

/// Which per-pair distance the accumulator sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Absolute grayscale difference (legacy term). Pixels are reduced to
    /// BT.601 luminance before differencing.
    AbsGray,
    /// Euclidean distance between RGB vectors.
    Euclidean,
    /// Cosine-scaled intensity distance.
    CosineScaled,
}

impl Metric {
    pub fn between(self, a: Pixel, b: Pixel) -> f64 {
        match self {
            Metric::AbsGray => abs_gray_diff(a.luminance(), b.luminance()),
            Metric::Euclidean => euclidean_diff(a, b),
            Metric::CosineScaled => cosine_scaled_diff(a, b).value,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::AbsGray => "abs_gray",
            Metric::Euclidean => "euclidean",
            Metric::CosineScaled => "cosine_scaled",
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}
