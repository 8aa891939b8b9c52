//! Condense a clip into a single image by accumulating per-pair pixel
//! distances over consecutive frames.
//!
//! Two encoders are provided:
//!
//! - [`encode_star_legacy`]: grayscale absolute differences weighted by
//!   `k/N` (the "weighted shadow"), optionally extended with Sobel
//!   gradient planes of the accumulation matrix.
//! - [`encode_star_rgb`]: the clip is split into three consecutive
//!   sub-videos (pre-stroke / stroke / post-stroke); each is accumulated
//!   independently with the cosine-scaled metric and the three matrices
//!   become the R, G and B channels. Reversing the clip swaps R and B,
//!   which is what makes the representation direction-sensitive.
//!
//! Accumulation is a pure function of the clip; batch encoding across
//! clips is embarrassingly parallel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::model::{ClipSource, Frame, FrameRange, Matrix, SegmentBounds, StarGray, StarRgb};

/// Export normalization mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Scale all channels by the single maximum over every channel.
    /// Preserves relative motion energy between the three phases.
    GlobalMax,
    /// Scale each channel by its own maximum.
    PerChannelMax,
    /// No scaling; values are clamped to `[0, 255]` at quantization.
    None,
}

impl Normalization {
    pub fn name(self) -> &'static str {
        match self {
            Normalization::GlobalMax => "global",
            Normalization::PerChannelMax => "per-channel",
            Normalization::None => "none",
        }
    }
}

/// Encoder configuration.
///
/// `weighted_shadow` and `sobel_channels` belong to the legacy grayscale
/// mode and are only accepted together with [`Metric::AbsGray`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EncodeConfig {
    metric: Metric,
    weighted_shadow: bool,
    sobel_channels: bool,
    normalization: Normalization,
}

impl EncodeConfig {
    pub fn new(
        metric: Metric,
        weighted_shadow: bool,
        sobel_channels: bool,
        normalization: Normalization,
    ) -> Result<Self> {
        if metric != Metric::AbsGray && (weighted_shadow || sobel_channels) {
            return Err(Error::InvalidConfig(format!(
                "weighted shadow and sobel channels require the abs_gray metric, got {metric}"
            )));
        }
        Ok(Self {
            metric,
            weighted_shadow,
            sobel_channels,
            normalization,
        })
    }

    /// Legacy grayscale mode: abs_gray metric, weighted shadow, Sobel planes.
    pub fn legacy() -> Self {
        Self {
            metric: Metric::AbsGray,
            weighted_shadow: true,
            sobel_channels: true,
            normalization: Normalization::GlobalMax,
        }
    }

    /// Default tri-segment RGB mode: cosine-scaled metric, no shadow.
    pub fn star_rgb() -> Self {
        Self {
            metric: Metric::CosineScaled,
            weighted_shadow: false,
            sobel_channels: false,
            normalization: Normalization::GlobalMax,
        }
    }

    pub fn with_metric(mut self, metric: Metric) -> Result<Self> {
        self.metric = metric;
        Self::new(
            self.metric,
            self.weighted_shadow,
            self.sobel_channels,
            self.normalization,
        )
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn weighted_shadow(&self) -> bool {
        self.weighted_shadow
    }

    pub fn sobel_channels(&self) -> bool {
        self.sobel_channels
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }
}

/// Sum the chosen metric per pixel over the consecutive pairs of `frames`.
///
/// Frame indices are 1-based within the slice; the k-th term (k = 2..=N)
/// is weighted by `k/N` when `weighted_shadow` is set.
fn accumulate_frames(frames: &[Frame], metric: Metric, weighted_shadow: bool) -> Matrix {
    let n = frames.len();
    let mut out = Matrix::zeros(frames[0].width(), frames[0].height());
    for k in 2..=n {
        let weight = if weighted_shadow {
            k as f64 / n as f64
        } else {
            1.0
        };
        let prev = frames[k - 2].pixels();
        let cur = frames[k - 1].pixels();
        for (acc, (a, b)) in out.values_mut().iter_mut().zip(prev.iter().zip(cur)) {
            *acc += metric.between(*a, *b) * weight;
        }
    }
    out
}

/// Accumulate the whole clip into one matrix.
pub fn accumulate(clip: &ClipSource, metric: Metric, weighted_shadow: bool) -> Result<Matrix> {
    if clip.len() < 2 {
        return Err(Error::TooFewFrames(clip.len()));
    }
    Ok(accumulate_frames(clip.frames(), metric, weighted_shadow))
}

/// Split `1..=n` into three contiguous ranges of lengths
/// `⌊n/3⌋, n − 2⌊n/3⌋, ⌊n/3⌋`.
///
/// Requires `n >= 6` so every segment contains at least one consecutive
/// pair.
pub fn split_segments(n: usize) -> Result<SegmentBounds> {
    if n < 6 {
        return Err(Error::ClipTooShort(n));
    }
    let third = n / 3;
    Ok(SegmentBounds {
        first: FrameRange {
            start: 1,
            end: third,
        },
        middle: FrameRange {
            start: third + 1,
            end: n - third,
        },
        last: FrameRange {
            start: n - third + 1,
            end: n,
        },
    })
}

/// Legacy encoder: grayscale conversion, weighted-shadow accumulation,
/// then optional Sobel gradient planes over the accumulation matrix.
pub fn encode_star_legacy(clip: &ClipSource, config: &EncodeConfig) -> Result<StarGray> {
    if config.metric != Metric::AbsGray {
        return Err(Error::InvalidConfig(format!(
            "legacy encoding uses the abs_gray metric, got {}",
            config.metric
        )));
    }
    let m = accumulate(clip, Metric::AbsGray, config.weighted_shadow)?;
    let (m_x, m_y) = if config.sobel_channels {
        (Some(sobel_x(&m)), Some(sobel_y(&m)))
    } else {
        (None, None)
    };
    Ok(StarGray { m, m_x, m_y })
}

/// Tri-segment encoder.
///
/// Each sub-video is accumulated independently (pairs crossing segment
/// boundaries are dropped) and no shadow weighting is applied. Channel
/// assignment: first segment to R, middle to G, last to B.
pub fn encode_star_rgb(clip: &ClipSource, config: &EncodeConfig) -> Result<StarRgb> {
    if config.weighted_shadow || config.sobel_channels {
        return Err(Error::InvalidConfig(
            "tri-segment encoding takes neither weighted shadow nor sobel channels".into(),
        ));
    }
    let bounds = split_segments(clip.len())?;
    let frames = clip.frames();
    let mut channels = bounds.as_array().into_iter().map(|range| {
        accumulate_frames(&frames[range.start - 1..range.end], config.metric, false)
    });
    Ok(StarRgb {
        r: channels.next().unwrap(),
        g: channels.next().unwrap(),
        b: channels.next().unwrap(),
        segment_bounds: bounds,
    })
}

const SOBEL_X_KERNEL: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
const SOBEL_Y_KERNEL: [[f64; 3]; 3] = [[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]];

fn sobel(m: &Matrix, kernel: &[[f64; 3]; 3]) -> Matrix {
    let (w, h) = (m.width(), m.height());
    let mut out = Matrix::zeros(w, h);
    for i in 0..h {
        for j in 0..w {
            let mut acc = 0.0;
            for (di, row) in kernel.iter().enumerate() {
                // replicated (edge-clamped) borders
                let si = (i + di).saturating_sub(1).min(h - 1);
                for (dj, coeff) in row.iter().enumerate() {
                    let sj = (j + dj).saturating_sub(1).min(w - 1);
                    acc += coeff * m.get(si, sj);
                }
            }
            out.set(i, j, acc);
        }
    }
    out
}

/// Horizontal-gradient Sobel plane (positive toward increasing column).
pub fn sobel_x(m: &Matrix) -> Matrix {
    sobel(m, &SOBEL_X_KERNEL)
}

/// Vertical-gradient Sobel plane (positive toward increasing row).
pub fn sobel_y(m: &Matrix) -> Matrix {
    sobel(m, &SOBEL_Y_KERNEL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::cosine_scaled_diff;
    use crate::model::Pixel;

    fn constant_clip(n: usize, p: Pixel) -> ClipSource {
        let frames = vec![Frame::constant(3, 2, p); n];
        ClipSource::new(frames, "const", None).unwrap()
    }

    #[test]
    fn config_rejects_shadow_outside_legacy() {
        assert!(EncodeConfig::new(Metric::CosineScaled, true, false, Normalization::GlobalMax).is_err());
        assert!(EncodeConfig::new(Metric::Euclidean, false, true, Normalization::GlobalMax).is_err());
        assert!(EncodeConfig::new(Metric::AbsGray, true, true, Normalization::GlobalMax).is_ok());
    }

    #[test]
    fn identical_frames_accumulate_to_zero() {
        let clip = constant_clip(5, Pixel::new(12.0, 200.0, 3.0));
        for metric in [Metric::AbsGray, Metric::Euclidean, Metric::CosineScaled] {
            let m = accumulate(&clip, metric, false).unwrap();
            assert!(m.values().iter().all(|v| *v == 0.0), "{metric}");
        }
    }

    #[test]
    fn two_frame_clip_is_single_pair() {
        let a = Frame::from_fn(2, 2, |i, j| Pixel::new((i * 2 + j) as f64, 5.0, 40.0));
        let b = Frame::from_fn(2, 2, |i, j| Pixel::new(10.0, (j * 9) as f64, i as f64));
        let clip = ClipSource::new(vec![a.clone(), b.clone()], "pair", None).unwrap();
        let m = accumulate(&clip, Metric::CosineScaled, false).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = cosine_scaled_diff(a.get(i, j), b.get(i, j)).value;
                assert_eq!(m.get(i, j), want);
            }
        }
    }

    #[test]
    fn accumulate_rejects_short_clip() {
        let clip = constant_clip(2, Pixel::default());
        assert!(accumulate(&clip, Metric::AbsGray, false).is_ok());
        // ClipSource can't even be built with < 2 frames; the guard is for
        // internal callers holding a clip-like slice.
    }

    #[test]
    fn toggling_pixel_matches_closed_form() {
        // one pixel alternates 0 <-> 255 each frame, rest stays black:
        // every pair contributes 255, weighted by k/N.
        let n = 7;
        let frames: Vec<Frame> = (0..n)
            .map(|k| {
                Frame::from_fn(3, 3, |i, j| {
                    if (i, j) == (1, 2) && k % 2 == 1 {
                        Pixel::gray(255.0)
                    } else {
                        Pixel::gray(0.0)
                    }
                })
            })
            .collect();
        let clip = ClipSource::new(frames, "toggle", None).unwrap();
        let star = encode_star_legacy(&clip, &EncodeConfig::legacy()).unwrap();
        let expected: f64 = (2..=n).map(|k| 255.0 * k as f64 / n as f64).sum();
        assert!((star.m.get(1, 2) - expected).abs() < 1e-9);
        for i in 0..3 {
            for j in 0..3 {
                if (i, j) != (1, 2) {
                    assert_eq!(star.m.get(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn constant_clip_legacy_is_all_zero() {
        let clip = constant_clip(6, Pixel::new(9.0, 9.0, 9.0));
        let star = encode_star_legacy(&clip, &EncodeConfig::legacy()).unwrap();
        assert!(star.m.values().iter().all(|v| *v == 0.0));
        assert!(star.m_x.unwrap().values().iter().all(|v| *v == 0.0));
        assert!(star.m_y.unwrap().values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn segment_rule_examples() {
        let b = split_segments(9).unwrap();
        assert_eq!(b.as_array().map(|r| (r.start, r.end)), [(1, 3), (4, 6), (7, 9)]);
        let b = split_segments(10).unwrap();
        assert_eq!(b.as_array().map(|r| (r.start, r.end)), [(1, 3), (4, 7), (8, 10)]);
        let b = split_segments(11).unwrap();
        assert_eq!(b.as_array().map(|r| (r.start, r.end)), [(1, 3), (4, 8), (9, 11)]);
    }

    #[test]
    fn segment_rule_rejects_short_clips() {
        for n in 0..6 {
            assert!(matches!(split_segments(n), Err(Error::ClipTooShort(_))), "n={n}");
        }
    }

    #[test]
    fn star_rgb_constant_clip_is_black() {
        let clip = constant_clip(9, Pixel::new(31.0, 17.0, 250.0));
        let star = encode_star_rgb(&clip, &EncodeConfig::star_rgb()).unwrap();
        for ch in star.channels() {
            assert!(ch.values().iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn star_rgb_middle_segment_isolation() {
        // motion only between frames 4..=6 (the middle segment of N=9)
        let frames: Vec<Frame> = (1..=9)
            .map(|k| {
                let v = match k {
                    4 => 10.0,
                    5 => 120.0,
                    6 => 40.0,
                    _ => 10.0,
                };
                Frame::constant(2, 2, Pixel::gray(v))
            })
            .collect();
        let clip = ClipSource::new(frames, "mid", None).unwrap();
        let star = encode_star_rgb(&clip, &EncodeConfig::star_rgb()).unwrap();
        assert!(star.r.values().iter().all(|v| *v == 0.0));
        assert!(star.b.values().iter().all(|v| *v == 0.0));
        assert!(star.g.values().iter().all(|v| *v > 0.0));
    }

    #[test]
    fn star_rgb_rejects_short_clip() {
        let clip = constant_clip(5, Pixel::default());
        assert!(matches!(
            encode_star_rgb(&clip, &EncodeConfig::star_rgb()),
            Err(Error::ClipTooShort(5))
        ));
    }

    #[test]
    fn boundary_pairs_are_dropped() {
        // N=6: segments [1,2][3,4][5,6]. A step between frames 2 and 3
        // (boundary pair) must not contribute to any channel.
        let values = [10.0, 10.0, 200.0, 200.0, 200.0, 200.0];
        let frames: Vec<Frame> = values
            .iter()
            .map(|v| Frame::constant(2, 2, Pixel::gray(*v)))
            .collect();
        let clip = ClipSource::new(frames, "step", None).unwrap();
        let star = encode_star_rgb(&clip, &EncodeConfig::star_rgb()).unwrap();
        for ch in star.channels() {
            assert!(ch.values().iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn sobel_of_constant_is_zero() {
        let m = Matrix::from_vec(4, 3, vec![7.5; 12]).unwrap();
        assert!(sobel_x(&m).values().iter().all(|v| *v == 0.0));
        assert!(sobel_y(&m).values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn sobel_of_horizontal_ramp() {
        // m(i,j) = j: interior horizontal gradient is 8 per Sobel (sum of
        // kernel column weights x step 1), vertical gradient 0. Replicated
        // borders halve the x response at the left/right edges.
        let m = Matrix::from_vec(5, 4, (0..20).map(|idx| (idx % 5) as f64).collect()).unwrap();
        let gx = sobel_x(&m);
        let gy = sobel_y(&m);
        for i in 0..4 {
            for j in 1..4 {
                assert_eq!(gx.get(i, j), 8.0, "interior ({i},{j})");
            }
            assert_eq!(gx.get(i, 0), 4.0);
            assert_eq!(gx.get(i, 4), 4.0);
        }
        assert!(gy.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn weighted_shadow_breaks_reversal_invariance() {
        let frames: Vec<Frame> = [0.0, 50.0, 10.0, 200.0, 90.0]
            .iter()
            .map(|v| Frame::constant(2, 2, Pixel::gray(*v)))
            .collect();
        let clip = ClipSource::new(frames, "nonpal", None).unwrap();
        let fwd = accumulate(&clip, Metric::AbsGray, true).unwrap();
        let rev = accumulate(&clip.reversed(), Metric::AbsGray, true).unwrap();
        let max_diff = fwd
            .values()
            .iter()
            .zip(rev.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(max_diff > 0.0);
    }
}
