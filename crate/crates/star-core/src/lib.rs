//! Condense a dynamic-gesture video clip into a single image.
//!
//! A clip is reduced by summing a per-pixel distance over consecutive
//! frame pairs. The grayscale encoder accumulates weighted absolute
//! differences (optionally with Sobel gradient planes); the tri-segment
//! RGB encoder splits the clip into three consecutive sub-videos, runs a
//! cosine-scaled intensity distance over each, and maps the three
//! accumulations to the R, G and B channels so motion direction survives
//! the condensation.
//!
//! The crate also ships a standalone soft-attention fusion engine for
//! combining equal-length feature vectors, manifest-driven corpus
//! ingestion with deterministic augmentation, and bit-exact 8-bit /
//! float-sidecar export.
//!
//! ```
//! use star_core::{encode_star_rgb, ClipSource, EncodeConfig, Frame, Pixel};
//!
//! let frames: Vec<Frame> = (0..9)
//!     .map(|k| Frame::from_fn(8, 8, |i, j| Pixel::gray(((i + j + k) % 7) as f64 * 30.0)))
//!     .collect();
//! let clip = ClipSource::new(frames, "demo", None).unwrap();
//! let star = encode_star_rgb(&clip, &EncodeConfig::star_rgb()).unwrap();
//! assert_eq!(star.segment_bounds.first.len(), 3);
//! ```

pub mod corpus;
pub mod encoder;
pub mod error;
pub mod export;
pub mod fusion;
pub mod metrics;
pub mod model;

pub use encoder::{
    accumulate, encode_star_legacy, encode_star_rgb, split_segments, EncodeConfig, Normalization,
};
pub use error::{Error, Result};
pub use fusion::{fuse, score, softmax, standardize, FusionResult, ScorerParams};
pub use metrics::{abs_gray_diff, cosine_scaled_diff, euclidean_diff, DistanceBreakdown, Metric};
pub use model::{ClipSource, Frame, FrameRange, Matrix, Pixel, SegmentBounds, StarGray, StarRgb};
