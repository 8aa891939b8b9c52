use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use star_core::{EncodeConfig, Metric, Normalization};

use crate::error::{CliError, CliResult};

/// Condense dynamic-gesture clips into single star / star RGB images.
///
/// Machine-readable one-line JSON summaries go to standard output;
/// human diagnostics go to standard error (verbosity via STAR_LOG).
#[derive(Parser, Debug)]
#[command(name = "star", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Encode one clip to a PNG plus a float sidecar.
    Encode(EncodeArgs),
    /// Encode every manifest entry in parallel and write a report.
    Batch(BatchArgs),
    /// Materialize per-gesture frame directories from manifest entries.
    Segment(SegmentArgs),
    /// Compare two images (or float sidecars) and write a difference image.
    Compare(CompareArgs),
    /// Fuse feature vectors with the soft-attention scorer.
    Fuse(FuseArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricArg {
    AbsGray,
    Euclidean,
    Cosine,
}

impl From<MetricArg> for Metric {
    fn from(arg: MetricArg) -> Metric {
        match arg {
            MetricArg::AbsGray => Metric::AbsGray,
            MetricArg::Euclidean => Metric::Euclidean,
            MetricArg::Cosine => Metric::CosineScaled,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalizeArg {
    Global,
    PerChannel,
    None,
}

impl From<NormalizeArg> for Normalization {
    fn from(arg: NormalizeArg) -> Normalization {
        match arg {
            NormalizeArg::Global => Normalization::GlobalMax,
            NormalizeArg::PerChannel => Normalization::PerChannelMax,
            NormalizeArg::None => Normalization::None,
        }
    }
}

/// Encoder flags shared by `encode` and `batch`.
#[derive(Args, Clone, Debug)]
pub struct EncodeOpts {
    /// Tri-segment star RGB encoding (the default).
    #[arg(long, conflicts_with = "legacy")]
    pub star_rgb: bool,

    /// Single-channel grayscale encoding (abs-gray by default).
    #[arg(long)]
    pub legacy: bool,

    /// Per-pair distance; defaults to cosine for star RGB, abs-gray for legacy.
    #[arg(long, value_enum)]
    pub metric: Option<MetricArg>,

    /// Weight the k-th difference by k/N (legacy mode only).
    #[arg(long)]
    pub weighted_shadow: bool,

    /// Emit Sobel gradient planes of the accumulation (legacy mode only).
    #[arg(long)]
    pub sobel: bool,

    /// Export normalization.
    #[arg(long, value_enum, default_value = "global")]
    pub normalize: NormalizeArg,
}

/// Which encoder a resolved configuration drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EncodeMode {
    StarRgb,
    Legacy,
}

impl EncodeOpts {
    pub fn resolve(&self) -> CliResult<(EncodeMode, EncodeConfig)> {
        let mode = if self.legacy {
            EncodeMode::Legacy
        } else {
            EncodeMode::StarRgb
        };
        let metric: Metric = match (self.metric, mode) {
            (Some(m), _) => m.into(),
            (None, EncodeMode::Legacy) => Metric::AbsGray,
            (None, EncodeMode::StarRgb) => Metric::CosineScaled,
        };
        if mode == EncodeMode::StarRgb && (self.weighted_shadow || self.sobel) {
            return Err(CliError::input(
                "--weighted-shadow and --sobel apply to --legacy encoding only",
            ));
        }
        let config = EncodeConfig::new(
            metric,
            self.weighted_shadow,
            self.sobel,
            self.normalize.into(),
        )?;
        Ok((mode, config))
    }
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    /// Frame directory or raw container; omit when using --manifest.
    pub source: Option<PathBuf>,

    /// Take the clip from a manifest entry instead of a bare source.
    #[arg(long, requires = "clip_id")]
    pub manifest: Option<PathBuf>,

    /// Entry to pick from the manifest, or an id override for SOURCE.
    #[arg(long)]
    pub clip_id: Option<String>,

    /// First frame, 1-based inclusive (bare SOURCE only).
    #[arg(long)]
    pub start: Option<usize>,

    /// Last frame, 1-based inclusive (bare SOURCE only).
    #[arg(long)]
    pub end: Option<usize>,

    #[command(flatten)]
    pub encode: EncodeOpts,

    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BatchArgs {
    /// JSON-Lines manifest of clips to encode.
    #[arg(long)]
    pub manifest: PathBuf,

    #[command(flatten)]
    pub encode: EncodeOpts,

    /// Worker count (defaults to the number of cores).
    #[arg(long)]
    pub jobs: Option<usize>,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SegmentArgs {
    /// JSON-Lines manifest of gestures to cut out.
    #[arg(long)]
    pub manifest: PathBuf,

    /// Output directory; one frame directory per clip plus a rewritten manifest.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// First image: PNG or float sidecar.
    pub image_a: PathBuf,

    /// Second image: PNG or float sidecar.
    pub image_b: PathBuf,

    /// Output directory for the difference artifacts.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct FuseArgs {
    /// Feature vector files (JSON arrays of numbers), at least two.
    #[arg(required = true, num_args = 2..)]
    pub vectors: Vec<PathBuf>,

    /// Scorer parameter file; omitted: a seeded initializer is used.
    #[arg(long)]
    pub params: Option<PathBuf>,

    /// Seed for the scorer initializer when --params is omitted.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output directory for the fused-vector sidecar.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}
