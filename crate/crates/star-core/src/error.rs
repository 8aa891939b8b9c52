use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A clip needs at least one consecutive frame pair.
    #[error("clip needs at least 2 frames, got {0}")]
    TooFewFrames(usize),

    /// Tri-segment encoding needs one pair per segment.
    #[error("clip too short: {0} frames, tri-segment encoding needs at least 6")]
    ClipTooShort(usize),

    /// Frames within a clip (or matrices within an image) disagree on size.
    #[error("dimension mismatch: expected {expected_width}x{expected_height}, got {width}x{height}")]
    DimensionMismatch {
        expected_width: usize,
        expected_height: usize,
        width: usize,
        height: usize,
    },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Mismatched vector/matrix shapes in the fusion engine.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Manifest validation failure, pinned to its line number.
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },

    /// A manifest entry references a frame index the source does not have.
    #[error("missing frame {index} in {path}")]
    MissingFrame { index: usize, path: PathBuf },

    #[error("bad container {path}: {message}")]
    Container { path: PathBuf, message: String },

    #[error("crop window {crop_width}x{crop_height} exceeds frame {width}x{height}")]
    CropTooLarge {
        crop_width: usize,
        crop_height: usize,
        width: usize,
        height: usize,
    },

    #[error("malformed parameter file: {0}")]
    BadParams(String),

    #[error("unsupported sidecar: {0}")]
    BadSidecar(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("image codec error: {0}")]
    Image(#[from] image::ImageError),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for filesystem-level failures (as opposed to input validation).
    /// The CLI maps these to a distinct exit code.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::Image(image::ImageError::IoError(_)) => true,
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
