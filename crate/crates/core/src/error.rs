use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("maxval {0} exceeds 255; only 8-bit grayscale input is accepted")]
    MaxvalTooLarge(u32),

    #[error("unexpected end of pixel data")]
    TruncatedPixels,

    #[error("pixel value {value} exceeds maxval {maxval}")]
    SampleOutOfRange { value: u32, maxval: u32 },

    #[error("invalid image dimensions: {0}")]
    InvalidDimensions(String),

    #[error("invalid tile size {tile_size}: {reason}")]
    InvalidTileSize { tile_size: usize, reason: String },

    #[error("empty histogram cannot be normalized")]
    EmptyHistogram,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("mixed pipelines: expected {expected}, found {found}")]
    MixedPipelines { expected: String, found: String },

    #[error("unknown pipeline {0:?}")]
    UnknownPipeline(String),

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("no prototypes to classify against")]
    NoPrototypes,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("malformed feature file (line {line}): {reason}")]
    MalformedFeatures { line: usize, reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("failed to serialize report: {0}")]
    Serialize(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
