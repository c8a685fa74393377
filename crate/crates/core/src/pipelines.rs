//! The six tile-to-feature pipelines compared in the classification experiment.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imageio::GrayImage;
use crate::moments::{self, MomentSet, RealImage, DEFAULT_MAX_ORDER};
use crate::operators::{self, Operator, CONVENTION_VERSION, LBP_ALPHABET, TS_ALPHABET};

/// Smallest tile that survives two successive 3×3 passes (needed by LBPTS).
pub const MIN_TILE_SIDE: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PipelineKind {
    /// Legendre moments of the gray tile.
    #[serde(rename = "LM")]
    Lm,
    /// Normalized LBP histogram.
    #[serde(rename = "LBP")]
    Lbp,
    /// Normalized texture spectrum.
    #[serde(rename = "TS")]
    Ts,
    /// Legendre moments of the texture-unit image.
    #[serde(rename = "TSLM")]
    Tslm,
    /// Legendre moments of the LBP image.
    #[serde(rename = "LBPLM")]
    Lbplm,
    /// Texture spectrum of the LBP image.
    #[serde(rename = "LBPTS")]
    Lbpts,
}

impl PipelineKind {
    /// Table order.
    pub const ALL: [PipelineKind; 6] = [
        PipelineKind::Lm,
        PipelineKind::Lbp,
        PipelineKind::Ts,
        PipelineKind::Tslm,
        PipelineKind::Lbplm,
        PipelineKind::Lbpts,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PipelineKind::Lm => "LM",
            PipelineKind::Lbp => "LBP",
            PipelineKind::Ts => "TS",
            PipelineKind::Tslm => "TSLM",
            PipelineKind::Lbplm => "LBPLM",
            PipelineKind::Lbpts => "LBPTS",
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            PipelineKind::Lm | PipelineKind::Tslm | PipelineKind::Lbplm => {
                MomentSet::len_for_order(DEFAULT_MAX_ORDER)
            }
            PipelineKind::Lbp => LBP_ALPHABET,
            PipelineKind::Ts | PipelineKind::Lbpts => TS_ALPHABET,
        }
    }

    /// Whether the vector is a normalized histogram (sums to 1).
    pub fn is_histogram(self) -> bool {
        matches!(self, PipelineKind::Lbp | PipelineKind::Ts | PipelineKind::Lbpts)
    }
}

impl fmt::Display for PipelineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PipelineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PipelineKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownPipeline(s.to_owned()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub pipeline: PipelineKind,
    pub values: Vec<f64>,
    pub convention_version: &'static str,
}

impl FeatureVector {
    pub fn new(pipeline: PipelineKind, values: Vec<f64>) -> Result<Self> {
        if values.len() != pipeline.dimension() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: pipeline.dimension(),
            });
        }
        Ok(Self {
            pipeline,
            values,
            convention_version: CONVENTION_VERSION,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn spectrum(image: &GrayImage, op: Operator) -> Result<Vec<f64>> {
    operators::normalize(&operators::histogram(&operators::transform(image, op)?))
}

fn moment_features(grid: &RealImage) -> Result<Vec<f64>> {
    Ok(moments::feature_vector(&moments::moments(grid, DEFAULT_MAX_ORDER)?))
}

pub fn extract(tile: &GrayImage, kind: PipelineKind) -> Result<FeatureVector> {
    if tile.width() != tile.height() || tile.width() < MIN_TILE_SIDE {
        return Err(Error::InvalidDimensions(format!(
            "pipelines need a square tile of side >= {MIN_TILE_SIDE}, got {}x{}",
            tile.width(),
            tile.height()
        )));
    }
    let values = match kind {
        PipelineKind::Lm => moment_features(&RealImage::from_gray(tile))?,
        PipelineKind::Lbp => spectrum(tile, Operator::Lbp)?,
        PipelineKind::Ts => spectrum(tile, Operator::TextureSpectrum)?,
        PipelineKind::Tslm => {
            let codes = operators::transform(tile, Operator::TextureSpectrum)?;
            moment_features(&RealImage::from_codes(&codes))?
        }
        PipelineKind::Lbplm => {
            let codes = operators::transform(tile, Operator::Lbp)?;
            moment_features(&RealImage::from_codes(&codes))?
        }
        PipelineKind::Lbpts => {
            // LBP codes are at most 255, so the code image is already a valid gray image.
            let lbp = operators::transform(tile, Operator::Lbp)?.to_gray()?;
            spectrum(&lbp, Operator::TextureSpectrum)?
        }
    };
    FeatureVector::new(kind, values)
}
