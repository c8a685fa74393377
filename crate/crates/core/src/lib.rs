//! Texture features for classification: local binary patterns, texture
//! spectra and Legendre moments, combined into six tile-level pipelines and
//! evaluated with a minimum-distance classifier.

pub mod classifier;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod features;
pub mod imageio;
pub mod moments;
pub mod operators;
pub mod pipelines;
pub mod synth;

pub use error::{Error, Result};
pub use imageio::GrayImage;
pub use pipelines::{extract, FeatureVector, PipelineKind};
