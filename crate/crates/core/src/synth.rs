//! Deterministic synthetic texture classes, a stand-in for a photographic
//! texture album when none is available.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::imageio::GrayImage;

pub const DEFAULT_SIZE: usize = 512;

const HIGH: u8 = 200;
const LOW: u8 = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SynthTexture {
    /// Vertical stripes, period 8.
    VerticalStripes,
    /// Horizontal stripes, period 8.
    HorizontalStripes,
    /// 2×2 cells alternating, period 4.
    Checkerboard,
    /// Mid-gray with 15% salt and 15% pepper.
    SaltAndPepper,
    /// Anti-diagonal stripes of period 8 riding on a brightness ramp.
    DiagonalGradientStripes,
}

impl SynthTexture {
    pub const ALL: [SynthTexture; 5] = [
        SynthTexture::Checkerboard,
        SynthTexture::DiagonalGradientStripes,
        SynthTexture::HorizontalStripes,
        SynthTexture::SaltAndPepper,
        SynthTexture::VerticalStripes,
    ];

    /// Directory name, which doubles as the class label.
    pub fn label(self) -> &'static str {
        match self {
            SynthTexture::VerticalStripes => "vertical",
            SynthTexture::HorizontalStripes => "horizontal",
            SynthTexture::Checkerboard => "checkerboard",
            SynthTexture::SaltAndPepper => "noise",
            SynthTexture::DiagonalGradientStripes => "diagonal",
        }
    }

    pub fn render(self, size: usize, seed: u64) -> Result<GrayImage> {
        let stripe = |t: usize| if t % 8 < 4 { HIGH } else { LOW };
        match self {
            SynthTexture::VerticalStripes => GrayImage::from_fn(size, size, |_, c| stripe(c)),
            SynthTexture::HorizontalStripes => GrayImage::from_fn(size, size, |r, _| stripe(r)),
            SynthTexture::Checkerboard => {
                GrayImage::from_fn(size, size, |r, c| if (r / 2 + c / 2) % 2 == 0 { HIGH } else { LOW })
            }
            SynthTexture::SaltAndPepper => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                GrayImage::from_fn(size, size, |_, _| match rng.random_range(0..100u32) {
                    0..15 => 0,
                    15..30 => 255,
                    _ => 128,
                })
            }
            SynthTexture::DiagonalGradientStripes => {
                let span = 2 * size.saturating_sub(1).max(1);
                GrayImage::from_fn(size, size, |r, c| {
                    let ramp = ((r + c) * 48 / span) as u8;
                    let base = if (r + c) % 8 < 4 { 150 } else { 40 };
                    base + ramp
                })
            }
        }
    }
}

/// Writes `<root>/<label>/<label>.pgm` for every texture in
/// [`SynthTexture::ALL`] and returns the written paths.
pub fn write_dataset(root: impl AsRef<Path>, size: usize, seed: u64) -> Result<Vec<PathBuf>> {
    let root = root.as_ref();
    let mut written = Vec::new();
    for texture in SynthTexture::ALL {
        let dir = root.join(texture.label());
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let path = dir.join(format!("{}.pgm", texture.label()));
        texture.render(size, seed)?.save(&path)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stripe_definition() {
        let img = SynthTexture::VerticalStripes.render(64, 0).unwrap();
        for r in [0, 17, 63] {
            for c in 0..64 {
                assert_eq!(img.get(r, c), if c % 8 < 4 { 200 } else { 50 });
            }
        }
        let h = SynthTexture::HorizontalStripes.render(64, 0).unwrap();
        assert_eq!(h.get(3, 9), 200);
        assert_eq!(h.get(4, 9), 50);
    }

    #[test]
    fn noise_is_seeded() {
        let a = SynthTexture::SaltAndPepper.render(64, 5).unwrap();
        let b = SynthTexture::SaltAndPepper.render(64, 5).unwrap();
        let c = SynthTexture::SaltAndPepper.render(64, 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.pixels().iter().all(|&p| p == 0 || p == 128 || p == 255));
    }

    #[test]
    fn labels_are_sorted() {
        let labels: Vec<_> = SynthTexture::ALL.iter().map(|t| t.label()).collect();
        let mut sorted = labels.clone();
        sorted.sort();
        assert_eq!(labels, sorted);
    }

    #[test]
    fn diagonal_stays_in_range() {
        let img = SynthTexture::DiagonalGradientStripes.render(512, 0).unwrap();
        assert_eq!(img.get(0, 0), 150);
        assert_eq!(img.get(511, 511), 40 + 48);
    }
}
