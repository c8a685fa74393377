//! 3×3 local texture operators and code-image histograms.
//!
//! Both operators compare the eight neighbors of a pixel against the pixel
//! itself. Neighbors are always visited in [`NEIGHBOR_ORDER`]; neighbor `i`
//! (zero-based here) contributes digit `i` of the resulting code.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::imageio::{encode_pgm, GrayImage, MIN_OPERATOR_SIDE};

/// `(row, col)` offsets of the eight neighbors, read row-major around the center.
pub const NEIGHBOR_ORDER: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

/// Identifies [`NEIGHBOR_ORDER`] and the interior-only border policy in stored features.
pub const CONVENTION_VERSION: &str = "lbp3x3-rowmajor-v1";

pub const LBP_ALPHABET: usize = 256;
pub const TS_ALPHABET: usize = 6561;

const POW3: [u16; 8] = [1, 3, 9, 27, 81, 243, 729, 2187];

/// Binary pattern: bit `i` is set when neighbor `i` is at least the center.
#[inline]
pub fn lbp_code(center: u8, neighbors: &[u8; 8]) -> u8 {
    neighbors
        .iter()
        .enumerate()
        .fold(0u8, |acc, (i, &v)| acc | (u8::from(v >= center) << i))
}

/// Texture unit number: base-3 digit `i` is 0, 1 or 2 as neighbor `i` is
/// below, equal to, or above the center.
#[inline]
pub fn texture_unit_code(center: u8, neighbors: &[u8; 8]) -> u16 {
    neighbors
        .iter()
        .zip(POW3)
        .map(|(&v, w)| {
            let digit = match v.cmp(&center) {
                std::cmp::Ordering::Less => 0,
                std::cmp::Ordering::Equal => 1,
                std::cmp::Ordering::Greater => 2,
            };
            digit * w
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operator {
    Lbp,
    TextureSpectrum,
}

impl Operator {
    pub fn alphabet(self) -> usize {
        match self {
            Operator::Lbp => LBP_ALPHABET,
            Operator::TextureSpectrum => TS_ALPHABET,
        }
    }

    #[inline]
    fn code(self, center: u8, neighbors: &[u8; 8]) -> u16 {
        match self {
            Operator::Lbp => u16::from(lbp_code(center, neighbors)),
            Operator::TextureSpectrum => texture_unit_code(center, neighbors),
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operator::Lbp => "lbp",
            Operator::TextureSpectrum => "ts",
        })
    }
}

impl FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lbp" => Ok(Operator::Lbp),
            "ts" => Ok(Operator::TextureSpectrum),
            _ => Err(Error::InvalidConfig(format!(
                "unknown operator {s:?} (expected lbp or ts)"
            ))),
        }
    }
}

/// Row-major grid of operator codes, two pixels smaller than its source in
/// each dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeImage {
    width: usize,
    height: usize,
    codes: Vec<u16>,
    alphabet: usize,
}

impl CodeImage {
    pub fn new(width: usize, height: usize, codes: Vec<u16>, alphabet: usize) -> Result<Self> {
        if width == 0 || height == 0 || codes.len() != width * height {
            return Err(Error::InvalidDimensions(format!(
                "{} codes for a {width}x{height} code image",
                codes.len()
            )));
        }
        if let Some(&bad) = codes.iter().find(|&&c| usize::from(c) >= alphabet) {
            return Err(Error::InvalidDimensions(format!(
                "code {bad} outside alphabet {alphabet}"
            )));
        }
        Ok(Self {
            width,
            height,
            codes,
            alphabet,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn codes(&self) -> &[u16] {
        &self.codes
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    /// Reinterprets an 8-bit code image (every code ≤ 255) as intensities.
    pub fn to_gray(&self) -> Result<GrayImage> {
        let pixels = self
            .codes
            .iter()
            .map(|&c| {
                u8::try_from(c).map_err(|_| {
                    Error::InvalidDimensions(format!("code {c} does not fit an 8-bit image"))
                })
            })
            .collect::<Result<Vec<u8>>>()?;
        GrayImage::new(self.width, self.height, pixels)
    }

    /// `P5` dump with maxval `alphabet - 1`.
    pub fn to_pgm(&self) -> Vec<u8> {
        encode_pgm(self.width, self.height, (self.alphabet - 1) as u32, &self.codes)
    }
}

/// Applies `op` at every interior pixel. No padding: the output is
/// `(w-2)×(h-2)`.
pub fn transform(image: &GrayImage, op: Operator) -> Result<CodeImage> {
    let (w, h) = (image.width(), image.height());
    if w < MIN_OPERATOR_SIDE || h < MIN_OPERATOR_SIDE {
        return Err(Error::InvalidDimensions(format!(
            "{w}x{h} is smaller than a 3x3 neighborhood"
        )));
    }
    let (ow, oh) = (w - 2, h - 2);
    let mut codes = Vec::with_capacity(ow * oh);
    for r in 1..h - 1 {
        let (above, here, below) = (image.row(r - 1), image.row(r), image.row(r + 1));
        for c in 1..w - 1 {
            let neighbors = [
                above[c - 1],
                above[c],
                above[c + 1],
                here[c - 1],
                here[c + 1],
                below[c - 1],
                below[c],
                below[c + 1],
            ];
            codes.push(op.code(here[c], &neighbors));
        }
    }
    Ok(CodeImage {
        width: ow,
        height: oh,
        codes,
        alphabet: op.alphabet(),
    })
}

/// Raw occurrence counts, one bin per code of the alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    bins: Vec<u64>,
    total: u64,
}

impl Histogram {
    pub fn from_bins(bins: Vec<u64>) -> Self {
        let total = bins.iter().sum();
        Self { bins, total }
    }

    pub fn bins(&self) -> &[u64] {
        &self.bins
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

pub fn histogram(code_image: &CodeImage) -> Histogram {
    let mut bins = vec![0u64; code_image.alphabet];
    for &c in &code_image.codes {
        bins[usize::from(c)] += 1;
    }
    Histogram {
        bins,
        total: code_image.codes.len() as u64,
    }
}

/// Relative frequencies `bins[k] / total`.
pub fn normalize(histogram: &Histogram) -> Result<Vec<f64>> {
    if histogram.total == 0 {
        return Err(Error::EmptyHistogram);
    }
    let total = histogram.total as f64;
    Ok(histogram.bins.iter().map(|&b| b as f64 / total).collect())
}
