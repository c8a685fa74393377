//! Grayscale image I/O and tiling.
//!
//! Only the Netpbm graymap formats are handled: `P2` (ASCII) and `P5`
//! (binary). [`decode_pgm`] accepts any maxval up to 65535 so that code
//! images written by [`encode_pgm`] can be read back, while [`load_image`]
//! and [`decode_gray`] reject anything that is not 8-bit.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Smallest side an image may have and still contain one 3×3 neighborhood.
pub const MIN_OPERATOR_SIDE: usize = 3;

/// Default tile side used throughout the classification experiment.
pub const DEFAULT_TILE_SIZE: usize = 64;

/// Row-major 8-bit grayscale raster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions(format!(
                "{width}x{height} has no pixels"
            )));
        }
        let expected = width
            .checked_mul(height)
            .ok_or_else(|| Error::InvalidDimensions(format!("{width}x{height} overflows")))?;
        if pixels.len() != expected {
            return Err(Error::LengthMismatch {
                left: pixels.len(),
                right: expected,
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Builds an image by evaluating `f(row, col)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width.saturating_mul(height));
        for r in 0..height {
            for c in 0..width {
                pixels.push(f(r, c));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn constant(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.pixels[row * self.width..(row + 1) * self.width]
    }

    /// Copies the `width`×`height` window whose top-left corner is `(row, col)`.
    pub fn crop(&self, row: usize, col: usize, width: usize, height: usize) -> Result<Self> {
        if row + height > self.height || col + width > self.width {
            return Err(Error::InvalidDimensions(format!(
                "crop {width}x{height} at ({row},{col}) exceeds {}x{}",
                self.width, self.height
            )));
        }
        let mut pixels = Vec::with_capacity(width * height);
        for r in row..row + height {
            pixels.extend_from_slice(&self.row(r)[col..col + width]);
        }
        Self::new(width, height, pixels)
    }

    /// Binary `P5` encoding with maxval 255.
    pub fn to_pgm(&self) -> Vec<u8> {
        let samples: Vec<u16> = self.pixels.iter().map(|&p| u16::from(p)).collect();
        encode_pgm(self.width, self.height, 255, &samples)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_pgm()).map_err(|e| Error::io(path, e))
    }
}

/// A decoded graymap of arbitrary depth (maxval ≤ 65535).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u32,
    pub samples: Vec<u16>,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Reads an unsigned decimal token; `None` at end of input.
    fn number(&mut self, what: &str) -> Result<Option<u32>> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        let mut value: u32 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u32::from(b - b'0')))
                .ok_or_else(|| Error::MalformedHeader(format!("{what} is too large")))?;
            self.pos += 1;
        }
        if self.pos == start {
            return match self.bytes.get(self.pos) {
                None => Ok(None),
                Some(&b) => Err(Error::MalformedHeader(format!(
                    "expected {what}, found byte 0x{b:02x}"
                ))),
            };
        }
        if let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_whitespace() && b != b'#' {
                return Err(Error::MalformedHeader(format!(
                    "{what} followed by byte 0x{b:02x}"
                )));
            }
        }
        Ok(Some(value))
    }

    fn header_number(&mut self, what: &str) -> Result<u32> {
        self.number(what)?
            .ok_or_else(|| Error::MalformedHeader(format!("missing {what}")))
    }
}

/// Decodes a `P2` or `P5` graymap. Trailing bytes after the raster are ignored.
pub fn decode_pgm(bytes: &[u8]) -> Result<Pgm> {
    let magic = bytes
        .get(..2)
        .ok_or_else(|| Error::MalformedHeader("missing magic number".into()))?;
    let ascii = match magic {
        b"P2" => true,
        b"P5" => false,
        b"P1" | b"P4" => return Err(Error::UnsupportedFormat("bitmap (PBM) input".into())),
        b"P3" | b"P6" => {
            return Err(Error::UnsupportedFormat(
                "color (PPM) input; convert to grayscale first".into(),
            ))
        }
        b"P7" => return Err(Error::UnsupportedFormat("PAM input".into())),
        _ => return Err(Error::MalformedHeader("not a PGM file".into())),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    match bytes.get(2) {
        Some(b) if b.is_ascii_whitespace() || *b == b'#' => {}
        _ => return Err(Error::MalformedHeader("magic number not followed by whitespace".into())),
    }
    let width = cur.header_number("width")? as usize;
    let height = cur.header_number("height")? as usize;
    let maxval = cur.header_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::InvalidDimensions(format!("{width}x{height} has no pixels")));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::MalformedHeader(format!("maxval {maxval} outside 1..=65535")));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::InvalidDimensions(format!("{width}x{height} overflows")))?;

    let samples = if ascii {
        // Every ASCII sample needs at least one byte, so the input length bounds the allocation.
        let mut samples = Vec::with_capacity(count.min(bytes.len()));
        for _ in 0..count {
            let value = cur.number("sample")?.ok_or(Error::TruncatedPixels)?;
            if value > maxval {
                return Err(Error::SampleOutOfRange { value, maxval });
            }
            samples.push(value as u16);
        }
        samples
    } else {
        // Exactly one whitespace byte separates maxval from the raster.
        match bytes.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            _ => return Err(Error::TruncatedPixels),
        }
        let raster = &bytes[cur.pos..];
        let wide = maxval > 255;
        let needed = count
            .checked_mul(if wide { 2 } else { 1 })
            .ok_or_else(|| Error::InvalidDimensions(format!("{width}x{height} overflows")))?;
        if raster.len() < needed {
            return Err(Error::TruncatedPixels);
        }
        let samples: Vec<u16> = if wide {
            raster[..needed]
                .chunks_exact(2)
                .map(|pair| u16::from_be_bytes([pair[0], pair[1]]))
                .collect()
        } else {
            raster[..needed].iter().map(|&b| u16::from(b)).collect()
        };
        if let Some(&value) = samples.iter().find(|&&s| u32::from(s) > maxval) {
            return Err(Error::SampleOutOfRange {
                value: u32::from(value),
                maxval,
            });
        }
        samples
    };

    Ok(Pgm {
        width,
        height,
        maxval,
        samples,
    })
}

/// Decodes an 8-bit graymap into a [`GrayImage`].
pub fn decode_gray(bytes: &[u8]) -> Result<GrayImage> {
    let pgm = decode_pgm(bytes)?;
    if pgm.maxval > 255 {
        return Err(Error::MaxvalTooLarge(pgm.maxval));
    }
    let pixels = pgm.samples.into_iter().map(|s| s as u8).collect();
    GrayImage::new(pgm.width, pgm.height, pixels)
}

pub fn load_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_gray(&bytes)
}

/// Binary `P5` encoding; one byte per sample when `maxval < 256`, otherwise
/// two bytes big-endian, as Netpbm prescribes.
pub fn encode_pgm(width: usize, height: usize, maxval: u32, samples: &[u16]) -> Vec<u8> {
    let header = format!("P5\n{width} {height}\n{maxval}\n");
    let wide = maxval > 255;
    let mut out = Vec::with_capacity(header.len() + samples.len() * if wide { 2 } else { 1 });
    out.extend_from_slice(header.as_bytes());
    if wide {
        for &s in samples {
            out.extend_from_slice(&s.to_be_bytes());
        }
    } else {
        out.extend(samples.iter().map(|&s| s as u8));
    }
    out
}

/// Non-overlapping square tiles cut from one source image.
#[derive(Clone, Debug)]
pub struct TileSet {
    pub source_id: String,
    pub tile_size: usize,
    /// Row-major over the tile grid.
    pub tiles: Vec<GrayImage>,
}

impl TileSet {
    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }
}

/// Cuts `image` into `floor(w/ts) × floor(h/ts)` tiles in row-major order.
/// Partial tiles at the right and bottom edges are discarded.
pub fn tile(image: &GrayImage, tile_size: usize) -> Result<TileSet> {
    tile_with_id(image, tile_size, String::new())
}

pub fn tile_with_id(image: &GrayImage, tile_size: usize, source_id: String) -> Result<TileSet> {
    if tile_size < MIN_OPERATOR_SIDE {
        return Err(Error::InvalidTileSize {
            tile_size,
            reason: format!("must be at least {MIN_OPERATOR_SIDE}"),
        });
    }
    if tile_size > image.width() || tile_size > image.height() {
        return Err(Error::InvalidTileSize {
            tile_size,
            reason: format!("larger than the {}x{} image", image.width(), image.height()),
        });
    }
    let across = image.width() / tile_size;
    let down = image.height() / tile_size;
    let mut tiles = Vec::with_capacity(across * down);
    for tr in 0..down {
        for tc in 0..across {
            tiles.push(image.crop(tr * tile_size, tc * tile_size, tile_size, tile_size)?);
        }
    }
    Ok(TileSet {
        source_id,
        tile_size,
        tiles,
    })
}

/// One class directory of a dataset root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassDir {
    pub label: String,
    /// Sorted by file name.
    pub images: Vec<PathBuf>,
}

/// Dataset laid out as `<root>/<class_name>/<image>.pgm`. Classes are sorted
/// lexicographically; a class's index is its rank in that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    pub root: PathBuf,
    pub classes: Vec<ClassDir>,
}

impl Dataset {
    pub fn labels(&self) -> Vec<String> {
        self.classes.iter().map(|c| c.label.clone()).collect()
    }
}

fn is_pgm(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
}

pub fn scan_dataset(root: impl AsRef<Path>) -> Result<Dataset> {
    let root = root.as_ref();
    let entries = fs::read_dir(root).map_err(|e| Error::io(root, e))?;
    let mut classes = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(root, e))?;
        let path = entry.path();
        if !path.is_dir() {
            continue;
        }
        let Some(label) = path.file_name().and_then(|n| n.to_str()).map(str::to_owned) else {
            continue;
        };
        let mut images = Vec::new();
        for img in fs::read_dir(&path).map_err(|e| Error::io(&path, e))? {
            let img = img.map_err(|e| Error::io(&path, e))?.path();
            if img.is_file() && is_pgm(&img) {
                images.push(img);
            }
        }
        if images.is_empty() {
            continue;
        }
        images.sort();
        classes.push(ClassDir { label, images });
    }
    if classes.is_empty() {
        return Err(Error::InvalidDataset(format!(
            "no classes found under {}",
            root.display()
        )));
    }
    classes.sort_by(|a, b| a.label.cmp(&b.label));
    Ok(Dataset {
        root: root.to_path_buf(),
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decodes_ascii_2x2() {
        let img = decode_gray(b"P2\n# tiny\n2 2\n255\n0 255\n128 7\n").unwrap();
        assert_eq!((img.width(), img.height()), (2, 2));
        assert_eq!(img.pixels(), &[0, 255, 128, 7]);
    }

    #[test]
    fn decodes_binary_512() {
        let img = GrayImage::from_fn(512, 512, |r, c| ((r * 7 + c * 3) % 256) as u8).unwrap();
        let back = decode_gray(&img.to_pgm()).unwrap();
        assert_eq!((back.width(), back.height()), (512, 512));
        assert_eq!(back, img);
    }

    #[test]
    fn truncated_binary_payload() {
        let mut bytes = GrayImage::constant(8, 8, 9).unwrap().to_pgm();
        bytes.truncate(bytes.len() - 1);
        let err = decode_gray(&bytes).unwrap_err();
        assert_eq!(err.to_string(), "unexpected end of pixel data");
    }

    #[test]
    fn truncated_ascii_payload() {
        let err = decode_gray(b"P2 2 2 255 1 2 3").unwrap_err();
        assert!(matches!(err, Error::TruncatedPixels));
    }

    #[test]
    fn rejects_sixteen_bit_for_gray() {
        let bytes = encode_pgm(2, 1, 6560, &[0, 6560]);
        assert!(matches!(decode_gray(&bytes), Err(Error::MaxvalTooLarge(6560))));
        let raw = decode_pgm(&bytes).unwrap();
        assert_eq!(raw.samples, vec![0, 6560]);
    }

    #[test]
    fn rejects_color_and_garbage() {
        assert!(matches!(decode_pgm(b"P6\n1 1\n255\n\0\0\0"), Err(Error::UnsupportedFormat(_))));
        assert!(matches!(decode_pgm(b"GIF89a"), Err(Error::MalformedHeader(_))));
        assert!(matches!(decode_pgm(b"P5"), Err(Error::MalformedHeader(_))));
        assert!(matches!(decode_pgm(b"P5\n0 4\n255\n"), Err(Error::InvalidDimensions(_))));
        assert!(matches!(decode_pgm(b"P5\n4x4\n255\n"), Err(Error::MalformedHeader(_))));
    }

    #[test]
    fn sample_above_maxval() {
        let err = decode_pgm(b"P2 1 1 100 101").unwrap_err();
        assert!(matches!(err, Error::SampleOutOfRange { value: 101, maxval: 100 }));
    }

    #[test]
    fn huge_header_does_not_allocate() {
        let err = decode_pgm(b"P5\n4000000000 4000000000\n255\n\0").unwrap_err();
        assert!(matches!(err, Error::TruncatedPixels | Error::InvalidDimensions(_)));
    }

    #[test]
    fn tiles_512_into_64() {
        let img = GrayImage::constant(512, 512, 1).unwrap();
        assert_eq!(tile(&img, 64).unwrap().len(), 64);
    }

    #[test]
    fn identity_tiling() {
        let img = GrayImage::from_fn(64, 64, |r, c| (r ^ c) as u8).unwrap();
        let set = tile(&img, 64).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.tiles[0], img);
    }

    #[test]
    fn discards_trailing_strip() {
        let img = GrayImage::from_fn(130, 64, |_, c| c as u8).unwrap();
        let set = tile(&img, 64).unwrap();
        // floor(130/64) * floor(64/64)
        assert_eq!(set.len(), 2);
        assert_eq!(set.tiles[1].get(0, 0), 64);
    }

    #[test]
    fn tile_size_errors() {
        let img = GrayImage::constant(10, 10, 0).unwrap();
        assert!(matches!(tile(&img, 2), Err(Error::InvalidTileSize { .. })));
        assert!(matches!(tile(&img, 11), Err(Error::InvalidTileSize { .. })));
    }

    #[test]
    fn image_length_invariant() {
        assert!(GrayImage::new(3, 3, vec![0; 8]).is_err());
        assert!(GrayImage::new(0, 3, vec![]).is_err());
    }
}
