//! Discrete Legendre moments of a square intensity grid.
//!
//! For an `N×N` grid `f(i, j)`, with `i` the column and `j` the row, the
//! moment of order `p + q` is
//!
//! ```text
//! L_pq = (2p+1)(2q+1)/N² · Σ_i Σ_j P_p(x_i) · P_q(y_j) · f(i, j)
//! x_i = 2i/(N-1) - 1,   y_j = 2j/(N-1) - 1
//! ```
//!
//! The double sum is accumulated over symmetry orbits of the grid (the four
//! mirror images of a quadrant cell, then transposed pairs) in a fixed order.
//! This keeps results deterministic and makes two identities hold bit-for-bit
//! instead of only approximately: every moment with odd `p` or odd `q` of a
//! constant grid is exactly zero, and transposing the grid swaps `L_pq` and
//! `L_qp` exactly.

use crate::error::{Error, Result};
use crate::imageio::GrayImage;
use crate::operators::CodeImage;

pub const DEFAULT_MAX_ORDER: usize = 10;

/// `P_n(x)` by the three-term recurrence.
pub fn legendre_poly(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = ((2 * k + 1) as f64 * x * cur - k as f64 * prev) / (k + 1) as f64;
        prev = cur;
        cur = next;
    }
    cur
}

/// `[P_0(x), ..., P_max(x)]`.
fn legendre_row(max_order: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_order + 1);
    out.push(1.0);
    if max_order >= 1 {
        out.push(x);
    }
    for k in 1..max_order {
        let next = ((2 * k + 1) as f64 * x * out[k] - k as f64 * out[k - 1]) / (k + 1) as f64;
        out.push(next);
    }
    out
}

/// Normalized coordinate of index `i` on an `n`-point grid, in `[-1, 1]`.
///
/// Computed as `(2i - (n-1)) / (n-1)` so that mirrored indices give exactly
/// negated coordinates.
pub fn grid_coordinate(i: usize, n: usize) -> f64 {
    let span = (n - 1) as f64;
    (2.0 * i as f64 - span) / span
}

/// Real-valued raster; row-major, `get(i, j)` is column `i` of row `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealImage {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl RealImage {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: width * height,
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDimensions("non-finite intensity".into()));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(width * height);
        for j in 0..height {
            for i in 0..width {
                values.push(f(i, j));
            }
        }
        Self::new(width, height, values)
    }

    /// Intensities divided by 255.
    pub fn from_gray(image: &GrayImage) -> Self {
        Self {
            width: image.width(),
            height: image.height(),
            values: image.pixels().iter().map(|&p| f64::from(p) / 255.0).collect(),
        }
    }

    /// Codes divided by `alphabet - 1`, so 255 for LBP and 6560 for texture units.
    pub fn from_codes(codes: &CodeImage) -> Self {
        let scale = (codes.alphabet() - 1) as f64;
        Self {
            width: codes.width(),
            height: codes.height(),
            values: codes.codes().iter().map(|&c| f64::from(c) / scale).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.width + i]
    }

    pub fn transpose(&self) -> Self {
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.width {
            for j in 0..self.height {
                values.push(self.get(i, j));
            }
        }
        Self {
            width: self.height,
            height: self.width,
            values,
        }
    }
}

/// All `L_pq` with `p + q <= max_order`.
///
/// Stored in feature order: ascending `p + q`, then ascending `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSet {
    max_order: usize,
    values: Vec<f64>,
}

impl MomentSet {
    pub fn len_for_order(max_order: usize) -> usize {
        (max_order + 1) * (max_order + 2) / 2
    }

    fn index(p: usize, q: usize) -> usize {
        let k = p + q;
        k * (k + 1) / 2 + p
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, p: usize, q: usize) -> Option<f64> {
        (p + q <= self.max_order).then(|| self.values[Self::index(p, q)])
    }

    /// `((p, q), L_pq)` in feature order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        (0..=self.max_order)
            .flat_map(|k| (0..=k).map(move |p| (p, k - p)))
            .zip(self.values.iter().copied())
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

pub fn moments(image: &RealImage, max_order: usize) -> Result<MomentSet> {
    let n = image.width();
    if image.height() != n {
        return Err(Error::InvalidDimensions(format!(
            "moments need a square grid, got {}x{}",
            image.width(),
            image.height()
        )));
    }
    if n < 2 {
        return Err(Error::InvalidDimensions(format!(
            "moments need at least a 2x2 grid, got {n}x{n}"
        )));
    }

    // weights[i][p] = P_p(x_i); the same table serves rows and columns.
    let weights: Vec<Vec<f64>> = (0..n)
        .map(|i| legendre_row(max_order, grid_coordinate(i, n)))
        .collect();
    let norm = (n * n) as f64;

    let mut values = Vec::with_capacity(MomentSet::len_for_order(max_order));
    for k in 0..=max_order {
        for p in 0..=k {
            let q = k - p;
            let sum = orbit_sum(image, &weights, p, q);
            values.push((2 * p + 1) as f64 * (2 * q + 1) as f64 / norm * sum);
        }
    }
    Ok(MomentSet { max_order, values })
}

fn orbit_sum(image: &RealImage, weights: &[Vec<f64>], p: usize, q: usize) -> f64 {
    let n = image.width();
    let half = n / 2;
    let term = |i: usize, j: usize| (weights[i][p] * weights[j][q]) * image.get(i, j);
    let mirror = |a: usize| n - 1 - a;
    let quad = |a: usize, b: usize| {
        let (ma, mb) = (mirror(a), mirror(b));
        (term(a, b) + term(ma, mb)) + (term(ma, b) + term(a, mb))
    };

    let mut sum = 0.0;
    for a in 0..half {
        sum += quad(a, a);
        for b in a + 1..half {
            sum += quad(a, b) + quad(b, a);
        }
    }
    if n % 2 == 1 {
        let c = half;
        for a in 0..half {
            let ma = mirror(a);
            sum += (term(a, c) + term(ma, c)) + (term(c, a) + term(c, ma));
        }
        sum += term(c, c);
    }
    sum
}

/// Moment values in feature order.
pub fn feature_vector(moment_set: &MomentSet) -> Vec<f64> {
    moment_set.values.clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_examples() {
        assert_eq!(legendre_poly(0, 0.7), 1.0);
        assert_eq!(legendre_poly(1, -0.25), -0.25);
        assert!((legendre_poly(2, 0.5) - (3.0 * 0.25 - 1.0) / 2.0).abs() < 1e-15);
        assert_eq!(legendre_poly(2, 0.5), -0.125);
    }

    #[test]
    fn row_matches_scalar() {
        let row = legendre_row(10, 0.3);
        for (n, v) in row.iter().enumerate() {
            assert_eq!(*v, legendre_poly(n, 0.3));
        }
        assert_eq!(legendre_row(0, 0.3), vec![1.0]);
    }

    #[test]
    fn constant_grid() {
        for n in [2, 3, 7, 64] {
            let img = RealImage::from_fn(n, n, |_, _| 0.5).unwrap();
            let m = moments(&img, 10).unwrap();
            assert!((m.get(0, 0).unwrap() - 0.5).abs() < 1e-12, "n={n}");
            for ((p, q), v) in m.iter() {
                if p % 2 == 1 || q % 2 == 1 {
                    assert_eq!(v, 0.0, "L_{p}{q} for n={n}");
                }
            }
        }
    }

    #[test]
    fn ramp_first_moment() {
        let n = 64;
        let img = RealImage::from_fn(n, n, |i, _| (grid_coordinate(i, n) + 1.0) / 2.0).unwrap();
        let m = moments(&img, 2).unwrap();
        assert!((m.get(1, 0).unwrap() - 65.0 / 126.0).abs() < 1e-12);
    }

    #[test]
    fn feature_order_and_length() {
        let img = RealImage::from_fn(4, 4, |i, j| (i * 4 + j) as f64 / 15.0).unwrap();
        assert_eq!(feature_vector(&moments(&img, 0).unwrap()).len(), 1);
        let m1 = moments(&img, 1).unwrap();
        assert_eq!(
            feature_vector(&m1),
            vec![m1.get(0, 0).unwrap(), m1.get(0, 1).unwrap(), m1.get(1, 0).unwrap()]
        );
        assert_eq!(feature_vector(&moments(&img, 10).unwrap()).len(), 66);
        assert_eq!(MomentSet::len_for_order(10), 66);
        assert_eq!(m1.get(2, 0), None);
    }

    #[test]
    fn constant_half_order_zero() {
        let img = RealImage::from_fn(9, 9, |_, _| 0.5).unwrap();
        let m = moments(&img, 0).unwrap();
        assert_eq!(feature_vector(&m).len(), 1);
        assert!((feature_vector(&m)[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_grids() {
        let rect = RealImage::from_fn(4, 3, |_, _| 0.0).unwrap();
        assert!(moments(&rect, 2).is_err());
        let tiny = RealImage::from_fn(1, 1, |_, _| 0.0).unwrap();
        assert!(moments(&tiny, 2).is_err());
        assert!(RealImage::new(1, 1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn code_rescaling() {
        let codes = CodeImage::new(2, 1, vec![0, 6560], 6561).unwrap();
        assert_eq!(RealImage::from_codes(&codes).values(), &[0.0, 1.0]);
        let gray = GrayImage::new(2, 1, vec![0, 255]).unwrap();
        assert_eq!(RealImage::from_gray(&gray).values(), &[0.0, 1.0]);
    }
}
