//! Independent reference implementations used as test oracles. None of these
//! call into the library's numeric code.

#![allow(dead_code)]

/// LBP code by writing the bits as a binary string (neighbor 1 is the least
/// significant bit) and parsing it.
pub fn naive_lbp(center: u8, neighbors: &[u8; 8]) -> u32 {
    let bits: String = neighbors
        .iter()
        .rev()
        .map(|&v| if v >= center { '1' } else { '0' })
        .collect();
    u32::from_str_radix(&bits, 2).unwrap()
}

/// Texture unit number by writing the ternary digits as a base-3 string.
pub fn naive_ts(center: u8, neighbors: &[u8; 8]) -> u32 {
    let digits: String = neighbors
        .iter()
        .rev()
        .map(|&v| {
            if v < center {
                '0'
            } else if v == center {
                '1'
            } else {
                '2'
            }
        })
        .collect();
    u32::from_str_radix(&digits, 3).unwrap()
}

/// Explicit Legendre polynomials for n <= 4.
pub fn legendre_closed(n: usize, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        2 => (3.0 * x * x - 1.0) / 2.0,
        3 => (5.0 * x.powi(3) - 3.0 * x) / 2.0,
        4 => (35.0 * x.powi(4) - 30.0 * x * x + 3.0) / 8.0,
        _ => panic!("no closed form for n = {n}"),
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `P_n(x) = 2^-n Σ_k C(n,k)² (x-1)^(n-k) (x+1)^k`, valid for any n.
pub fn legendre_sum(n: usize, x: f64) -> f64 {
    let s: f64 = (0..=n)
        .map(|k| binomial(n, k).powi(2) * (x - 1.0).powi((n - k) as i32) * (x + 1.0).powi(k as i32))
        .sum();
    s / 2f64.powi(n as i32)
}

/// Direct four-deep loop over (p, q, i, j) with the coordinates written as
/// `2i/(N-1) - 1`. `f[j][i]` is row `j`, column `i`. Returns values in
/// ascending `p + q`, then ascending `p` order.
pub fn brute_moments(f: &[Vec<f64>], max_order: usize) -> Vec<f64> {
    let n = f.len();
    let coord = |i: usize| 2.0 * i as f64 / (n as f64 - 1.0) - 1.0;
    let mut out = Vec::new();
    for k in 0..=max_order {
        for p in 0..=k {
            let q = k - p;
            let mut sum = 0.0;
            for (j, row) in f.iter().enumerate() {
                for (i, &v) in row.iter().enumerate() {
                    sum += legendre_sum(p, coord(i)) * legendre_sum(q, coord(j)) * v;
                }
            }
            out.push((2 * p + 1) as f64 * (2 * q + 1) as f64 / (n * n) as f64 * sum);
        }
    }
    out
}

pub fn naive_euclidean(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..a.len() {
        s += (a[k] - b[k]).powi(2);
    }
    s.sqrt()
}

/// Deterministic generator for test fixtures (64-bit LCG, Knuth's MMIX constants).
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.0
    }

    pub fn byte(&mut self) -> u8 {
        (self.next_u64() >> 56) as u8
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}
