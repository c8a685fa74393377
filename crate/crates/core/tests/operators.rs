mod common;

use common::{naive_lbp, naive_ts};
use proptest::prelude::*;
use texclass::operators::{histogram, lbp_code, texture_unit_code, transform, Operator, NEIGHBOR_ORDER};
use texclass::GrayImage;

#[test]
fn frozen_mixed_neighborhood() {
    // Values computed by the string-based oracles, then frozen.
    let neighbors = [6, 2, 8, 5, 7, 1, 9, 4];
    assert_eq!(naive_lbp(5, &neighbors), 93);
    assert_eq!(naive_ts(5, &neighbors), 1667);
    assert_eq!(u32::from(lbp_code(5, &neighbors)), 93);
    assert_eq!(u32::from(texture_unit_code(5, &neighbors)), 1667);
}

#[test]
fn neighbor_order_is_row_major() {
    let mut sorted = NEIGHBOR_ORDER;
    sorted.sort();
    assert_eq!(sorted, NEIGHBOR_ORDER);
    assert!(!NEIGHBOR_ORDER.contains(&(0, 0)));
}

fn image_strategy() -> impl Strategy<Value = GrayImage> {
    (3usize..20, 3usize..20).prop_flat_map(|(w, h)| {
        proptest::collection::vec(any::<u8>(), w * h).prop_map(move |px| GrayImage::new(w, h, px).unwrap())
    })
}

fn neighborhood(img: &GrayImage, r: usize, c: usize) -> [u8; 8] {
    NEIGHBOR_ORDER.map(|(dr, dc)| img.get((r as isize + dr) as usize, (c as isize + dc) as usize))
}

proptest! {
    #[test]
    fn codes_match_oracles(center in any::<u8>(), neighbors in any::<[u8; 8]>()) {
        prop_assert_eq!(u32::from(lbp_code(center, &neighbors)), naive_lbp(center, &neighbors));
        prop_assert_eq!(u32::from(texture_unit_code(center, &neighbors)), naive_ts(center, &neighbors));
    }

    #[test]
    fn lbp_bit_iff_ts_digit_nonzero(center in any::<u8>(), neighbors in any::<[u8; 8]>()) {
        let lbp = lbp_code(center, &neighbors);
        let mut ts = texture_unit_code(center, &neighbors);
        for i in 0..8 {
            let digit = ts % 3;
            ts /= 3;
            prop_assert_eq!((lbp >> i) & 1 == 1, digit >= 1);
        }
    }

    #[test]
    fn transform_matches_per_pixel_codes(img in image_strategy()) {
        let lbp = transform(&img, Operator::Lbp).unwrap();
        let ts = transform(&img, Operator::TextureSpectrum).unwrap();
        prop_assert_eq!((lbp.width(), lbp.height()), (img.width() - 2, img.height() - 2));
        for r in 1..img.height() - 1 {
            for c in 1..img.width() - 1 {
                let n = neighborhood(&img, r, c);
                let k = (r - 1) * lbp.width() + (c - 1);
                prop_assert_eq!(u32::from(lbp.codes()[k]), naive_lbp(img.get(r, c), &n));
                prop_assert_eq!(u32::from(ts.codes()[k]), naive_ts(img.get(r, c), &n));
            }
        }
        prop_assert!(lbp.codes().iter().all(|&c| c <= 255));
        prop_assert!(ts.codes().iter().all(|&c| c <= 6560));
    }

    #[test]
    fn shift_invariance(img in image_strategy(), shift in 0u8..=255) {
        let max = *img.pixels().iter().max().unwrap();
        let k = shift.min(255 - max);
        let shifted = GrayImage::new(img.width(), img.height(), img.pixels().iter().map(|p| p + k).collect()).unwrap();
        for op in [Operator::Lbp, Operator::TextureSpectrum] {
            prop_assert_eq!(transform(&img, op).unwrap(), transform(&shifted, op).unwrap());
        }
    }

    #[test]
    fn histogram_mass(img in image_strategy()) {
        for op in [Operator::Lbp, Operator::TextureSpectrum] {
            let h = histogram(&transform(&img, op).unwrap());
            let interior = ((img.width() - 2) * (img.height() - 2)) as u64;
            prop_assert_eq!(h.total(), interior);
            prop_assert_eq!(h.bins().iter().sum::<u64>(), interior);
            prop_assert_eq!(h.bins().len(), op.alphabet());
        }
    }
}

#[test]
fn thousand_random_neighborhoods() {
    let mut rng = common::Lcg(0x5eed);
    for _ in 0..1000 {
        let center = rng.byte() % 8;
        let neighbors: [u8; 8] = std::array::from_fn(|_| rng.byte() % 8);
        assert_eq!(u32::from(lbp_code(center, &neighbors)), naive_lbp(center, &neighbors));
        assert_eq!(u32::from(texture_unit_code(center, &neighbors)), naive_ts(center, &neighbors));
    }
}

#[test]
fn code_image_pgm_export() {
    let img = GrayImage::from_fn(10, 10, |r, c| ((r * 13) ^ (c * 7)) as u8).unwrap();
    let ts = transform(&img, Operator::TextureSpectrum).unwrap();
    let pgm = texclass::imageio::decode_pgm(&ts.to_pgm()).unwrap();
    assert_eq!(pgm.maxval, 6560);
    assert_eq!((pgm.width, pgm.height), (8, 8));
    assert_eq!(pgm.samples, ts.codes());

    let lbp = transform(&img, Operator::Lbp).unwrap();
    let back = texclass::imageio::decode_gray(&lbp.to_pgm()).unwrap();
    assert_eq!(back, lbp.to_gray().unwrap());
}
