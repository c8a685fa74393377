use proptest::prelude::*;
use texclass::classifier::euclidean;
use texclass::operators::{transform, Operator};
use texclass::{extract, GrayImage, PipelineKind};

fn stripes(size: usize, vertical: bool, offset: usize) -> GrayImage {
    GrayImage::from_fn(size, size, |r, c| {
        let t = if vertical { c } else { r } + offset;
        if t % 8 < 4 { 200 } else { 50 }
    })
    .unwrap()
}

#[test]
fn lbpts_discriminates_stripe_orientation() {
    let v = extract(&stripes(64, true, 0), PipelineKind::Lbpts).unwrap();
    let h = extract(&stripes(64, false, 0), PipelineKind::Lbpts).unwrap();
    let d = euclidean(&v.values, &h.values).unwrap();
    assert!(d > 0.1, "orientation distance {d}");

    // Two disjoint crops of one 192-wide vertical-stripe image.
    let big = stripes(192, true, 0);
    let a = extract(&big.crop(0, 0, 64, 64).unwrap(), PipelineKind::Lbpts).unwrap();
    let b = extract(&big.crop(100, 128, 64, 64).unwrap(), PipelineKind::Lbpts).unwrap();
    let same = euclidean(&a.values, &b.values).unwrap();
    assert!(same < 0.01, "same-texture distance {same}");
}

#[test]
fn constant_tile_lm_closed_form() {
    let fv = extract(&GrayImage::constant(64, 64, 128).unwrap(), PipelineKind::Lm).unwrap();
    assert!((fv.values[0] - 128.0 / 255.0).abs() < 1e-9);
    assert!((fv.values[0] - 0.50196).abs() < 1e-5);
}

fn tile_strategy() -> impl Strategy<Value = GrayImage> {
    (5usize..24).prop_flat_map(|n| {
        proptest::collection::vec(any::<u8>(), n * n).prop_map(move |px| GrayImage::new(n, n, px).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dimensions_and_mass(tile in tile_strategy()) {
        for kind in PipelineKind::ALL {
            let fv = extract(&tile, kind).unwrap();
            prop_assert_eq!(fv.values.len(), kind.dimension());
            prop_assert!(fv.values.iter().all(|v| v.is_finite()));
            if kind.is_histogram() {
                prop_assert!((fv.values.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn deterministic(tile in tile_strategy()) {
        for kind in PipelineKind::ALL {
            let a = extract(&tile, kind).unwrap();
            let b = extract(&tile, kind).unwrap();
            prop_assert_eq!(a.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                            b.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn lbp_image_is_valid_gray_input(tile in tile_strategy()) {
        let lbp = transform(&tile, Operator::Lbp).unwrap();
        prop_assert!(lbp.codes().iter().all(|&c| c <= 255));
        let gray = lbp.to_gray().unwrap();
        let ts = transform(&gray, Operator::TextureSpectrum).unwrap();
        prop_assert_eq!((ts.width(), ts.height()), (tile.width() - 4, tile.height() - 4));
    }
}
