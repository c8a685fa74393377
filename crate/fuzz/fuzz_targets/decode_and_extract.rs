#![no_main]

use libfuzzer_sys::fuzz_target;
use texclass::imageio::{decode_gray, tile};
use texclass::{extract, PipelineKind};

fuzz_target!(|data: &[u8]| {
    let Ok(img) = decode_gray(data) else {
        return;
    };
    // Bound the work per input; large rasters add no new paths.
    if img.width() * img.height() > 64 * 64 {
        return;
    }
    let side = img.width().min(img.height());
    let Ok(tiles) = tile(&img, side) else {
        return;
    };
    for t in &tiles.tiles {
        for kind in PipelineKind::ALL {
            match extract(t, kind) {
                Ok(fv) => assert_eq!(fv.values.len(), kind.dimension()),
                Err(_) => assert!(side < 5),
            }
        }
    }
});
