#![no_main]

use libfuzzer_sys::fuzz_target;
use texclass::imageio::{decode_gray, decode_pgm, encode_pgm};

fuzz_target!(|data: &[u8]| {
    if let Ok(pgm) = decode_pgm(data) {
        assert_eq!(pgm.samples.len(), pgm.width * pgm.height);
        assert!(pgm.samples.iter().all(|&s| u32::from(s) <= pgm.maxval));
        // Re-encoding as P5 must decode to the same raster.
        let again = decode_pgm(&encode_pgm(pgm.width, pgm.height, pgm.maxval, &pgm.samples)).unwrap();
        assert_eq!(again, pgm);
    }
    if let Ok(img) = decode_gray(data) {
        assert_eq!(decode_gray(&img.to_pgm()).unwrap(), img);
    }
});
