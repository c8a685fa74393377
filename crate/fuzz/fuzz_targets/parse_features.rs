#![no_main]

use libfuzzer_sys::fuzz_target;
use texclass::features::{parse_features, write_features};

fuzz_target!(|data: &[u8]| {
    let Ok(file) = parse_features(data) else {
        return;
    };
    for s in &file.samples {
        assert_eq!(s.features.values.len(), file.pipeline.dimension());
    }
    let mut buf = Vec::new();
    write_features(&mut buf, file.pipeline, &file.samples).unwrap();
    assert_eq!(parse_features(&buf).unwrap(), file);
});
