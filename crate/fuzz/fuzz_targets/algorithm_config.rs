#![no_main]

use libfuzzer_sys::fuzz_target;
use lrip::moea::AlgorithmConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = AlgorithmConfig::from_json(text) {
        cfg.validate().expect("parsed configs are valid");
    }
});
