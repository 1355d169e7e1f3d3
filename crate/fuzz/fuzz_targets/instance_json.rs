#![no_main]

use libfuzzer_sys::fuzz_target;
use lrip::instance::Instance;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(inst) = Instance::from_json(text) {
        inst.validate().expect("parsed instances are valid");
        assert_eq!(Instance::from_json(&inst.to_json()).expect("round trip"), inst);
    }
});
