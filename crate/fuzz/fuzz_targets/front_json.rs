#![no_main]

use libfuzzer_sys::fuzz_target;
use lrip::front::Front;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(front) = Front::from_json(text) {
        front.validate().expect("parsed fronts are valid");
        assert_eq!(Front::from_json(&front.to_json()).expect("round trip"), front);
    }
});
