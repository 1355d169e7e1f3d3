#![no_main]

use libfuzzer_sys::fuzz_target;
use lrip::exact::lp::{parse_lp, to_lp_string};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(model) = parse_lp(text) {
        let again = parse_lp(&to_lp_string(&model, None)).expect("written models parse");
        assert_eq!(again.constraints.len(), model.constraints.len());
    }
});
