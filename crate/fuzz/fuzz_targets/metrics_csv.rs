#![no_main]

use libfuzzer_sys::fuzz_target;
use lrip::metrics::{read_metrics_csv, write_metrics_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = read_metrics_csv(data) {
        let mut out = Vec::new();
        write_metrics_csv(&rows, &mut out).expect("rows serialize");
        let again = read_metrics_csv(out.as_slice()).expect("written tables parse");
        assert_eq!(again.len(), rows.len());
    }
});
