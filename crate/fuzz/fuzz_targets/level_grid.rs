#![no_main]

use libfuzzer_sys::fuzz_target;
use lrip::doe::{LevelGrid, OrthogonalArray};
use lrip::moea::AlgorithmConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(grid) = LevelGrid::from_json(text) {
        let design = OrthogonalArray::for_factors(grid.factors.len()).expect("validated grids fit a design");
        let base = AlgorithmConfig::defaults(grid.algorithm);
        for row in &design.rows {
            let _ = grid.configure(&base, &row[..grid.factors.len()]);
        }
    }
});
