#![no_main]

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use lrip::decoder::{decode, validate_plan, Chromosome, DecodeOptions};
use lrip::evaluation::evaluate;
use lrip::instance::{Instance, SizeSpec};

const SIZE: SizeSpec = SizeSpec::new(3, 5, 3, 3);

fn instance() -> &'static Instance {
    static INSTANCE: OnceLock<Instance> = OnceLock::new();
    INSTANCE.get_or_init(|| Instance::generate(SIZE, 1).expect("generated"))
}

fuzz_target!(|data: &[u8]| {
    // Two bytes per key, mapped into the open unit interval.
    let keys: Vec<f64> = data
        .chunks_exact(2)
        .map(|c| (f64::from(u16::from_le_bytes([c[0], c[1]])) + 0.5) / 65536.0)
        .collect();
    let Ok(chromosome) = Chromosome::new(keys, SIZE) else { return };
    let inst = instance();
    let plan = decode(&chromosome, inst, &DecodeOptions::new(4));
    if plan.is_feasible() {
        validate_plan(&plan, inst).expect("feasible plans validate");
    }
    let z = evaluate(&plan, inst).expect("decoded plans evaluate");
    assert!(z.z1.is_finite() && z.z2.is_finite());
});
