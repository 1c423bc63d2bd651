#![no_main]

use diamond_core::scalar::{parse_scalar, Color, Param, Scalar};
use libfuzzer_sys::fuzz_target;

// printing drops tag colors, which the strand context supplies
fn uncolored(s: &Scalar) -> Scalar {
    s.map_params(|p| match p.tag() {
        Some(t) => Param::tagged(p.name(), Color::unresolved(), t.position),
        None => p.clone(),
    })
}

fuzz_target!(|src: &str| {
    if src.len() > 256 {
        return;
    }
    if let Ok(s) = parse_scalar(src) {
        let back = parse_scalar(&s.to_string()).unwrap();
        assert_eq!(back, uncolored(&s));
    }
});
