#![no_main]

use diamond_core::hecke::parse_decorated_raw;
use diamond_core::presentation::{preset, System};
use diamond_core::scalar::Color;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|src: &str| {
    if src.len() > 256 || parse_decorated_raw(src).is_err() {
        return;
    }
    let System::Hecke(p) = preset("nilhecke").unwrap().system else {
        unreachable!()
    };
    let _ = p.parse_decorated(&vec![Color::new("i"); 3], src);
});
