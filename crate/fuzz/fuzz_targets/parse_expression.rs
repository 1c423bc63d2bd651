#![no_main]

use diamond_core::ms::{sink, Expression};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|src: &str| {
    let Ok(e) = Expression::parse_auto(src, 1) else {
        return;
    };
    if !e.is_empty() {
        assert_eq!(Expression::parse(e.n(), &e.to_string()).unwrap(), e);
    }
    if e.len() <= 12 {
        let _ = sink(&e, 10_000);
    }
});
