#![no_main]

use diamond_core::ms::{evaluate, Permutation};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|src: &str| {
    if let Ok(w) = src.parse::<Permutation>() {
        assert_eq!(evaluate(&w.reduced_expression()), w);
    }
});
