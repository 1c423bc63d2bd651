#![no_main]

use diamond_core::presentation::{parse_presentation, PresentationFile};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|src: &str| {
    let Ok(p) = parse_presentation(src) else {
        return;
    };
    let again = PresentationFile::parse(&p.file.to_toml().unwrap()).unwrap();
    assert_eq!(again, p.file);
});
