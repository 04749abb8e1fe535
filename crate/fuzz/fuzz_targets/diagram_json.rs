#![no_main]

use eulerist::formats::{diagram_to_json, parse_diagram_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(d) = parse_diagram_json(text) {
        let again = parse_diagram_json(&diagram_to_json(&d)).expect("written diagram parses");
        assert_eq!(again, d);
    }
});
