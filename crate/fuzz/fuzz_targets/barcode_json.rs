#![no_main]

use eulerist::formats::{barcode_to_json, parse_barcode_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(b) = parse_barcode_json(text) {
        let again = parse_barcode_json(&barcode_to_json(&b)).expect("written barcode parses");
        assert_eq!(again, b);
    }
});
