#![no_main]

use eulerist::formats::parse_profile_sidecar;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(sidecar) = parse_profile_sidecar(text) {
        let again = parse_profile_sidecar(&sidecar.to_json()).expect("written sidecar parses");
        assert_eq!(again, sidecar);
    }
});
