#![no_main]

use eulerist::transforms::PrimitiveKernel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(k) = text.parse::<PrimitiveKernel>() {
        let again: PrimitiveKernel = k.spec_string().parse().expect("spec string parses");
        assert_eq!(again.spec_string(), k.spec_string());
        let _ = k.eval(1.0);
    }
});
