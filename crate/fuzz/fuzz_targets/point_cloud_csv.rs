#![no_main]

use eulerist::formats::{parse_point_cloud_csv, write_point_cloud_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for header in [None, Some(true), Some(false)] {
        if let Ok(cloud) = parse_point_cloud_csv(text, header) {
            let again = parse_point_cloud_csv(&write_point_cloud_csv(&cloud), Some(false))
                .expect("written cloud parses");
            assert_eq!(again.coords(), cloud.coords());
        }
    }
});
