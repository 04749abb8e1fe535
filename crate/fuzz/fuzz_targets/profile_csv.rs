#![no_main]

//! Input: a sidecar JSON document, a NUL byte, then the profile CSV.

use eulerist::formats::{parse_profile_csv, parse_profile_sidecar};
use libfuzzer_sys::fuzz_target;

/// Sidecars describing grids larger than this are skipped to keep runs fast.
const MAX_POINTS: usize = 1 << 16;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Some((json, csv)) = text.split_once('\0') else {
        return;
    };
    let Ok(sidecar) = parse_profile_sidecar(json) else {
        return;
    };
    let points = sidecar.shape.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
    if points.is_some_and(|p| p <= MAX_POINTS) {
        let _ = parse_profile_csv(csv, &sidecar);
    }
});
