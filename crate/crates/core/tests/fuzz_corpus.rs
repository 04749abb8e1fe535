//! Replays the checked-in fuzz seeds through the parsers, so regressions
//! show up without a fuzzing toolchain.

use std::fs;
use std::path::PathBuf;

use eulerist::formats::*;
use eulerist::transforms::PrimitiveKernel;

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .filter_map(|p| Some((p.clone(), String::from_utf8(fs::read(&p).ok()?).ok()?)))
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn filtration_text() {
    for (_, text) in seeds("filtration_text") {
        if let Ok(f) = parse_filtration(&text) {
            assert_eq!(parse_filtration(&write_filtration(&f)).unwrap(), f);
        }
    }
}

#[test]
fn point_clouds_and_graphs() {
    for (_, text) in seeds("point_cloud_csv") {
        if let Ok(c) = parse_point_cloud_csv(&text, None) {
            let again = parse_point_cloud_csv(&write_point_cloud_csv(&c), Some(false)).unwrap();
            assert_eq!(again.coords(), c.coords());
        }
    }
    for (path, text) in seeds("edge_list") {
        let parsed = parse_edge_list(&text);
        if path.ends_with("huge_vertex_id") {
            assert!(matches!(parsed, Err(eulerist::Error::TooLarge(_))));
        }
    }
    for (_, text) in seeds("attribute_csv") {
        let _ = parse_attribute_csv(&text);
    }
}

#[test]
fn profiles() {
    for (_, text) in seeds("profile_sidecar") {
        let s = parse_profile_sidecar(&text).unwrap();
        assert_eq!(parse_profile_sidecar(&s.to_json()).unwrap(), s);
    }
    for (_, text) in seeds("profile_csv") {
        let (json, csv) = text.split_once('\0').unwrap();
        let sidecar = parse_profile_sidecar(json).unwrap();
        parse_profile_csv(csv, &sidecar).unwrap();
    }
}

#[test]
fn diagrams_barcodes_kernels() {
    for (_, text) in seeds("diagram_json") {
        let d = parse_diagram_json(&text).unwrap();
        assert_eq!(parse_diagram_json(&diagram_to_json(&d)).unwrap(), d);
    }
    for (_, text) in seeds("barcode_json") {
        let b = parse_barcode_json(&text).unwrap();
        assert_eq!(parse_barcode_json(&barcode_to_json(&b)).unwrap(), b);
    }
    for (_, text) in seeds("kernel_spec") {
        text.parse::<PrimitiveKernel>().unwrap();
    }
}
