//! Text formats written by the library parse back to the same objects.

mod common;

use common::random_filtration;
use eulerist::euler::{compute_ecp, GridSpec};
use eulerist::formats::{
    barcode_to_json, diagram_to_json, parse_barcode_json, parse_diagram_json, parse_filtration,
    parse_profile_csv, parse_profile_sidecar, write_filtration, write_profile_csv, ProfileKind,
    ProfileSidecar,
};
use eulerist::persistence::reduce;
use eulerist::signed::signed_barcode;
use eulerist::transforms::{hybrid_transform, DualGridSpec, PrimitiveKernel};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn filtration_text(seed in any::<u64>(), m in 1usize..=3) {
        let f = random_filtration(seed, m);
        prop_assert_eq!(parse_filtration(&write_filtration(&f)).unwrap(), f);
    }

    #[test]
    fn diagram_json(seed in any::<u64>()) {
        let d = reduce(&random_filtration(seed, 1)).unwrap();
        prop_assert_eq!(parse_diagram_json(&diagram_to_json(&d)).unwrap(), d);
    }

    #[test]
    fn barcode_json(seed in any::<u64>(), m in 1usize..=3) {
        let b = signed_barcode(&random_filtration(seed, m));
        prop_assert_eq!(parse_barcode_json(&barcode_to_json(&b)).unwrap(), b);
    }

    #[test]
    fn ecp_profile_csv(seed in any::<u64>(), m in 1usize..=2) {
        let f = random_filtration(seed, m);
        let spec = GridSpec::from_bounds(&vec![(0.0, 4.0); m], &vec![9; m]).unwrap();
        let ecp = compute_ecp(&f, &spec).unwrap();
        let sidecar = parse_profile_sidecar(&ProfileSidecar::for_grid(&spec, ProfileKind::Ecp).to_json()).unwrap();
        let back = parse_profile_csv(&write_profile_csv(&ecp), &sidecar).unwrap();
        prop_assert_eq!(back.data, ecp.data.iter().map(|&x| x as f64).collect::<Vec<_>>());
    }
}

#[test]
fn transform_profile_csv_is_exact() {
    let f = random_filtration(3, 2);
    let spec = DualGridSpec::from_bounds(&[(0.0, 1.3), (0.0, 0.7)], &[7, 5]).unwrap();
    let ht = hybrid_transform(&f, &PrimitiveKernel::exp_neg(), &spec).unwrap();
    let mut sidecar = ProfileSidecar::for_grid(spec.grid(), ProfileKind::Ht);
    sidecar.kernel = Some("exp_neg".into());
    let sidecar = parse_profile_sidecar(&sidecar.to_json()).unwrap();
    let back = parse_profile_csv(&write_profile_csv(&ht), &sidecar).unwrap();
    assert_eq!(back.data, ht.data);
    assert_eq!(back.spec, ht.spec);
}
