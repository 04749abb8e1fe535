//! Where the transform of a single bar is extremal, and how that depends on
//! the kernel.

mod common;

use common::single_bar;
use eulerist::transforms::{hybrid_transform, DualGridSpec, PrimitiveKernel};

/// Closed-form minimiser of `ξ ↦ e^{−(ξb)^p} − e^{−(ξa)^p}`.
fn expected(a: f64, b: f64, p: f64) -> f64 {
    (p * (b.ln() - a.ln()) / (b.powf(p) - a.powf(p))).powf(1.0 / p)
}

fn positive_exp_pow(p: f64) -> PrimitiveKernel {
    PrimitiveKernel::custom(format!("pos_exp_pow:{p}"), move |s| (-s.powf(p)).exp(), true, None, false)
        .unwrap()
}

fn grid_arg(values: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate() {
        if better(v, values[best]) {
            best = k;
        }
    }
    best
}

#[test]
fn argmin_follows_the_closed_form() {
    let spec = DualGridSpec::from_bounds(&[(0.0, 2.0)], &[10_000]).unwrap();
    for (a, b, p) in [(1.0, 3.0, 1.0), (1.0, 3.0, 4.0), (0.5, 2.0, 2.0)] {
        let ht = hybrid_transform(&single_bar(a, b), &positive_exp_pow(p), &spec).unwrap();
        let found = spec.grid().point(grid_arg(&ht.data, |x, y| x < y))[0];
        assert!((found - expected(a, b, p)).abs() < 1e-3, "({a},{b},{p}): {found}");
    }
}

#[test]
fn closed_form_reference_values() {
    assert!((expected(1.0, 3.0, 1.0) - 3f64.ln() / 2.0).abs() < 1e-15);
    assert!((expected(1.0, 3.0, 4.0) - 0.4841).abs() < 1e-4);
    assert!((expected(0.5, 2.0, 2.0) - 0.8599).abs() < 1e-4);
}

#[test]
fn builtin_kernel_has_the_mirrored_maximum() {
    // The built-in primitive is −e^{−s^p}, so the same bar gives −HT and the
    // extremum is a maximum at the same place.
    let spec = DualGridSpec::from_bounds(&[(0.0, 2.0)], &[10_000]).unwrap();
    let ht = hybrid_transform(&single_bar(1.0, 3.0), &PrimitiveKernel::exp_pow(4.0).unwrap(), &spec)
        .unwrap();
    assert!(ht.data.iter().all(|&v| v >= 0.0));
    let found = spec.grid().point(grid_arg(&ht.data, |x, y| x > y))[0];
    assert!((found - expected(1.0, 3.0, 4.0)).abs() < 1e-3);
}

#[test]
fn larger_exponents_move_the_extremum_towards_the_bar_end() {
    // The minimiser decreases with p towards 1/b.
    let spec = DualGridSpec::from_bounds(&[(0.0, 3.0)], &[30_001]).unwrap();
    let mut previous = f64::INFINITY;
    for p in [1.0, 2.0, 4.0, 8.0] {
        let ht = hybrid_transform(&single_bar(0.5, 4.0), &positive_exp_pow(p), &spec).unwrap();
        let found = spec.grid().point(grid_arg(&ht.data, |x, y| x < y))[0];
        assert!((found - expected(0.5, 4.0, p)).abs() < 1e-3);
        assert!(found < previous && found > 0.25);
        previous = found;
    }
}
