//! Runs of the `eulerist` binary: outputs, `run.json`, and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use eulerist::formats::{parse_filtration, parse_point_cloud_csv, parse_profile_csv, parse_profile_sidecar};
use eulerist_cli::RunConfig;

fn eulerist(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eulerist"))
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .env_remove("EULERIST_THREADS")
        .output()
        .unwrap()
}

fn ok(out: &Path, args: &[&str]) -> Output {
    let o = eulerist(out, args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    o
}

fn exit_code(out: &Path, args: &[&str]) -> (i32, String) {
    let o = eulerist(out, args);
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stderr).into_owned())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sample_build_profile_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path();
    ok(out, &["sample", "--generator", "orbit", "--seed", "3", "--n", "120", "--rho", "4.3"]);
    let cloud = parse_point_cloud_csv(&std::fs::read_to_string(out.join("sample.csv")).unwrap(), None).unwrap();
    assert_eq!(cloud.len(), 120);

    let pts = out.join("sample.csv");
    ok(out, &["build", s(&pts), "--max-dim", "2", "--max-scale", "0.1"]);
    let f = parse_filtration(&std::fs::read_to_string(out.join("filtration.txt")).unwrap()).unwrap();
    assert_eq!(f.m(), 1);
    assert_eq!(f.simplices().iter().filter(|x| x.dim() == 0).count(), 120);

    let ftxt = out.join("filtration.txt");
    ok(out, &["ecp", s(&ftxt), "--bounds", "0,0.1", "--resolution", "11"]);
    let side = parse_profile_sidecar(&std::fs::read_to_string(out.join("ecp.json")).unwrap()).unwrap();
    let ecp = parse_profile_csv(&std::fs::read_to_string(out.join("ecp.csv")).unwrap(), &side).unwrap();
    assert_eq!(ecp.data[0], 120.0);
    assert_eq!(ecp.data[10], f.sublevel_euler(&[0.1]) as f64);

    ok(out, &["ht", s(&ftxt), "--kernel", "exp_neg", "--xi-bounds", "0,5", "--resolution", "6"]);
    let side = parse_profile_sidecar(&std::fs::read_to_string(out.join("ht.json")).unwrap()).unwrap();
    assert_eq!(side.kernel.as_deref(), Some("exp_neg"));
    let ht = parse_profile_csv(&std::fs::read_to_string(out.join("ht.csv")).unwrap(), &side).unwrap();
    // At ξ = 0 every simplex contributes its sign: the transform is χ.
    assert_eq!(ht.data[0], f.euler_characteristic() as f64);
}

#[test]
fn run_json_records_the_resolved_config() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path();
    ok(out, &["sample", "--generator", "clutter", "--seed", "5", "--n-noise", "20", "--n-line", "6"]);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
    assert_eq!(doc["tool"], "eulerist");
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
    let cfg = RunConfig::from_json(&doc["config"].to_string()).unwrap();
    assert_eq!(cfg.out_dir, out);
    // Replaying the recorded flags reproduces the output.
    let first = std::fs::read(out.join("sample.csv")).unwrap();
    std::fs::remove_file(out.join("sample.csv")).unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_eulerist")).args(cfg.to_args()).status().unwrap();
    assert!(status.success());
    assert_eq!(std::fs::read(out.join("sample.csv")).unwrap(), first);
}

#[test]
fn distance_prints_a_value() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path();
    let a = out.join("a.txt");
    let b = out.join("b.txt");
    std::fs::write(&a, "# m=1\n0 ; 0\n1 ; 0\n0 1 ; 1\n").unwrap();
    std::fs::write(&b, "# m=1\n0 ; 0\n1 ; 0\n0 1 ; 3\n").unwrap();
    for (metric, expect) in [("signed-w1", 2.0), ("l1-window:5", 2.0), ("w1-diagram", 2.0)] {
        let o = ok(out, &["distance", s(&a), s(&b), "--metric", metric]);
        let v: f64 = String::from_utf8(o.stdout).unwrap().trim().parse().unwrap();
        assert!((v - expect).abs() < 1e-12, "{metric}: {v}");
    }
}

#[test]
fn usage_errors_exit_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path();
    let f = out.join("f.txt");
    std::fs::write(&f, "# m=1\n0 ; 0\n").unwrap();
    for args in [
        vec!["ecp", s(&f)],                                           // no grid
        vec!["ht", s(&f), "--kernel", "nope", "--xi-bounds", "0,1"], // unknown kernel
        vec!["ecp", s(&f), "--bounds", "0,1x0,1"],                    // wrong arity
        vec!["ecp", "/nonexistent/f.txt", "--bounds", "0,1"],
        vec!["--threads", "0", "distance", s(&f), s(&f)],
        vec!["sample", "--generator", "orbit", "--seed", "1"], // missing --n / --rho
    ] {
        assert_eq!(exit_code(out, &args).0, 2, "{args:?}");
    }
}

#[test]
fn parse_errors_report_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path();
    let f = out.join("bad.txt");
    std::fs::write(&f, "# m=1\n0 ; 0\n1 ; zero\n").unwrap();
    let (code, stderr) = exit_code(out, &["ecp", s(&f), "--bounds", "0,1"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("line 3"), "{stderr}");
}

#[test]
fn invalid_filtrations_exit_with_3() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path();
    let open = out.join("open.txt");
    std::fs::write(&open, "# m=1\n0 ; 0\n0 1 ; 1\n").unwrap();
    let decreasing = out.join("dec.txt");
    std::fs::write(&decreasing, "# m=1\n0 ; 2\n1 ; 0\n0 1 ; 1\n").unwrap();
    for f in [&open, &decreasing] {
        let (code, stderr) = exit_code(out, &["ecp", s(f), "--bounds", "0,1"]);
        assert_eq!(code, 3, "{stderr}");
    }
}

#[test]
fn oversized_computations_exit_with_4() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path();
    let mut text = String::from("# m=2\n");
    for v in 0..12_000 {
        text.push_str(&format!("{v} ; {} {}\n", v as f64 * 1e-3, v as f64 * 2e-3));
    }
    let big = out.join("big.txt");
    std::fs::write(&big, &text).unwrap();
    let single = out.join("one.txt");
    std::fs::write(&single, "# m=2\n0 ; 0.5 0.5\n").unwrap();
    let (code, stderr) = exit_code(out, &["distance", s(&big), s(&single), "--metric", "l1-window:100"]);
    assert_eq!(code, 4, "{stderr}");
}
