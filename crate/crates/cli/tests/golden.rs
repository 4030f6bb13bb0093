//! Bundled scenarios against fixtures recorded from the first verified run.
//! Numeric fields are compared with a small relative tolerance so that
//! last-bit differences between platforms do not register.

use std::path::{Path, PathBuf};
use std::process::Command;

fn manifest() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn run(subcommand: &str, file: &str) -> String {
    let path: PathBuf = manifest().join("scenarios").join(file);
    let out = Command::new(env!("CARGO_BIN_EXE_crooks"))
        .args([subcommand, path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fields_match(a: &str, b: &str) -> bool {
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => (x - y).abs() <= 1e-10 * x.abs().max(y.abs()) + 1e-13,
        _ => a == b,
    }
}

fn compare(actual: &str, golden_name: &str) {
    let golden =
        std::fs::read_to_string(manifest().join("tests/golden").join(golden_name)).unwrap();
    let actual: Vec<&str> = actual.lines().collect();
    let expected: Vec<&str> = golden.lines().collect();
    assert_eq!(actual.len(), expected.len(), "{golden_name}: row count");
    assert_eq!(actual[0], expected[0], "{golden_name}: header");
    for (k, (a, e)) in actual.iter().zip(&expected).enumerate().skip(1) {
        let fa: Vec<&str> = a.split(',').collect();
        let fe: Vec<&str> = e.split(',').collect();
        assert_eq!(fa.len(), fe.len(), "{golden_name}:{}", k + 1);
        for (x, y) in fa.iter().zip(&fe) {
            assert!(
                fields_match(x, y),
                "{golden_name}:{}: `{x}` vs `{y}`\n  {a}\n  {e}",
                k + 1
            );
        }
    }
}

#[test]
fn ladder_eigenstate_matches_golden() {
    compare(
        &run("run", "ladder_eigenstate.scn"),
        "ladder_eigenstate.csv",
    );
}

#[test]
fn lattice_distance_sweep_matches_golden() {
    compare(
        &run("run", "lattice_distance_sweep.scn"),
        "lattice_distance_sweep.csv",
    );
}

#[test]
fn splitting_sweep_matches_golden() {
    compare(
        &run("sweep", "ladder_splitting_sweep.scn"),
        "ladder_splitting_sweep.csv",
    );
}
