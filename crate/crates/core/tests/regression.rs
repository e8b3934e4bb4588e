//! Bit-for-bit regression values. Regenerate with
//! `LYAP_BLESS=1 cargo test --test regression` after an intended change.

use std::path::PathBuf;

use julia_lyapunov::analysis::{lyapunov_mc, lyapunov_tree};
use julia_lyapunov::backward::default_start;
use julia_lyapunov::measure::ProbabilityVector;
use julia_lyapunov::PolynomialSpec;

fn check_golden(name: &str, value: f64) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let line = format!("{:016x} {value:e}\n", value.to_bits());
    if std::env::var_os("LYAP_BLESS").is_some() {
        std::fs::write(&path, &line).unwrap();
        return;
    }
    let stored = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(stored, line, "{name} changed");
}

#[test]
fn quadratic_tree_depth_14() {
    let spec = PolynomialSpec::from_parts(2, &[0.1], None).unwrap();
    let est = lyapunov_tree(&spec, &ProbabilityVector::uniform(2), default_start(&spec), 14).unwrap();
    check_golden("tree_d2_a0.1_depth14.txt", est.value);
}

#[test]
fn cubic_monte_carlo_seed_3() {
    let spec = PolynomialSpec::from_parts(3, &[0.1, 0.05], Some(&[0.0, 0.1])).unwrap();
    let p = ProbabilityVector::new(vec![0.5, 0.3, 0.2]).unwrap();
    let est = lyapunov_mc(&spec, &p, 2000, 60, 3).unwrap();
    check_golden("mc_d3_seed3.txt", est.value);
}
