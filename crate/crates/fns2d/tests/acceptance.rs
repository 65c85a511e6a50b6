//! Acceptance gate: every criterion runs at its pinned parameters and
//! tolerances and prints one pass/fail line. Criterion 2 encodes stricter
//! convergence-rate thresholds than the partial sums of the underlying
//! lattice series can exhibit near the critical index at these cutoffs; its
//! gates are kept as written and the measured rates are printed (the
//! slope-sign verdicts in the same output do bracket the threshold).

use fns2d::acceptance::{run, Tier};

fn check(id: u32) -> (bool, String) {
    let reports = run(Tier::Full, Some(&[id]));
    let r = &reports[0];
    (r.passed, r.line())
}

#[test]
fn acceptance_01_fou_variance_law() {
    let (ok, line) = check(1);
    assert!(ok, "{line}");
}

#[test]
fn acceptance_02_z_regularity_threshold() {
    let (ok, line) = check(2);
    assert!(ok, "{line}");
}

#[test]
fn acceptance_03_bilinear_oracle_equivalence() {
    let (ok, line) = check(3);
    assert!(ok, "{line}");
}

#[test]
fn acceptance_04_trilinear_identities() {
    let (ok, line) = check(4);
    assert!(ok, "{line}");
}

#[test]
fn acceptance_05_bzz_second_moment() {
    let (ok, line) = check(5);
    assert!(ok, "{line}");
}

#[test]
fn acceptance_06_fourth_moment() {
    let (ok, line) = check(6);
    assert!(ok, "{line}");
}

#[test]
fn acceptance_07_lattice_series_scalings() {
    let (ok, line) = check(7);
    assert!(ok, "{line}");
}

#[test]
fn acceptance_08_parameter_window_checker() {
    let (ok, line) = check(8);
    assert!(ok, "{line}");
}

#[test]
fn acceptance_09_local_picard_regime() {
    let (ok, line) = check(9);
    assert!(ok, "{line}");
}

#[test]
fn acceptance_10_global_regime() {
    let (ok, line) = check(10);
    assert!(ok, "{line}");
}

#[test]
fn acceptance_11_pathwise_uniqueness_proxy() {
    let (ok, line) = check(11);
    assert!(ok, "{line}");
}
