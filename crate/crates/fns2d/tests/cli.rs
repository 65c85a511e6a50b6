//! End-to-end checks of the command-line harness: determinism of artifacts,
//! precondition rejection, and the quick acceptance tier.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_fns2d")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fns2d_cli_{tag}_{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn same_seed_gives_byte_identical_artifacts() {
    let d1 = tmp_dir("det1");
    let d2 = tmp_dir("det2");
    for dir in [&d1, &d2] {
        let status = Command::new(bin())
            .args([
                "sample-fbm",
                "--hurst",
                "0.6",
                "--dt",
                "0.01",
                "--t-final",
                "0.5",
                "--seed",
                "12345",
                "--out",
            ])
            .arg(dir)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = fs::read(d1.join("fbm_path.csv")).unwrap();
    let b = fs::read(d2.join("fbm_path.csv")).unwrap();
    assert_eq!(a, b, "artifacts differ between identical runs");
    assert!(a.starts_with(b"# fns2d sample-fbm v1 seed=12345"));
}

#[test]
fn bzz_moment_rejects_hurst_below_quarter() {
    let dir = tmp_dir("reject");
    let output = Command::new(bin())
        .args(["bzz-moment", "--hurst", "0.2", "--cutoff", "4", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("H > 1/4"),
        "rejection must name the precondition, got: {stderr}"
    );
}

#[test]
fn unknown_config_key_rejected() {
    let dir = tmp_dir("cfg");
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, "viscosity = 3\n").unwrap();
    let output = Command::new(bin())
        .args(["sample-fbm", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("viscosity"));
}

#[test]
fn flags_override_config_file() {
    let dir = tmp_dir("override");
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, "seed = 1\nhurst = 0.3\ndt = 0.01\nt_final = 0.2\n").unwrap();
    let status = Command::new(bin())
        .args(["sample-fbm", "--config"])
        .arg(&cfg)
        .args(["--seed", "777", "--out"])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let head = fs::read_to_string(dir.join("fbm_path.csv")).unwrap();
    assert!(head.starts_with("# fns2d sample-fbm v1 seed=777"));
}

#[test]
fn accept_quick_tier_passes() {
    let dir = tmp_dir("accept");
    let output = Command::new(bin())
        .args(["accept", "--quick", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert_eq!(
        output.status.code(),
        Some(0),
        "quick tier failed:\n{stdout}"
    );
    assert!(dir.join("acceptance.csv").exists());
    // One pass/fail line per quick-tier criterion.
    assert_eq!(stdout.matches("[PASS]").count(), 4, "{stdout}");
}
