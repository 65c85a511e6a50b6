//! Regularity threshold of the stationary Stokes solution: the truncated
//! series `E||z||^2_{H^r}` converges across cutoffs exactly for
//! `r < 2(H - 1/2)`, and the verdict brackets that index.
//!
//! Run with `cargo run --release --example z_regularity`.

use fns2d::fbm::HurstParam;
use fns2d::fou::z_regularity_report;

fn main() -> fns2d::Result<()> {
    for hv in [0.45, 0.75] {
        let h = HurstParam::new(hv)?;
        let r_star = 2.0 * (hv - 0.5);
        let grid = [r_star - 0.3, r_star - 0.1, r_star + 0.1];
        println!("H = {hv} (critical index r* = {r_star}):");
        let rows = z_regularity_report(h, &[16, 32, 64, 128], &grid, None, 1e-6)?;
        for row in rows {
            println!(
                "  r = {:+.2}  N = {:3}  series = {:>10.4}  tail-corrected = {:>10}  {}",
                row.r,
                row.cutoff,
                row.series_value,
                row.tail_corrected
                    .map(|v| format!("{v:.4}"))
                    .unwrap_or_else(|| "-".into()),
                row.verdict
            );
        }
    }
    Ok(())
}
