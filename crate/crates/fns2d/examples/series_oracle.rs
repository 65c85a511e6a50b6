//! Lattice-series oracles: interaction sums with fitted decay exponents and
//! the truncated triple series with its stabilization verdict.
//!
//! Run with `cargo run --release --example series_oracle`.

use fns2d::fbm::HurstParam;
use fns2d::gibbs::{interaction_sum, weighted_interaction_sum, triple_interaction_sum};
use fns2d::stats::loglog_slope;
use fns2d::WaveIndex;

fn main() -> fns2d::Result<()> {
    let ks = [8i32, 16, 32, 64];
    let xs: Vec<f64> = ks.iter().map(|&k| k as f64).collect();

    for hv in [0.4, 0.75] {
        let h = HurstParam::new(hv)?;
        let ys: Vec<f64> = ks
            .iter()
            .map(|&k| Ok(interaction_sum(WaveIndex::new(k, 0), h, 192)?.0))
            .collect::<fns2d::Result<_>>()?;
        let target = if hv < 0.5 { -(8.0 * hv - 2.0) } else { -4.0 * hv };
        println!(
            "interaction sum S1, H = {hv}: slope {:.3} (expected {target:.2}), S1(64) = {:.3e}",
            loglog_slope(&xs, &ys),
            ys[3]
        );
    }

    let h = HurstParam::new(0.75)?;
    let ys2: Vec<f64> = ks
        .iter()
        .map(|&k| Ok(weighted_interaction_sum(WaveIndex::new(k, 0), h, -0.75, 192)?.0))
        .collect::<fns2d::Result<_>>()?;
    println!(
        "weighted sum S2 at rho = -0.75: slope {:.3} (expected -2.50)",
        loglog_slope(&xs, &ys2)
    );

    let rep = triple_interaction_sum(h, -0.75, 24)?;
    println!("triple series partials (R, value):");
    for (r, v) in &rep.partials {
        println!("  R = {r:2}: {v:.6}");
    }
    println!(
        "verdict {}, factorized majorant {:.4}",
        rep.verdict,
        rep.factorized_majorant.unwrap_or(f64::NAN)
    );
    Ok(())
}
