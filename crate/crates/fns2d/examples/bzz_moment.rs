//! Second moment of the quadratic term `B(z,z)` under the invariant Gaussian
//! measure: Wick series against Monte Carlo, plus the divergence verdict
//! around the admissibility threshold.
//!
//! Run with `cargo run --release --example bzz_moment`.

use fns2d::fbm::HurstParam;
use fns2d::fou::c_h_constant;
use fns2d::gibbs::{bzz_divergence_verdict, bzz_second_moment};

fn main() -> fns2d::Result<()> {
    for (hv, rho) in [(0.75, -0.75), (0.45, -1.3)] {
        let h = HurstParam::new(hv)?;
        let chc = c_h_constant(h, 1e-7)?;
        let report = bzz_second_moment(h, chc, 8, rho, Some((2_000, 5)))?;
        println!(
            "H = {hv}, rho = {rho}: series = {:.5}, MC = {:.5} +- {:.5}, verdict {}",
            report.series_value,
            report.mc_value.unwrap(),
            report.mc_stderr.unwrap(),
            report.verdict
        );
    }
    // Bracketing the threshold rho* = 4H - 3 at H = 0.45.
    let h = HurstParam::new(0.45)?;
    for rho in [-1.3, -1.0] {
        let (verdict, exponent) = bzz_divergence_verdict(h, rho)?;
        println!("H = 0.45, rho = {rho}: tail exponent {exponent:+.2} -> {verdict}");
    }
    Ok(())
}
