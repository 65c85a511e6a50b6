//! Draw fractional Brownian paths at several Hurst indices and verify the
//! increment variance law `Var(b(t+dt) - b(t)) = dt^{2H}` by Monte Carlo.
//!
//! Run with `cargo run --release --example sample_fbm`.

use fns2d::fbm::{fbm_covariance, sample_fbm, sample_fbm_with_rng, HurstParam};
use fns2d::rng::stream_rng;
use fns2d::stats::Running;

fn main() -> fns2d::Result<()> {
    for hv in [0.3, 0.5, 0.75] {
        let h = HurstParam::new(hv)?;
        let path = sample_fbm(h, 16, 0.125, 42)?;
        println!("H = {hv}: b(2.0) = {:+.5} (seed 42)", path.values[16]);

        let dt = 0.25;
        let mut acc = Running::default();
        for rep in 0..20_000u64 {
            let mut rng = stream_rng(rep, &[1]);
            let p = sample_fbm_with_rng(h, 1, dt, 0.0, &mut rng)?;
            acc.push(p.values[1]);
        }
        let target = dt.powf(2.0 * hv);
        println!(
            "        Var(b(dt)) = {:.5} vs dt^2H = {:.5}  ({:+.2} SE)",
            acc.variance(),
            target,
            (acc.variance() - target) / acc.stderr_variance_normal()
        );
        println!(
            "        closed-form C(1,2) = {:.5}",
            fbm_covariance(1.0, 2.0, h)
        );
    }
    Ok(())
}
