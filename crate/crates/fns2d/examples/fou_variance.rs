//! The stationary convolution variance law: empirical variance of
//! `int_{-inf}^t e^{-lambda(t-s)} db(s)` against `C_H lambda^{-2H}`.
//!
//! Run with `cargo run --release --example fou_variance`.

use fns2d::fbm::{sample_fbm_with_rng, HurstParam};
use fns2d::fou::{
    burnin_horizon, c_h_constant, sample_fou_path, stationary_variance, OuParams,
    DEFAULT_TRUNC_TOL,
};
use fns2d::rng::stream_rng;
use fns2d::stats::Running;

fn main() -> fns2d::Result<()> {
    let h = HurstParam::new(0.65)?;
    let chc = c_h_constant(h, 1e-7)?;
    println!(
        "C_H at H = 0.65: {:.8} (quadrature error bound {:.1e})",
        chc.value, chc.quadrature_error
    );
    for lam in [1.0, 4.0, 9.0] {
        let params = OuParams::new(lam, h)?;
        let target = stationary_variance(&params, &chc)?;
        let dt = 1.0 / (8.0 * lam);
        let burn = burnin_horizon(lam, DEFAULT_TRUNC_TOL);
        let steps = ((burn + 1.0) / dt).ceil() as usize;
        let mut acc = Running::default();
        for rep in 0..10_000u64 {
            let mut rng = stream_rng(rep, &[7, lam.to_bits()]);
            let p = sample_fbm_with_rng(h, steps, dt, -burn, &mut rng)?;
            acc.push(sample_fou_path(&params, &p, &[steps])?.values[0]);
        }
        println!(
            "lambda = {lam}: Var = {:.6} vs C_H lambda^-2H = {:.6}  ({:+.2} SE)",
            acc.variance(),
            target,
            (acc.variance() - target) / acc.stderr_variance_normal()
        );
    }
    Ok(())
}
