//! Fourth moment of `B(z,z)`: the mechanical Wick-pairing engine against the
//! hand-derived six-case list, term for term, and against Monte Carlo.
//! Classes 1-2 (the disconnected part) reproduce the squared second moment.
//!
//! Run with `cargo run --release --example fourth_moment`.

use fns2d::fbm::HurstParam;
use fns2d::fou::c_h_constant;
use fns2d::gibbs::{bzz_moment_mc, bzz_second_moment_series, GibbsSpec, ModeSpectrum};
use fns2d::wick::{fourth_moment_cases, fourth_moment_engine};

fn main() -> fns2d::Result<()> {
    let h = HurstParam::new(0.75)?;
    let rho = -0.75;
    let chc = c_h_constant(h, 1e-7)?;
    let spec = GibbsSpec::new(h, chc, 4)?;
    let s = ModeSpectrum::from_gibbs(&spec);

    let engine = fourth_moment_engine(&s, rho);
    let cases = fourth_moment_cases(&s, rho);
    println!("class   engine          case list");
    for c in 0..6 {
        println!(
            "  {}   {:>14.10}  {:>14.10}",
            c + 1,
            engine.classes[c],
            cases.classes[c]
        );
    }
    let m2 = bzz_second_moment_series(&s, rho);
    println!(
        "disconnected = {:.10} vs m2^2 = {:.10}",
        cases.disconnected(),
        m2 * m2
    );
    let (mc, se) = bzz_moment_mc(&s, rho, 2, 200_000, 11)?;
    println!(
        "total = {:.6} vs Monte Carlo {mc:.6} +- {se:.6}  ({:+.2} SE)",
        cases.total(),
        (cases.total() - mc) / se
    );
    Ok(())
}
