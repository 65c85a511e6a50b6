//! The two routes to the Navier-Stokes nonlinearity agree to round-off:
//! exact Fourier convolution versus dealiased pseudo-spectral product.
//! Also demonstrates the steady single-shear mode and the trilinear
//! cancellation identities.
//!
//! Run with `cargo run --release --example bilinear_check`.

use fns2d::bilinear::{bilinear_direct_report, bilinear_fft, gamma, trilinear};
use fns2d::{FourierField, WaveIndex};
use num_complex::Complex64;

fn main() -> fns2d::Result<()> {
    println!(
        "gamma((1,0),(0,1)) = {:.8}",
        gamma(WaveIndex::new(1, 0), WaveIndex::new(0, 1))?
    );

    // A single shear mode is a steady state.
    let shear = FourierField::from_modes(8, &[(WaveIndex::new(1, 0), Complex64::new(1.0, 0.0))])?;
    println!(
        "||B(shear, shear)|| = {:.2e}",
        bilinear_direct_report(&shear, &shear)?.field.sobolev_norm(0.0)
    );

    for n in [4u32, 8, 16] {
        let u = FourierField::random(n, 0.7, 10 + n as u64);
        let v = FourierField::random(n, 0.7, 20 + n as u64);
        let rep = bilinear_direct_report(&u, &v)?;
        let f = bilinear_fft(&u, &v, None)?;
        let scale = rep.field.sobolev_norm(0.0);
        let mut worst = 0.0f64;
        for (k, dv) in rep.field.iter_positive() {
            worst = worst.max((f.get(k) - dv).norm());
        }
        println!(
            "cutoff {n:2}: max |direct - fft| / ||B|| = {:.2e}, spilled mass beyond cutoff = {:.4}",
            worst / scale,
            rep.truncated_mass
        );
    }

    let u1 = FourierField::random(8, 0.6, 1);
    let u2 = FourierField::random(8, 0.6, 2);
    let u3 = FourierField::random(8, 0.6, 3);
    println!(
        "<B(u1,u2),u2> = {:+.2e}   <B(u1,u2),u3> + <B(u1,u3),u2> = {:+.2e}",
        trilinear(&u1, &u2, &u2)?,
        trilinear(&u1, &u2, &u3)? + trilinear(&u1, &u3, &u2)?
    );
    Ok(())
}
