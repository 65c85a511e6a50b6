//! Global-regime solve with the discrete energy ledger.
//!
//! For `1/2 < H < 1` the remainder equation is dissipative enough to run to
//! any horizon; the ledger tracks the discrete analogue of
//! `d/dt (1/2)||u||^2 + ||grad u||^2 = -<B(u,z),u> - <B(z,z),u>`
//! (the transport terms `<B(u+z,u),u>` cancel exactly for the Galerkin
//! system), whose residual shrinks linearly with the step size.

use crate::bilinear::bilinear_fft;
use crate::error::{Error, Result};
use crate::field::FourierField;
use crate::fou::ZTrajectory;
use crate::solver::{forcing, step, SolverConfig, Trajectory};

/// One row of the discrete energy ledger.
#[derive(Clone, Copy, Debug)]
pub struct EnergyRow {
    pub t: f64,
    /// `1/2 ||u||^2_{H^0}` before the step.
    pub kinetic: f64,
    /// `||grad u||^2_{L^2}`.
    pub dissipation: f64,
    /// `<B(u,z), u>`.
    pub pair_buz: f64,
    /// `<B(z,z), u>`.
    pub pair_bzz: f64,
    /// `(E_{n+1} - E_n)/dt + dissipation + pair_buz + pair_bzz`.
    pub identity_residual: f64,
}

#[derive(Clone, Debug)]
pub struct GlobalResult {
    pub trajectory: Trajectory,
    pub energy: Vec<EnergyRow>,
    pub blown_up: bool,
}

/// Run the remainder equation from `u(0) = v0 - z(0)` to the configured
/// horizon. `ledger_every = 0` disables the (more expensive) energy rows.
pub fn global_solve(
    cfg: &SolverConfig,
    v0: &FourierField,
    ztraj: &ZTrajectory,
    stride: usize,
    ledger_every: usize,
) -> Result<GlobalResult> {
    let hv = cfg.hurst.value();
    if !(0.5 < hv && hv < 1.0) {
        return Err(Error::ParameterRegion {
            detail: format!("global regime requires 1/2 < H < 1, got H={hv}"),
        });
    }
    if !(0.0 < cfg.sigma && cfg.sigma < 2.0 * (hv - 0.5)) {
        return Err(Error::ParameterRegion {
            detail: format!(
                "global regime requires 0 < sigma < 2(H-1/2) = {}, got sigma={}",
                2.0 * (hv - 0.5),
                cfg.sigma
            ),
        });
    }
    let dt = ztraj.dt * stride as f64;
    let steps = ((cfg.t_final / dt) + 0.5).floor() as usize;
    if steps * stride + 1 > ztraj.len() {
        return Err(Error::GridMismatch {
            detail: format!(
                "global horizon needs {} z-samples, trajectory has {}",
                steps * stride + 1,
                ztraj.len()
            ),
        });
    }
    let mut u = v0.sub(ztraj.field(0))?;
    let mut traj = Trajectory::with_capacity(steps + 1);
    traj.push(0.0, u.clone(), cfg.sigma);
    let mut energy = Vec::new();
    let mut blown_up = false;
    for n in 0..steps {
        let z = ztraj.field(n * stride);
        let f = forcing(&u, z)?;
        let ledger = ledger_every > 0 && n % ledger_every == 0;
        let pre = if ledger {
            let buz = bilinear_fft(&u, z, None)?;
            let bzz = bilinear_fft(z, z, None)?;
            Some((
                0.5 * u.sobolev_norm(0.0).powi(2),
                u.sobolev_norm(1.0).powi(2),
                buz.inner_h0(&u)?,
                bzz.inner_h0(&u)?,
            ))
        } else {
            None
        };
        u = step(cfg.scheme, &u, &f, dt)?;
        let t = (n + 1) as f64 * dt;
        traj.push(t, u.clone(), cfg.sigma);
        if let Some((kinetic, dissipation, pair_buz, pair_bzz)) = pre {
            let kinetic_next = 0.5 * u.sobolev_norm(0.0).powi(2);
            energy.push(EnergyRow {
                t: n as f64 * dt,
                kinetic,
                dissipation,
                pair_buz,
                pair_bzz,
                identity_residual: (kinetic_next - kinetic) / dt
                    + dissipation
                    + pair_buz
                    + pair_bzz,
            });
        }
        if traj.hsigma_norms[n + 1] > cfg.blowup_threshold {
            traj.stopped_at = Some(t);
            blown_up = true;
            break;
        }
    }
    Ok(GlobalResult {
        trajectory: traj,
        energy,
        blown_up,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::HurstParam;
    use crate::fou::sample_z_trajectory;
    use crate::stats;

    fn h(v: f64) -> HurstParam {
        HurstParam::new(v).unwrap()
    }

    fn cfg(hv: f64, n: u32, dt: f64, t: f64, sigma: f64) -> SolverConfig {
        let mut c = SolverConfig::new(h(hv), n, dt, t);
        c.sigma = sigma;
        c
    }

    #[test]
    fn rejects_wrong_regime() {
        let z = ZTrajectory::zero(4, 8, 0.01, h(0.45));
        let c = cfg(0.45, 4, 0.01, 0.05, 0.4);
        let v0 = FourierField::zeros(4);
        assert!(matches!(
            global_solve(&c, &v0, &z, 1, 0),
            Err(Error::ParameterRegion { .. })
        ));
        let z2 = ZTrajectory::zero(4, 8, 0.01, h(0.75));
        let c2 = cfg(0.75, 4, 0.01, 0.05, 0.7); // sigma above 2(H-1/2)
        assert!(matches!(
            global_solve(&c2, &v0, &z2, 1, 0),
            Err(Error::ParameterRegion { .. })
        ));
    }

    #[test]
    fn short_run_is_stable_and_ledger_consistent() {
        let hv = 0.75;
        let n = 12u32;
        let dt = 0.005;
        let z = sample_z_trajectory(h(hv), n, 60, dt, 1e-8, 3).unwrap();
        let c = cfg(hv, n, dt, 0.3, 0.4);
        let v0 = FourierField::random(n, 2.0, 8);
        let res = global_solve(&c, &v0, &z, 1, 1).unwrap();
        assert!(!res.blown_up);
        assert_eq!(res.energy.len(), 60);
        // The budget terms are finite and the residual is small relative to
        // the dissipation scale.
        let scale = res
            .energy
            .iter()
            .map(|r| r.dissipation.abs())
            .fold(0.0, f64::max);
        for row in &res.energy {
            assert!(row.identity_residual.is_finite());
            assert!(row.identity_residual.abs() <= 0.5 * scale.max(1.0));
        }
    }

    #[test]
    fn energy_identity_residual_scales_linearly_in_dt() {
        let hv = 0.75;
        let n = 8u32;
        let dt_fine = 0.00125;
        let z = sample_z_trajectory(h(hv), n, 320, dt_fine, 1e-8, 17).unwrap();
        let v0 = FourierField::random(n, 2.0, 21);
        let mut means = Vec::new();
        for stride in [4usize, 2, 1] {
            let c = cfg(hv, n, dt_fine * stride as f64, 0.4, 0.4);
            let res = global_solve(&c, &v0, &z, stride, 1).unwrap();
            let vals: Vec<f64> = res.energy.iter().map(|r| r.identity_residual.abs()).collect();
            means.push(stats::mean(&vals));
        }
        // Halving dt should roughly halve the residual.
        assert!(means[1] / means[0] < 0.75, "residuals {means:?}");
        assert!(means[2] / means[1] < 0.75, "residuals {means:?}");
    }

    #[test]
    fn transport_pairing_cancels_for_galerkin_system() {
        let hv = 0.75;
        let n = 8u32;
        let z = sample_z_trajectory(h(hv), n, 10, 0.01, 1e-8, 5).unwrap();
        let c = cfg(hv, n, 0.01, 0.1, 0.4);
        let v0 = FourierField::random(n, 1.5, 2);
        let res = global_solve(&c, &v0, &z, 1, 0).unwrap();
        for idx in [0usize, 5, 10] {
            let u = &res.trajectory.fields[idx];
            let w = u.add(z.field(idx)).unwrap();
            let t = crate::bilinear::trilinear(&w, u, u).unwrap();
            let scale = w.sobolev_norm(1.0) * u.sobolev_norm(1.0) * u.sobolev_norm(0.0);
            assert!(t.abs() <= 1e-10 * scale.max(1.0), "t={t}, scale={scale}");
        }
    }

    #[test]
    fn dt_refinement_changes_sup_norm_little() {
        let hv = 0.75;
        let n = 8u32;
        let dt_fine = 0.0025;
        let z = sample_z_trajectory(h(hv), n, 400, dt_fine, 1e-8, 29).unwrap();
        let v0 = FourierField::random(n, 2.0, 31);
        let sup: Vec<f64> = [2usize, 1]
            .iter()
            .map(|&stride| {
                let c = cfg(hv, n, dt_fine * stride as f64, 1.0, 0.4);
                global_solve(&c, &v0, &z, stride, 0)
                    .unwrap()
                    .trajectory
                    .sup_hsigma()
            })
            .collect();
        let rel = (sup[1] - sup[0]).abs() / sup[1];
        assert!(rel < 0.05, "sup norms {sup:?}, rel change {rel}");
    }
}
