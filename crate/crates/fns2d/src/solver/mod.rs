//! Time integration of the auxiliary equation
//! `du/dt = Au - B(u,u) - B(u,z) - B(z,u) - B(z,z)`
//! for the remainder `u = v - z`.
//!
//! The semigroup is diagonal on the spectral basis, so stepping uses
//! exponential (ETD) Euler with exact per-mode decay factors; the nonlinearity
//! collapses to a single dealiased product `-B(u+z, u+z)` by bilinearity.

pub mod conditions;
pub mod global;
pub mod picard;
pub mod uniqueness;

use crate::bilinear::bilinear_fft;
use crate::error::{Error, Result};
use crate::fbm::HurstParam;
use crate::field::FourierField;
use crate::fou::ZTrajectory;

pub use conditions::{check_parameter_conditions, grid_search, sample_point, LocalParams};
pub use global::{global_solve, EnergyRow, GlobalResult};
pub use picard::{picard_solve, PicardResult};
pub use uniqueness::{uniqueness_check, UniquenessReport};

/// Time-stepping scheme for the linear part.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Exponential Euler with exact `e^{-|k|^2 dt}` factors (default).
    ExponentialEuler,
    /// Semi-implicit Euler: implicit linear part, explicit nonlinearity.
    Imex,
}

/// Solver configuration shared by the local and global regimes.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub hurst: HurstParam,
    pub cutoff: u32,
    /// Base time step (the `z` trajectory is sampled at this resolution).
    pub dt: f64,
    pub t_final: f64,
    pub scheme: Scheme,
    pub picard_tol: f64,
    pub picard_max_iter: u32,
    pub blowup_threshold: f64,
    /// Target regularity index for diagnostics and the global regime.
    pub sigma: f64,
    /// Local-regime exponents; checked against the admissibility conditions.
    pub local: LocalParams,
    /// Run the local solve even when the condition check fails.
    pub override_conditions: bool,
}

impl SolverConfig {
    pub fn new(hurst: HurstParam, cutoff: u32, dt: f64, t_final: f64) -> Self {
        let local = sample_point(hurst).unwrap_or(LocalParams {
            alpha: 0.1875,
            sigma: -0.15625,
            beta: 16.0 / 3.0,
            p: 64.0 / 7.0,
            q: 16.0 / 3.0,
        });
        Self {
            hurst,
            cutoff,
            dt,
            t_final,
            scheme: Scheme::ExponentialEuler,
            picard_tol: 1e-9,
            picard_max_iter: 60,
            blowup_threshold: 1e6,
            sigma: local.sigma,
            local,
            override_conditions: false,
        }
    }
}

/// Time-indexed solution fields with per-step norm diagnostics.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub fields: Vec<FourierField>,
    pub h0_norms: Vec<f64>,
    pub grad_norms: Vec<f64>,
    pub hsigma_norms: Vec<f64>,
    /// Time at which the run halted on the blow-up guard, if it did.
    pub stopped_at: Option<f64>,
}

impl Trajectory {
    pub(crate) fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            fields: Vec::with_capacity(n),
            h0_norms: Vec::with_capacity(n),
            grad_norms: Vec::with_capacity(n),
            hsigma_norms: Vec::with_capacity(n),
            stopped_at: None,
        }
    }

    pub(crate) fn push(&mut self, t: f64, field: FourierField, sigma: f64) {
        self.times.push(t);
        self.h0_norms.push(field.sobolev_norm(0.0));
        self.grad_norms.push(field.sobolev_norm(1.0));
        self.hsigma_norms.push(field.sobolev_norm(sigma));
        self.fields.push(field);
    }

    pub fn sup_hsigma(&self) -> f64 {
        self.hsigma_norms.iter().cloned().fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }
}

/// One exponential-Euler step: `u <- e^{dt A} u + dt phi1(dt A) f`.
pub(crate) fn etd_step(u: &FourierField, f: &FourierField, dt: f64) -> Result<FourierField> {
    u.check_same_cutoff(f)?;
    let mut out = u.clone();
    let layout = out.layout();
    for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
        let lam = layout.index_to_wave(i).norm_sq() as f64;
        let x = lam * dt;
        let decay = (-x).exp();
        // dt * (1 - e^{-x})/x, stable near x = 0.
        let weight = -dt * (-x).exp_m1() / x;
        *c = *c * decay + f.coeffs()[i] * weight;
    }
    Ok(out)
}

/// One semi-implicit Euler step: `u <- (u + dt f) / (1 + dt |k|^2)`.
pub(crate) fn imex_step(u: &FourierField, f: &FourierField, dt: f64) -> Result<FourierField> {
    u.check_same_cutoff(f)?;
    let mut out = u.clone();
    let layout = out.layout();
    for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
        let lam = layout.index_to_wave(i).norm_sq() as f64;
        *c = (*c + f.coeffs()[i] * dt) / (1.0 + lam * dt);
    }
    Ok(out)
}

pub(crate) fn step(
    scheme: Scheme,
    u: &FourierField,
    f: &FourierField,
    dt: f64,
) -> Result<FourierField> {
    match scheme {
        Scheme::ExponentialEuler => etd_step(u, f, dt),
        Scheme::Imex => imex_step(u, f, dt),
    }
}

/// Forcing `-B(u+z, u+z)`, the sum of all four bilinear terms.
pub(crate) fn forcing(u: &FourierField, z: &FourierField) -> Result<FourierField> {
    let w = u.add(z)?;
    Ok(bilinear_fft(&w, &w, None)?.scale(-1.0))
}

/// Pointwise reconstruction `v = u + z` with `H^sigma` diagnostics.
pub fn reconstruct_v(u_traj: &Trajectory, z_traj: &ZTrajectory, stride: usize) -> Result<Trajectory> {
    if (u_traj.len() - 1) * stride + 1 > z_traj.len() {
        return Err(Error::GridMismatch {
            detail: format!(
                "velocity trajectory needs {} z-samples at stride {stride}, have {}",
                (u_traj.len() - 1) * stride + 1,
                z_traj.len()
            ),
        });
    }
    for (i, (&tu, tz)) in u_traj
        .times
        .iter()
        .zip(z_traj.times.iter().step_by(stride))
        .enumerate()
    {
        if (tu - tz).abs() > 1e-9 {
            return Err(Error::GridMismatch {
                detail: format!("time {i}: u at {tu}, z at {tz}"),
            });
        }
    }
    let mut out = Trajectory::with_capacity(u_traj.len());
    let sigma_guess = 0.0;
    for (i, f) in u_traj.fields.iter().enumerate() {
        let v = f.add(z_traj.field(i * stride))?;
        out.push(u_traj.times[i], v, sigma_guess);
    }
    out.stopped_at = u_traj.stopped_at;
    Ok(out)
}

/// Deterministic exponential-integrator solve of the remainder equation
/// against a given `z` trajectory; the workhorse behind both regimes.
pub fn integrate(
    cfg: &SolverConfig,
    u0: &FourierField,
    ztraj: &ZTrajectory,
    stride: usize,
    steps: usize,
) -> Result<Trajectory> {
    if steps * stride + 1 > ztraj.len() {
        return Err(Error::GridMismatch {
            detail: format!(
                "need {} z-samples at stride {stride}, trajectory has {}",
                steps * stride + 1,
                ztraj.len()
            ),
        });
    }
    let dt = ztraj.dt * stride as f64;
    let mut traj = Trajectory::with_capacity(steps + 1);
    let mut u = u0.clone();
    traj.push(0.0, u.clone(), cfg.sigma);
    for n in 0..steps {
        let z = ztraj.field(n * stride);
        let f = forcing(&u, z)?;
        u = step(cfg.scheme, &u, &f, dt)?;
        let t = (n + 1) as f64 * dt;
        traj.push(t, u.clone(), cfg.sigma);
        if traj.hsigma_norms[n + 1] > cfg.blowup_threshold {
            traj.stopped_at = Some(t);
            break;
        }
    }
    Ok(traj)
}
