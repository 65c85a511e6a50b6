//! Command-line harness: key-value configuration with flag overrides,
//! deterministic seeding, CSV artifacts with manifest headers, and one
//! subcommand per verification surface.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::acceptance::{self, Tier};
use crate::bilinear::{bilinear_direct_report, bilinear_fft};
use crate::error::{Error, Result};
use crate::fbm::{sample_family, sample_fbm, HurstParam};
use crate::field::FourierField;
use crate::fou::{
    burnin_horizon, c_h_constant, sample_fou_path, sample_z_trajectory, z_regularity_report,
    OuParams, DEFAULT_TRUNC_TOL,
};
use crate::gibbs::{bzz_second_moment, interaction_sum, weighted_interaction_sum, triple_interaction_sum};
use crate::rng::stream_rng;
use crate::solver::{global_solve, picard_solve, uniqueness_check, SolverConfig};
use crate::stats;
use crate::wave::WaveIndex;

/// Fully resolved run configuration (config file, then flags, then defaults).
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub hurst: f64,
    pub cutoff: u32,
    pub dt: f64,
    pub t_final: f64,
    pub seed: u64,
    pub replicas: u32,
    pub rho: f64,
    pub sigma: f64,
    pub tol: f64,
    pub threads: usize,
    pub out: PathBuf,
    pub snap_every: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            hurst: 0.75,
            cutoff: 16,
            dt: 0.01,
            t_final: 1.0,
            seed: 1,
            replicas: 0,
            rho: -0.75,
            sigma: 0.4,
            tol: 1e-6,
            threads: 0,
            out: PathBuf::from("out"),
            snap_every: 0,
        }
    }
}

const KNOWN_KEYS: &[&str] = &[
    "hurst", "cutoff", "dt", "t_final", "seed", "replicas", "rho", "sigma", "tol", "threads",
    "out", "snap_every",
];

impl RunConfig {
    fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path)?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(Error::Parse {
                line: lineno + 1,
                detail: format!("expected key = value, got {raw:?}"),
            })?;
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(Error::Config {
                    detail: format!("unknown configuration key {key:?}"),
                });
            }
            let bad = |detail: String| Error::Parse {
                line: lineno + 1,
                detail,
            };
            match key {
                "hurst" => self.hurst = value.parse().map_err(|_| bad(format!("bad hurst {value:?}")))?,
                "cutoff" => self.cutoff = value.parse().map_err(|_| bad(format!("bad cutoff {value:?}")))?,
                "dt" => self.dt = value.parse().map_err(|_| bad(format!("bad dt {value:?}")))?,
                "t_final" => self.t_final = value.parse().map_err(|_| bad(format!("bad t_final {value:?}")))?,
                "seed" => self.seed = value.parse().map_err(|_| bad(format!("bad seed {value:?}")))?,
                "replicas" => self.replicas = value.parse().map_err(|_| bad(format!("bad replicas {value:?}")))?,
                "rho" => self.rho = value.parse().map_err(|_| bad(format!("bad rho {value:?}")))?,
                "sigma" => self.sigma = value.parse().map_err(|_| bad(format!("bad sigma {value:?}")))?,
                "tol" => self.tol = value.parse().map_err(|_| bad(format!("bad tol {value:?}")))?,
                "threads" => self.threads = value.parse().map_err(|_| bad(format!("bad threads {value:?}")))?,
                "out" => self.out = PathBuf::from(value),
                "snap_every" => self.snap_every = value.parse().map_err(|_| bad(format!("bad snap_every {value:?}")))?,
                _ => unreachable!(),
            }
        }
        Ok(())
    }

    /// Stable hash of the effective configuration (FNV-1a).
    fn hash(&self) -> u64 {
        let text = format!(
            "hurst={};cutoff={};dt={};t_final={};seed={};replicas={};rho={};sigma={};tol={};snap_every={}",
            self.hurst, self.cutoff, self.dt, self.t_final, self.seed, self.replicas, self.rho,
            self.sigma, self.tol, self.snap_every
        );
        let mut h = 0xcbf29ce484222325u64;
        for b in text.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h
    }

    fn hurst_param(&self) -> Result<HurstParam> {
        HurstParam::new(self.hurst)
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "fns2d",
    about = "Spectral simulation and verification suite for 2D stochastic Navier-Stokes with fractional noise",
    version
)]
struct Cli {
    /// Plain key-value configuration file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    hurst: Option<f64>,
    #[arg(long, global = true)]
    cutoff: Option<u32>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long = "t-final", global = true)]
    t_final: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    replicas: Option<u32>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    rho: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    sigma: Option<f64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker-thread cap (default: FNS2D_THREADS or all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory for CSV artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Field snapshot interval for trajectory subcommands (0 = off).
    #[arg(long = "snap-every", global = true)]
    snap_every: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample one fBm path (and, with --cutoff, a per-mode complex family).
    SampleFbm,
    /// Monte Carlo check of the stationary convolution variance law.
    FouVariance,
    /// Truncated-series second moments of z across cutoffs with verdicts.
    ZRegularity,
    /// Convolution-versus-FFT equivalence report for the bilinear term.
    BilinearCheck,
    /// Wick series and Monte Carlo for moments of B(z,z).
    BzzMoment,
    /// Lattice-series oracles: interaction sums and the triple series.
    SeriesOracle,
    /// Local-regime Picard iteration with contraction certificate.
    Picard,
    /// Global-regime exponential-Euler solve with energy ledger.
    Simulate,
    /// Pathwise-uniqueness harness (replay, delta sweep, negative control).
    Uniqueness,
    /// Run the acceptance suite and emit a pass/fail table.
    Accept {
        /// Run the sub-minute tier only.
        #[arg(long)]
        quick: bool,
        /// Run a comma-separated subset of criteria.
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<u32>>,
    },
}

/// Entry point used by the binary: parses `std::env::args`.
pub fn run_default() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    run(&args)
}

/// Parse and execute; returns the process exit code.
pub fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap prints its own help/usage text.
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(Error::Config { detail }) => {
            eprintln!("configuration error: {detail}");
            2
        }
        Err(Error::Parse { line, detail }) => {
            eprintln!("configuration parse error at line {line}: {detail}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidHurst { .. }
                | Error::HurstTooSmallForMoment { .. }
                | Error::ParameterRegion { .. }
                | Error::StepTooLarge { .. }
                | Error::CutoffMismatch { .. }
                | Error::GridTooSmall { .. } => 2,
                _ => 3,
            }
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    macro_rules! merge {
        ($($field:ident),*) => {
            $(if let Some(v) = cli.$field { cfg.$field = v; })*
        };
    }
    merge!(hurst, cutoff, dt, t_final, seed, replicas, rho, sigma, tol, threads, snap_every);
    if let Some(out) = cli.out {
        cfg.out = out;
    }
    if cfg.threads == 0 {
        if let Ok(env) = std::env::var("FNS2D_THREADS") {
            cfg.threads = env.parse().map_err(|_| Error::Config {
                detail: format!("FNS2D_THREADS must be an integer, got {env:?}"),
            })?;
        }
    }
    if cfg.threads > 0 {
        // Ignore failure: the global pool can only be built once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global();
    }
    fs::create_dir_all(&cfg.out)?;
    match cli.command {
        Command::SampleFbm => cmd_sample_fbm(&cfg),
        Command::FouVariance => cmd_fou_variance(&cfg),
        Command::ZRegularity => cmd_z_regularity(&cfg),
        Command::BilinearCheck => cmd_bilinear_check(&cfg),
        Command::BzzMoment => cmd_bzz_moment(&cfg),
        Command::SeriesOracle => cmd_series_oracle(&cfg),
        Command::Picard => cmd_picard(&cfg),
        Command::Simulate => cmd_simulate(&cfg),
        Command::Uniqueness => cmd_uniqueness(&cfg),
        Command::Accept { quick, criteria } => cmd_accept(&cfg, quick, criteria.as_deref()),
    }
}

fn artifact(cfg: &RunConfig, name: &str, subcmd: &str) -> Result<BufWriter<fs::File>> {
    let path = cfg.out.join(name);
    let mut w = BufWriter::new(fs::File::create(&path)?);
    writeln!(
        w,
        "# fns2d {subcmd} v1 seed={} config_hash={:016x}",
        cfg.seed,
        cfg.hash()
    )?;
    Ok(w)
}

fn cmd_sample_fbm(cfg: &RunConfig) -> Result<i32> {
    let h = cfg.hurst_param()?;
    let steps = (cfg.t_final / cfg.dt).round().max(1.0) as usize;
    let path = sample_fbm(h, steps, cfg.dt, cfg.seed)?;
    let mut w = artifact(cfg, "fbm_path.csv", "sample-fbm")?;
    path.write_csv(&mut w)?;
    if cfg.cutoff > 0 && cfg.cutoff <= 8 {
        let family = sample_family(h, cfg.cutoff, steps, cfg.dt, 0.0, cfg.seed)?;
        let mut fw = artifact(cfg, "fbm_family.csv", "sample-fbm")?;
        family.write_csv(&mut fw)?;
    }
    println!(
        "wrote fbm_path.csv ({} samples, H={}, dt={})",
        steps + 1,
        cfg.hurst,
        cfg.dt
    );
    Ok(0)
}

fn cmd_fou_variance(cfg: &RunConfig) -> Result<i32> {
    let h = cfg.hurst_param()?;
    let replicas = if cfg.replicas == 0 { 5_000 } else { cfg.replicas };
    let chc = c_h_constant(h, cfg.tol)?;
    let mut w = artifact(cfg, "fou_variance.csv", "fou-variance")?;
    writeln!(w, "lambda,hurst,target,mc_var,mc_se,z_score")?;
    let mut worst: f64 = 0.0;
    for lam in [1.0, 4.0, 9.0] {
        let params = OuParams::new(lam, h)?;
        let target = crate::fou::stationary_variance(&params, &chc)?;
        let dt = 1.0 / (8.0 * lam);
        let burn = burnin_horizon(lam, DEFAULT_TRUNC_TOL);
        let steps = ((burn + 1.0) / dt).ceil() as usize;
        let mut acc = stats::Running::default();
        for rep in 0..replicas as u64 {
            let mut rng = stream_rng(cfg.seed, &[20, lam.to_bits(), rep]);
            let p = crate::fbm::sample_fbm_with_rng(h, steps, dt, -burn, &mut rng)?;
            acc.push(sample_fou_path(&params, &p, &[steps])?.values[0]);
        }
        let z = (acc.variance() - target) / acc.stderr_variance_normal();
        worst = worst.max(z.abs());
        writeln!(
            w,
            "{},{},{},{},{},{}",
            lam,
            cfg.hurst,
            target,
            acc.variance(),
            acc.stderr_variance_normal(),
            z
        )?;
    }
    println!("fou-variance: worst |z| = {worst:.2} over 3 decay rates ({replicas} replicas)");
    Ok(if worst <= 4.0 { 0 } else { 1 })
}

fn cmd_z_regularity(cfg: &RunConfig) -> Result<i32> {
    let h = cfg.hurst_param()?;
    let r_star = 2.0 * (cfg.hurst - 0.5);
    let grid = [r_star - 0.3, r_star - 0.1, r_star + 0.1, r_star + 0.3];
    let mc = if cfg.replicas > 0 {
        Some((cfg.replicas, cfg.seed))
    } else {
        None
    };
    let rows = z_regularity_report(h, &[8, 16, 32, 64], &grid, mc, cfg.tol)?;
    let mut w = artifact(cfg, "z_regularity.csv", "z-regularity")?;
    writeln!(w, "H,r,N,series_value,mc_value,mc_stderr,verdict")?;
    for row in &rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            row.hurst,
            row.r,
            row.cutoff,
            row.series_value,
            row.mc_value.map(|v| v.to_string()).unwrap_or_default(),
            row.mc_stderr.map(|v| v.to_string()).unwrap_or_default(),
            row.verdict
        )?;
    }
    println!("z-regularity: {} rows written (threshold r* = {r_star})", rows.len());
    Ok(0)
}

fn cmd_bilinear_check(cfg: &RunConfig) -> Result<i32> {
    let mut w = artifact(cfg, "bilinear_check.csv", "bilinear-check")?;
    writeln!(w, "cutoff,trial,max_rel_diff,truncated_mass")?;
    let mut worst: f64 = 0.0;
    for n in [4u32, 8, 16] {
        for trial in 0..5u64 {
            let u = FourierField::random(n, 0.7, cfg.seed.wrapping_add(2 * trial));
            let v = FourierField::random(n, 0.7, cfg.seed.wrapping_add(2 * trial + 1));
            let rep = bilinear_direct_report(&u, &v)?;
            let f = bilinear_fft(&u, &v, None)?;
            let scale = rep.field.sobolev_norm(0.0).max(1e-30);
            let mut diff: f64 = 0.0;
            for (k, dv) in rep.field.iter_positive() {
                diff = diff.max((f.get(k) - dv).norm() / scale);
            }
            worst = worst.max(diff);
            writeln!(w, "{n},{trial},{diff:e},{}", rep.truncated_mass)?;
        }
    }
    println!("bilinear-check: max relative difference {worst:.2e}");
    Ok(if worst < 1e-10 { 0 } else { 1 })
}

fn cmd_bzz_moment(cfg: &RunConfig) -> Result<i32> {
    let h = cfg.hurst_param()?;
    if cfg.hurst <= 0.25 {
        return Err(Error::HurstTooSmallForMoment { h: cfg.hurst });
    }
    let chc = c_h_constant(h, cfg.tol)?;
    let mc = if cfg.replicas > 0 {
        Some((cfg.replicas, cfg.seed))
    } else {
        None
    };
    let report = bzz_second_moment(h, chc, cfg.cutoff, cfg.rho, mc)?;
    let mut w = artifact(cfg, "bzz_moment.csv", "bzz-moment")?;
    writeln!(w, "rho,m,cutoff,series_value,mc_value,mc_stderr,verdict")?;
    writeln!(
        w,
        "{},{},{},{},{},{},{}",
        report.rho,
        report.m,
        report.cutoff,
        report.series_value,
        report.mc_value.map(|v| v.to_string()).unwrap_or_default(),
        report.mc_stderr.map(|v| v.to_string()).unwrap_or_default(),
        report.verdict
    )?;
    if cfg.cutoff <= 6 {
        // Fourth moment is affordable at small cutoffs.
        let m4 = crate::gibbs::bzz_fourth_moment(h, chc, cfg.cutoff, cfg.rho, mc)?;
        writeln!(
            w,
            "{},2,{},{},{},{},{}",
            m4.rho,
            m4.cutoff,
            m4.series_value,
            m4.mc_value.map(|v| v.to_string()).unwrap_or_default(),
            m4.mc_stderr.map(|v| v.to_string()).unwrap_or_default(),
            m4.verdict
        )?;
    }
    println!(
        "bzz-moment: series {:.6} ({}), verdict {}",
        report.series_value,
        report
            .mc_value
            .map(|v| format!("mc {v:.6}"))
            .unwrap_or_else(|| "no MC".into()),
        report.verdict
    );
    Ok(0)
}

fn cmd_series_oracle(cfg: &RunConfig) -> Result<i32> {
    let h = cfg.hurst_param()?;
    let mut w = artifact(cfg, "series_oracle.csv", "series-oracle")?;
    writeln!(w, "series,k1,k2,hurst,rho,trunc,value,tail_bound")?;
    let trunc = 128u32;
    for &k in &[8i32, 16, 32, 64] {
        let (v, tail) = interaction_sum(WaveIndex::new(k, 0), h, trunc)?;
        writeln!(w, "1,{k},0,{},,{trunc},{v},{tail}", cfg.hurst)?;
    }
    if cfg.hurst > 0.5 && cfg.rho > -1.0 + 1e-9 && cfg.rho < 2.0 * (cfg.hurst - 1.0) {
        for &k in &[8i32, 16, 32, 64] {
            let (v, tail) = weighted_interaction_sum(WaveIndex::new(k, 0), h, cfg.rho, trunc)?;
            writeln!(w, "2,{k},0,{},{},{trunc},{v},{tail}", cfg.hurst, cfg.rho)?;
        }
    }
    let rep = triple_interaction_sum(h, cfg.rho, 12)?;
    for (r, v) in &rep.partials {
        writeln!(w, "3,,,{},{},{r},{v},", cfg.hurst, cfg.rho)?;
    }
    println!(
        "series-oracle: triple series {:.6} ({}), partials {:?}",
        rep.value, rep.verdict, rep.partials
    );
    Ok(0)
}

fn snapshots(cfg: &RunConfig, prefix: &str, traj: &crate::solver::Trajectory) -> Result<()> {
    if cfg.snap_every == 0 {
        return Ok(());
    }
    for (i, f) in traj.fields.iter().enumerate() {
        if i % cfg.snap_every == 0 {
            let mut w = artifact(cfg, &format!("{prefix}_{i:06}.csv"), prefix)?;
            f.write_csv(&mut w)?;
        }
    }
    Ok(())
}

fn cmd_picard(cfg: &RunConfig) -> Result<i32> {
    let h = cfg.hurst_param()?;
    let steps = (cfg.t_final / cfg.dt).round().max(1.0) as usize;
    let z = sample_z_trajectory(h, cfg.cutoff, steps, cfg.dt, DEFAULT_TRUNC_TOL, cfg.seed)?;
    let solver_cfg = SolverConfig::new(h, cfg.cutoff, cfg.dt, cfg.t_final);
    let u0 = FourierField::random(cfg.cutoff, 1.5, cfg.seed ^ 0xF00D).scale(0.05);
    let res = picard_solve(&solver_cfg, &u0, &z, 1)?;
    let mut w = artifact(cfg, "picard.csv", "picard")?;
    writeln!(w, "iteration,residual,contraction_factor")?;
    for (i, r) in res.residuals.iter().enumerate() {
        let f = if i == 0 {
            String::new()
        } else {
            res.contraction_factors[i - 1].to_string()
        };
        writeln!(w, "{i},{r},{f}")?;
    }
    snapshots(cfg, "picard_snap", &res.trajectory)?;
    println!(
        "picard: converged={} certified_time={:?} residuals={:?}",
        res.converged, res.certified_time, res.residuals
    );
    Ok(if res.certified_time.is_some() { 0 } else { 1 })
}

fn cmd_simulate(cfg: &RunConfig) -> Result<i32> {
    let h = cfg.hurst_param()?;
    let steps = (cfg.t_final / cfg.dt).round().max(1.0) as usize;
    let z = sample_z_trajectory(h, cfg.cutoff, steps, cfg.dt, DEFAULT_TRUNC_TOL, cfg.seed)?;
    let mut solver_cfg = SolverConfig::new(h, cfg.cutoff, cfg.dt, cfg.t_final);
    solver_cfg.sigma = cfg.sigma;
    let v0 = {
        let raw = FourierField::random(cfg.cutoff, 2.0, cfg.seed ^ 0xBEEF);
        raw.scale(1.0 / raw.sobolev_norm(cfg.sigma))
    };
    let res = global_solve(&solver_cfg, &v0, &z, 1, 10)?;
    let mut w = artifact(cfg, "simulate.csv", "simulate")?;
    writeln!(w, "t,u_h0,u_grad,u_hsigma")?;
    for i in 0..res.trajectory.len() {
        writeln!(
            w,
            "{},{},{},{}",
            res.trajectory.times[i],
            res.trajectory.h0_norms[i],
            res.trajectory.grad_norms[i],
            res.trajectory.hsigma_norms[i]
        )?;
    }
    let mut ew = artifact(cfg, "energy_ledger.csv", "simulate")?;
    writeln!(ew, "t,kinetic,dissipation,pair_buz,pair_bzz,identity_residual")?;
    for row in &res.energy {
        writeln!(
            ew,
            "{},{},{},{},{},{}",
            row.t, row.kinetic, row.dissipation, row.pair_buz, row.pair_bzz, row.identity_residual
        )?;
    }
    snapshots(cfg, "simulate_snap", &res.trajectory)?;
    println!(
        "simulate: {} steps, sup ||u||_sigma = {:.4}, blown_up={}",
        res.trajectory.len() - 1,
        res.trajectory.sup_hsigma(),
        res.blown_up
    );
    Ok(if res.blown_up { 1 } else { 0 })
}

fn cmd_uniqueness(cfg: &RunConfig) -> Result<i32> {
    let h = cfg.hurst_param()?;
    let steps = (cfg.t_final / cfg.dt).round().max(1.0) as usize;
    let z = sample_z_trajectory(h, cfg.cutoff, steps, cfg.dt, DEFAULT_TRUNC_TOL, cfg.seed)?;
    let mut solver_cfg = SolverConfig::new(h, cfg.cutoff, cfg.dt, cfg.t_final);
    solver_cfg.sigma = cfg.sigma;
    let v0 = FourierField::random(cfg.cutoff, 2.0, cfg.seed ^ 0xCAFE);
    let report = uniqueness_check(&solver_cfg, &v0, &z, 1, &[1e-3, 1e-5, 1e-7], cfg.seed)?;
    let mut w = artifact(cfg, "uniqueness.csv", "uniqueness")?;
    writeln!(w, "# replay_sup_diff={}", report.replay_sup_diff)?;
    writeln!(w, "# negative_control_diff={}", report.negative_control_diff)?;
    writeln!(w, "delta,final_ratio,sup_ratio")?;
    for row in &report.delta_rows {
        writeln!(w, "{},{},{}", row.delta, row.final_ratio, row.sup_ratio)?;
    }
    let ratios: Vec<f64> = report.delta_rows.iter().map(|r| r.final_ratio).collect();
    let spread = ratios.iter().cloned().fold(0.0f64, f64::max)
        / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    println!(
        "uniqueness: replay diff {:.2e}, response spread {spread:.2}x, control {:.3}",
        report.replay_sup_diff, report.negative_control_diff
    );
    Ok(if report.replay_sup_diff < 1e-12 && spread < 2.0 {
        0
    } else {
        1
    })
}

fn cmd_accept(cfg: &RunConfig, quick: bool, criteria: Option<&[u32]>) -> Result<i32> {
    let tier = if quick { Tier::Quick } else { Tier::Full };
    let reports = acceptance::run(tier, criteria);
    let mut w = artifact(cfg, "acceptance.csv", "accept")?;
    writeln!(w, "id,name,passed,seconds,details")?;
    for r in &reports {
        writeln!(
            w,
            "{},{},{},{:.2},\"{}\"",
            r.id,
            r.name,
            r.passed,
            r.seconds,
            r.details.replace('"', "'")
        )?;
    }
    let failed: Vec<u32> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    if failed.is_empty() {
        println!("all {} criteria passed", reports.len());
        Ok(0)
    } else {
        println!("{} of {} criteria failed: {:?}", failed.len(), reports.len(), failed);
        Ok(1)
    }
}
