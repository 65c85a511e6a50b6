//! End-to-end verification suite.
//!
//! Each criterion is a self-contained check with pinned parameters and
//! tolerances, returning a pass/fail report; `run` executes a tier and prints
//! one line per criterion. The same entry points back the `accept` subcommand
//! and the `acceptance` integration-test target.

use std::time::Instant;

use rayon::prelude::*;

use crate::bilinear::{bilinear_direct, bilinear_fft, trilinear, BandTable};
use crate::error::Result;
use crate::fbm::{sample_fbm_with_rng, HurstParam};
use crate::field::FourierField;
use crate::fou::{
    burnin_horizon, c_h_constant, sample_fou_path, sample_z_trajectory, z_norm_series, OuParams,
    SeriesVerdict, DEFAULT_TRUNC_TOL,
};
use crate::gibbs::{
    bzz_divergence_verdict, bzz_outer_partials, bzz_second_moment, interaction_sum, weighted_interaction_sum,
    triple_interaction_sum, GibbsSpec, ModeSpectrum,
};
use crate::rng::stream_rng;
use crate::solver::{
    check_parameter_conditions, global_solve, grid_search, picard_solve, sample_point,
    uniqueness_check, SolverConfig,
};
use crate::stats;
use crate::wave::WaveIndex;
use crate::wick::{fourth_moment_cases, fourth_moment_engine};

/// Verdict for one acceptance criterion.
#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
    pub seconds: f64,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:2} {:<28} ({:6.1}s)  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.details
        )
    }
}

/// Which subset of the suite to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tier {
    /// Sub-minute deterministic subset (criteria 1, 3, 4, 8 at reduced Monte
    /// Carlo sizes). Criterion 2 is full-tier only: its pinned rate gates sit
    /// beyond what the lattice partial sums can satisfy, so it always reports
    /// the measured rates as a failure.
    Quick,
    /// The full pinned suite.
    Full,
}

fn h(v: f64) -> HurstParam {
    HurstParam::new(v).unwrap()
}

fn timed<F: FnOnce() -> (bool, String)>(
    id: u32,
    name: &'static str,
    f: F,
) -> CriterionReport {
    let start = Instant::now();
    let (passed, details) = f();
    CriterionReport {
        id,
        name,
        passed,
        details,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Run a tier (or an explicit list of criteria), printing one line each.
pub fn run(tier: Tier, only: Option<&[u32]>) -> Vec<CriterionReport> {
    let ids: Vec<u32> = match only {
        Some(list) => list.to_vec(),
        None => match tier {
            Tier::Quick => vec![1, 3, 4, 8],
            Tier::Full => (1..=11).collect(),
        },
    };
    let quick = tier == Tier::Quick;
    let mut out = Vec::new();
    for id in ids {
        let report = match id {
            1 => c01(quick),
            2 => c02(),
            3 => c03(quick),
            4 => c04(quick),
            5 => c05(quick),
            6 => c06(quick),
            7 => c07(quick),
            8 => c08(),
            9 => c09(quick),
            10 => c10(quick),
            11 => c11(quick),
            other => CriterionReport {
                id: other,
                name: "unknown",
                passed: false,
                details: "no such criterion".into(),
                seconds: 0.0,
            },
        };
        println!("{}", report.line());
        out.push(report);
    }
    out
}

fn c01(quick: bool) -> CriterionReport {
    timed(1, "fOU variance law", || {
        let tol = 1e-6;
        let c_half = match c_h_constant(h(0.5), tol) {
            Ok(c) => c,
            Err(e) => return (false, format!("quadrature failed: {e}")),
        };
        if (c_half.value - 0.5).abs() > 1e-6 || c_half.quadrature_error > 1e-6 {
            return (
                false,
                format!(
                    "C_1/2 = {} (err {:.2e})",
                    c_half.value, c_half.quadrature_error
                ),
            );
        }
        let replicas: u64 = if quick { 2_000 } else { 20_000 };
        let lambdas = [1.0, 4.0, 9.0];
        let hs = if quick { vec![0.6] } else { vec![0.45, 0.6, 0.75] };
        let mut lines = Vec::new();
        let mut ok = true;
        for &hv in &hs {
            let chc = match c_h_constant(h(hv), tol) {
                Ok(c) => c,
                Err(e) => return (false, format!("quadrature failed at H={hv}: {e}")),
            };
            if chc.quadrature_error > 1e-6 {
                return (false, format!("H={hv}: error bound {:.2e}", chc.quadrature_error));
            }
            for &lam in &lambdas {
                let params = OuParams::new(lam, h(hv)).unwrap();
                let target = chc.value * lam.powf(-2.0 * hv);
                let dt = 1.0 / (8.0 * lam);
                let burn = burnin_horizon(lam, DEFAULT_TRUNC_TOL);
                let steps = ((burn + 1.0) / dt).ceil() as usize;
                let values: Vec<f64> = (0..replicas)
                    .into_par_iter()
                    .map(|rep| {
                        let mut rng =
                            stream_rng(0xAC01, &[hv.to_bits(), lam.to_bits(), rep]);
                        let p = sample_fbm_with_rng(h(hv), steps, dt, -burn, &mut rng).unwrap();
                        sample_fou_path(&params, &p, &[steps]).unwrap().values[0]
                    })
                    .collect();
                let mut acc = stats::Running::default();
                for v in &values {
                    acc.push(*v);
                }
                let se = acc.stderr_variance_normal();
                let dev = (acc.variance() - target).abs();
                if dev > 4.0 * se {
                    ok = false;
                    lines.push(format!(
                        "lam={lam} H={hv}: var={:.5} target={target:.5} ({:.1} SE)",
                        acc.variance(),
                        dev / se
                    ));
                }
            }
        }
        if ok {
            (
                true,
                format!(
                    "{} combos within 4 SE at {replicas} replicas; C_1/2 = {:.7}",
                    lambdas.len() * hs.len(),
                    c_half.value
                ),
            )
        } else {
            (false, lines.join("; "))
        }
    })
}

fn c02() -> CriterionReport {
    timed(2, "z-regularity threshold", || {
        // Literal gates: relative change < 3% under doubling below the
        // critical index, growth factor > 2 per doubling above it.
        let cutoffs = [8u32, 16, 32];
        let mut ok = true;
        let mut lines = Vec::new();
        for hv in [0.45, 0.6, 0.75] {
            let chc = c_h_constant(h(hv), 1e-6).unwrap();
            let r_star = 2.0 * (hv - 0.5);
            let conv: Vec<f64> = cutoffs
                .iter()
                .map(|&n| z_norm_series(&chc, r_star - 0.1, n))
                .collect();
            let div: Vec<f64> = cutoffs
                .iter()
                .map(|&n| z_norm_series(&chc, r_star + 0.1, n))
                .collect();
            let conv_changes = [
                (conv[1] - conv[0]).abs() / conv[1],
                (conv[2] - conv[1]).abs() / conv[2],
            ];
            let div_factors = [div[1] / div[0], div[2] / div[1]];
            let conv_ok = conv_changes.iter().all(|&c| c < 0.03);
            let div_ok = div_factors.iter().all(|&f| f > 2.0);
            // The slope-sign verdict does bracket the threshold; report it.
            let verdict_lo = crate::fou::series_verdict(&cutoffs, &conv);
            let verdict_hi = crate::fou::series_verdict(&cutoffs, &div);
            if !(conv_ok && div_ok) {
                ok = false;
            }
            lines.push(format!(
                "H={hv}: rel changes {:.1}%/{:.1}% (gate <3%), growth {:.2}x/{:.2}x (gate >2x), slope verdicts {}/{}",
                100.0 * conv_changes[0],
                100.0 * conv_changes[1],
                div_factors[0],
                div_factors[1],
                verdict_lo,
                verdict_hi
            ));
        }
        (ok, lines.join(" | "))
    })
}

fn c03(quick: bool) -> CriterionReport {
    timed(3, "bilinear oracle equivalence", || {
        let cutoffs: &[u32] = if quick { &[4, 8] } else { &[4, 8, 16] };
        let pairs = if quick { 6 } else { 20 };
        let mut worst_rel = 0.0f64;
        let mut worst_conj = 0.0f64;
        for &n in cutoffs {
            for trial in 0..pairs {
                let u = FourierField::random(n, 0.7, 0xB100 + trial);
                let v = FourierField::random(n, 0.7, 0xB200 + trial);
                let d = match bilinear_direct(&u, &v) {
                    Ok(d) => d,
                    Err(e) => return (false, format!("direct failed: {e}")),
                };
                let f = match bilinear_fft(&u, &v, None) {
                    Ok(f) => f,
                    Err(e) => return (false, format!("fft failed: {e}")),
                };
                let scale = d.sobolev_norm(0.0).max(1e-30);
                for (k, dv) in d.iter_positive() {
                    worst_rel = worst_rel.max((f.get(k) - dv).norm() / scale);
                }
                // Conjugate mirror identity on the full band.
                let tu = BandTable::new(&u);
                let tv = BandTable::new(&v);
                for k in crate::wave::band_all(n) {
                    let plus = crate::bilinear::convolve_mode(&tu, &tv, k, n);
                    let minus = crate::bilinear::convolve_mode(&tu, &tv, -k, n);
                    worst_conj = worst_conj.max((plus.conj() + minus).norm() / scale);
                }
            }
        }
        let ok = worst_rel < 1e-10 && worst_conj < 1e-12;
        (
            ok,
            format!("max rel diff {worst_rel:.2e} (gate 1e-10), conj residual {worst_conj:.2e}"),
        )
    })
}

fn c04(quick: bool) -> CriterionReport {
    timed(4, "trilinear identities", || {
        let triples = if quick { 20 } else { 100 };
        let n = 8u32;
        let mut worst_null = 0.0f64;
        let mut worst_anti = 0.0f64;
        for trial in 0..triples {
            let u1 = FourierField::random(n, 0.6, 0xC100 + trial);
            let u2 = FourierField::random(n, 0.6, 0xC200 + trial);
            let u3 = FourierField::random(n, 0.6, 0xC300 + trial);
            let scale = (u1.sobolev_norm(1.0) * u2.sobolev_norm(1.0) * u3.sobolev_norm(1.0))
                .max(1.0);
            let null = trilinear(&u1, &u2, &u2).unwrap().abs()
                / (u1.sobolev_norm(1.0) * u2.sobolev_norm(1.0) * u2.sobolev_norm(1.0)).max(1.0);
            let anti = (trilinear(&u1, &u2, &u3).unwrap() + trilinear(&u1, &u3, &u2).unwrap())
                .abs()
                / scale;
            worst_null = worst_null.max(null);
            worst_anti = worst_anti.max(anti);
        }
        let ok = worst_null < 1e-10 && worst_anti < 1e-10;
        (
            ok,
            format!(
                "{triples} triples: max |<B(u1,u2),u2>| {worst_null:.2e}, max antisymmetry residual {worst_anti:.2e} (gates 1e-10 x scale)"
            ),
        )
    })
}

fn c05(quick: bool) -> CriterionReport {
    timed(5, "B(z,z) second moment", || {
        let n = 8u32;
        let samples = if quick { 1_000 } else { 5_000 };
        let mut lines = Vec::new();
        let mut ok = true;
        for (hv, rho) in [(0.75, -0.75), (0.45, -1.3)] {
            let chc = c_h_constant(h(hv), 1e-7).unwrap();
            let report =
                match bzz_second_moment(h(hv), chc, n, rho, Some((samples, 0xD0 + hv.to_bits()))) {
                    Ok(r) => r,
                    Err(e) => return (false, format!("moment failed: {e}")),
                };
            let mc = report.mc_value.unwrap();
            let se = report.mc_stderr.unwrap();
            let dev = (report.series_value - mc).abs() / se;
            if dev > 4.0 {
                ok = false;
            }
            lines.push(format!(
                "(H={hv}, rho={rho}): series={:.4}, mc={:.4} ({:.1} SE)",
                report.series_value, mc, dev
            ));
            if report.verdict != SeriesVerdict::Converged {
                ok = false;
                lines.push(format!("(H={hv}, rho={rho}) flagged divergent"));
            }
        }
        // Divergence bracketing at (0.45, -1.0), above rho* = 4H-3 = -1.2.
        let chc = c_h_constant(h(0.45), 1e-7).unwrap();
        let (verdict, exponent) = bzz_divergence_verdict(h(0.45), -1.0).unwrap();
        if verdict != SeriesVerdict::Diverged {
            ok = false;
            lines.push(format!("(0.45,-1.0) not flagged divergent (exp {exponent:.2})"));
        } else {
            let partials = bzz_outer_partials(h(0.45), chc, -1.0, &[8, 16, 32], 4).unwrap();
            let growing = partials.windows(2).all(|w| w[1] > w[0] * 1.2);
            if !growing {
                ok = false;
                lines.push(format!("partial sums not growing: {partials:?}"));
            } else {
                lines.push(format!(
                    "(0.45,-1.0) divergent: tail exponent {exponent:.2}, partials {:.2}/{:.2}/{:.2}",
                    partials[0], partials[1], partials[2]
                ));
            }
        }
        (ok, lines.join(" | "))
    })
}

fn c06(quick: bool) -> CriterionReport {
    timed(6, "fourth moment (m = 2)", || {
        let n = 4u32;
        let rho = -0.75;
        let hv = 0.75;
        let chc = c_h_constant(h(hv), 1e-7).unwrap();
        let spec = GibbsSpec::new(h(hv), chc, n).unwrap();
        let s = ModeSpectrum::from_gibbs(&spec);
        let engine = fourth_moment_engine(&s, rho);
        let cases = fourth_moment_cases(&s, rho);
        let mut ok = true;
        let mut lines = Vec::new();
        for c in 0..6 {
            let (a, b) = (engine.classes[c], cases.classes[c]);
            if (a - b).abs() > 1e-11 * (1.0 + a.abs()) {
                ok = false;
                lines.push(format!("class {} mismatch: engine={a}, cases={b}", c + 1));
            }
        }
        let m2 = crate::gibbs::bzz_second_moment_series(&s, rho);
        let disc = cases.disconnected();
        if (disc - m2 * m2).abs() > 1e-12 * m2 * m2 {
            ok = false;
            lines.push(format!("disconnected {disc} != m2^2 {}", m2 * m2));
        }
        let samples = if quick { 50_000 } else { 1_000_000 };
        let (mc, se) = crate::gibbs::bzz_moment_mc(&s, rho, 2, samples, 0xE6).unwrap();
        let dev = (cases.total() - mc).abs() / se;
        if dev > 4.0 {
            ok = false;
            lines.push(format!("MC mismatch: series={}, mc={mc} ({dev:.1} SE)", cases.total()));
        }
        if ok {
            lines.push(format!(
                "engine == case list on 6 classes; disconnected == m2^2; MC {mc:.4} vs series {:.4} ({dev:.1} SE, {samples} samples)",
                cases.total()
            ));
        }
        (ok, lines.join(" | "))
    })
}

fn c07(quick: bool) -> CriterionReport {
    timed(7, "lattice series scalings", || {
        let trunc = if quick { 128 } else { 256 };
        let ks = [8i32, 11, 16, 23, 32, 45, 64];
        let xs: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
        let mut ok = true;
        let mut lines = Vec::new();
        // Pairwise interaction sum, low and high H.
        for (hv, target) in [(0.4, -(8.0 * 0.4 - 2.0)), (0.75, -3.0)] {
            let ys: Vec<f64> = ks
                .par_iter()
                .map(|&k| interaction_sum(WaveIndex::new(k, 0), h(hv), trunc).unwrap().0)
                .collect();
            let slope = stats::loglog_slope(&xs, &ys);
            if (slope - target).abs() > 0.15 {
                ok = false;
            }
            lines.push(format!("S1 slope H={hv}: {slope:.3} (target {target:.2})"));
        }
        // Weighted sum at (0.75, -0.75): target -(4H - 2 rho - 2) = -2.5.
        let ys2: Vec<f64> = ks
            .par_iter()
            .map(|&k| weighted_interaction_sum(WaveIndex::new(k, 0), h(0.75), -0.75, trunc).unwrap().0)
            .collect();
        let slope2 = stats::loglog_slope(&xs, &ys2);
        if (slope2 + 2.5).abs() > 0.15 {
            ok = false;
        }
        lines.push(format!("S2 slope: {slope2:.3} (target -2.50)"));
        // Triple series stabilization.
        let r = if quick { 12 } else { 24 };
        let rep = triple_interaction_sum(h(0.75), -0.75, r).unwrap();
        let m = rep.partials.len();
        let (_, v_lo) = rep.partials[m - 2];
        let (_, v_hi) = rep.partials[m - 1];
        let change = (v_hi - v_lo).abs() / v_hi;
        if change > 0.05 || rep.verdict != SeriesVerdict::Converged {
            ok = false;
        }
        lines.push(format!(
            "triple series change {:.2}% over last doubling (gate 5%), verdict {}",
            100.0 * change,
            rep.verdict
        ));
        let rep_low = triple_interaction_sum(h(0.45), -1.3, 12).unwrap();
        if rep_low.verdict != SeriesVerdict::Converged {
            ok = false;
            lines.push("low-H admissible window flagged divergent".into());
        }
        (ok, lines.join(" | "))
    })
}

fn c08() -> CriterionReport {
    timed(8, "parameter-window checker", || {
        let mut ok = true;
        let mut lines = Vec::new();
        let hurst = h(7.0 / 16.0 + 1.0 / 32.0);
        let point = sample_point(hurst).unwrap();
        let report = check_parameter_conditions(hurst, &point);
        if !report.satisfied {
            ok = false;
            lines.push(format!("canonical point fails: {:?}", report.violated));
        } else {
            lines.push("canonical point at c = 1/32 satisfies (1)-(9)".into());
        }
        if grid_search(h(0.40)).is_some() {
            ok = false;
            lines.push("feasible point found at H = 0.40".into());
        } else {
            lines.push("no feasible point at H = 0.40".into());
        }
        match grid_search(h(0.47)) {
            Some(p) => lines.push(format!(
                "H = 0.47 feasible, e.g. alpha={:.3}, sigma={:.3}, beta={:.2}, p={:.2}",
                p.alpha, p.sigma, p.beta, p.p
            )),
            None => {
                ok = false;
                lines.push("no feasible point at H = 0.47".into());
            }
        }
        (ok, lines.join(" | "))
    })
}

fn c09(quick: bool) -> CriterionReport {
    timed(9, "local Picard contraction", || {
        let hv = 0.47;
        let n = 16u32;
        let dt = 0.002;
        let seeds: u64 = if quick { 3 } else { 10 };
        let steps = 25;
        let results: Vec<(bool, bool, usize)> = (0..seeds)
            .map(|seed| {
                let z = sample_z_trajectory(h(hv), n, steps, dt, DEFAULT_TRUNC_TOL, 0x91C + seed)
                    .unwrap();
                let mut cfg = SolverConfig::new(h(hv), n, dt, steps as f64 * dt);
                cfg.picard_tol = 1e-9;
                let u0 = FourierField::random(n, 1.5, 0xA11 + seed).scale(0.05);
                let res = picard_solve(&cfg, &u0, &z, 1).unwrap();
                let certified = res.certified_time.map(|t| t > 0.0).unwrap_or(false);
                let geometric = res
                    .contraction_factors
                    .iter()
                    .filter(|&&f| f > 0.0)
                    .all(|&f| f < 1.0)
                    && res.contraction_factors.len() >= 2;
                (certified, geometric, res.residuals.len())
            })
            .collect();
        let good = results.iter().filter(|(c, g, _)| *c && *g).count();
        let need = if quick { seeds as usize - 1 } else { 9 };
        let ok = good >= need;
        (
            ok,
            format!(
                "{good}/{seeds} seeds certified a positive contraction interval with geometric decay (need >= {need})"
            ),
        )
    })
}

fn c10(quick: bool) -> CriterionReport {
    timed(10, "global regime", || {
        let hv = 0.75;
        let sigma = 0.4;
        let n: u32 = if quick { 16 } else { 32 };
        let t_final: f64 = if quick { 1.0 } else { 5.0 };
        let dt_base = 0.005;
        let seeds: u64 = if quick { 3 } else { 10 };
        let steps_base = (t_final / dt_base).round() as usize;
        let mut ok = true;
        let mut lines = Vec::new();
        // No blow-up across seeds at dt = 2 * dt_base.
        let sups: Vec<Result<(f64, bool)>> = (0..seeds)
            .map(|seed| {
                let z = sample_z_trajectory(h(hv), n, steps_base, dt_base, DEFAULT_TRUNC_TOL, 0x6A + seed)?;
                let mut cfg = SolverConfig::new(h(hv), n, dt_base * 2.0, t_final);
                cfg.sigma = sigma;
                let v0 = {
                    let raw = FourierField::random(n, 2.0, 0x70 + seed);
                    raw.scale(1.0 / raw.sobolev_norm(sigma))
                };
                let res = global_solve(&cfg, &v0, &z, 2, 0)?;
                Ok((res.trajectory.sup_hsigma(), res.blown_up))
            })
            .collect();
        let mut blowups = 0;
        for (i, s) in sups.iter().enumerate() {
            match s {
                Ok((_, true)) => {
                    blowups += 1;
                    lines.push(format!("seed {i} blew up"));
                }
                Err(e) => {
                    ok = false;
                    lines.push(format!("seed {i} failed: {e}"));
                }
                _ => {}
            }
        }
        if blowups > 0 {
            ok = false;
        } else {
            lines.push(format!("no blow-up across {seeds} seeds (N={n}, T={t_final})"));
        }
        // dt halving on seed 0 with shared noise.
        let z0 = sample_z_trajectory(h(hv), n, steps_base, dt_base, DEFAULT_TRUNC_TOL, 0x6A).unwrap();
        let v0 = {
            let raw = FourierField::random(n, 2.0, 0x70);
            raw.scale(1.0 / raw.sobolev_norm(sigma))
        };
        // The shared datum dominates early times; compare the sup over the
        // settled window so the step-size error is actually visible.
        let window = t_final * 0.2;
        let mut sup_by_stride = Vec::new();
        for stride in [2usize, 1] {
            let mut cfg = SolverConfig::new(h(hv), n, dt_base * stride as f64, t_final);
            cfg.sigma = sigma;
            let res = global_solve(&cfg, &v0, &z0, stride, 0).unwrap();
            let sup = res
                .trajectory
                .times
                .iter()
                .zip(&res.trajectory.hsigma_norms)
                .filter(|(t, _)| **t >= window)
                .map(|(_, v)| *v)
                .fold(0.0f64, f64::max);
            sup_by_stride.push(sup);
        }
        let rel = (sup_by_stride[1] - sup_by_stride[0]).abs() / sup_by_stride[1];
        if rel > 0.05 {
            ok = false;
        }
        lines.push(format!(
            "sup_(t>={window}) ||u||_sigma: {:.4} vs {:.4} under dt halving ({:.2}% change, gate 5%)",
            sup_by_stride[0],
            sup_by_stride[1],
            100.0 * rel
        ));
        // Energy-ledger residual scaling on a short window.
        let short_steps = if quick { 160 } else { 320 };
        let dt_fine = 0.00125;
        let zf = sample_z_trajectory(h(hv), n, short_steps, dt_fine, DEFAULT_TRUNC_TOL, 0x6B).unwrap();
        let mut means = Vec::new();
        for stride in [4usize, 2, 1] {
            let mut cfg =
                SolverConfig::new(h(hv), n, dt_fine * stride as f64, short_steps as f64 * dt_fine);
            cfg.sigma = sigma;
            let res = global_solve(&cfg, &v0, &zf, stride, 1).unwrap();
            let vals: Vec<f64> = res.energy.iter().map(|r| r.identity_residual.abs()).collect();
            means.push(stats::mean(&vals));
        }
        let r1 = means[1] / means[0];
        let r2 = means[2] / means[1];
        if r1 > 0.75 || r2 > 0.75 {
            ok = false;
        }
        lines.push(format!(
            "energy residual halving ratios {r1:.2}, {r2:.2} (gate < 0.75)"
        ));
        (ok, lines.join(" | "))
    })
}

fn c11(quick: bool) -> CriterionReport {
    timed(11, "pathwise uniqueness proxy", || {
        let hv = 0.75;
        let n: u32 = if quick { 8 } else { 16 };
        let dt = 0.005;
        let t_final: f64 = if quick { 0.5 } else { 2.0 };
        let steps = (t_final / dt).round() as usize;
        let z = sample_z_trajectory(h(hv), n, steps, dt, DEFAULT_TRUNC_TOL, 0xB0).unwrap();
        let mut cfg = SolverConfig::new(h(hv), n, dt, t_final);
        cfg.sigma = 0.4;
        let v0 = FourierField::random(n, 2.0, 0xB1);
        let report = uniqueness_check(&cfg, &v0, &z, 1, &[1e-3, 1e-5, 1e-7], 0xB2).unwrap();
        let mut ok = true;
        let mut lines = Vec::new();
        if report.replay_sup_diff >= 1e-12 {
            ok = false;
        }
        lines.push(format!("replay sup diff {:.2e} (gate 1e-12)", report.replay_sup_diff));
        let ratios: Vec<f64> = report.delta_rows.iter().map(|r| r.final_ratio).collect();
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0f64, f64::max);
        if hi / lo >= 2.0 {
            ok = false;
        }
        lines.push(format!(
            "||V(T)||/delta = {:.4}/{:.4}/{:.4} (spread {:.2}x, gate 2x)",
            ratios[0],
            ratios[1],
            ratios[2],
            hi / lo
        ));
        if report.negative_control_diff <= 1e-6 {
            ok = false;
            lines.push("negative control did not separate".into());
        } else {
            lines.push(format!(
                "negative control separated: {:.3}",
                report.negative_control_diff
            ));
        }
        (ok, lines.join(" | "))
    })
}
