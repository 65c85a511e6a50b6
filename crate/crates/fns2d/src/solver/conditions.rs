//! Admissibility checker for the local-regime exponents.
//!
//! The Picard argument needs nine inequalities to hold simultaneously among
//! `(alpha, sigma, beta, p, q, H)`; they are feasible exactly when
//! `H > 7/16`, with a one-parameter family of sample points
//! `alpha = 1/4 - 2c`, `sigma = -1/4 + 3c`, `2/beta = 2/q = 1/2 - 4c`,
//! `2/p = 1/4 - c` at `H = 7/16 + c`.

use crate::fbm::HurstParam;

/// Exponent tuple of the local fixed-point spaces
/// `L^beta(0,T; B^alpha_{p,q})` and `C([0,T]; B^sigma_{p,q})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalParams {
    pub alpha: f64,
    pub sigma: f64,
    pub beta: f64,
    pub p: f64,
    pub q: f64,
}

/// Outcome of the nine-condition check.
#[derive(Clone, Debug)]
pub struct ConditionReport {
    pub satisfied: bool,
    /// `(condition number, human-readable violation)` for each failure.
    pub violated: Vec<(usize, String)>,
}

/// Evaluate all nine inequalities at the given Hurst index.
pub fn check_parameter_conditions(h: HurstParam, p: &LocalParams) -> ConditionReport {
    let hv = h.value();
    let (a, s, b, pp, q) = (p.alpha, p.sigma, p.beta, p.p, p.q);
    let mut violated = Vec::new();
    let mut check = |id: usize, ok: bool, text: String| {
        if !ok {
            violated.push((id, text));
        }
    };
    check(
        1,
        2.0 / pp + 2.0 / b < s + 1.0,
        format!("2/p + 2/beta = {} must be < sigma + 1 = {}", 2.0 / pp + 2.0 / b, s + 1.0),
    );
    check(
        2,
        2.0 / pp + 2.0 / q < a + 1.0,
        format!("2/p + 2/q = {} must be < alpha + 1 = {}", 2.0 / pp + 2.0 / q, a + 1.0),
    );
    check(3, b >= q, format!("beta = {b} must be >= q = {q}"));
    check(4, a < 2.0 / pp, format!("alpha = {a} must be < 2/p = {}", 2.0 / pp));
    check(5, s < 2.0 / pp, format!("sigma = {s} must be < 2/p = {}", 2.0 / pp));
    check(6, a + s > 0.0, format!("alpha + sigma = {} must be > 0", a + s));
    check(
        7,
        a < s + 2.0 / b,
        format!("alpha = {a} must be < sigma + 2/beta = {}", s + 2.0 / b),
    );
    check(8, a <= s + 1.0, format!("alpha = {a} must be <= sigma + 1 = {}", s + 1.0));
    check(
        9,
        s < 4.0 * (hv - 0.5),
        format!("sigma = {s} must be < 4(H - 1/2) = {}", 4.0 * (hv - 0.5)),
    );
    ConditionReport {
        satisfied: violated.is_empty(),
        violated,
    }
}

/// The canonical satisfying point at `H = 7/16 + c`, defined for
/// `0 < c < 1/16`.
pub fn sample_point(h: HurstParam) -> Option<LocalParams> {
    let c = h.value() - 7.0 / 16.0;
    if c <= 0.0 || c >= 1.0 / 16.0 {
        return None;
    }
    Some(LocalParams {
        alpha: 0.25 - 2.0 * c,
        sigma: -0.25 + 3.0 * c,
        beta: 2.0 / (0.5 - 4.0 * c),
        p: 2.0 / (0.25 - c),
        q: 2.0 / (0.5 - 4.0 * c),
    })
}

/// Search a fine grid (plus the canonical point when defined) for any
/// admissible exponent tuple. Returns the first hit.
pub fn grid_search(h: HurstParam) -> Option<LocalParams> {
    if let Some(p) = sample_point(h) {
        if check_parameter_conditions(h, &p).satisfied {
            return Some(p);
        }
    }
    // alpha in (0, 0.5), sigma in (-0.3, 0), 2/beta = 2/q and 2/p in (0, 1).
    let steps = 24;
    for ia in 1..steps {
        let alpha = 0.5 * ia as f64 / steps as f64;
        for is in 1..steps {
            let sigma = -0.3 * is as f64 / steps as f64;
            for ib in 1..steps {
                let two_over_beta = ib as f64 / steps as f64;
                let beta = 2.0 / two_over_beta;
                for ip in 1..steps {
                    let two_over_p = ip as f64 / steps as f64;
                    let p = LocalParams {
                        alpha,
                        sigma,
                        beta,
                        p: 2.0 / two_over_p,
                        q: beta,
                    };
                    if check_parameter_conditions(h, &p).satisfied {
                        return Some(p);
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(v: f64) -> HurstParam {
        HurstParam::new(v).unwrap()
    }

    #[test]
    fn canonical_point_satisfies_all_conditions() {
        // c = 1/32: alpha = 3/16, sigma = -5/32, 2/beta = 2/q = 3/8, 2/p = 7/32.
        let hurst = h(7.0 / 16.0 + 1.0 / 32.0);
        let p = sample_point(hurst).unwrap();
        assert!((p.alpha - 3.0 / 16.0).abs() < 1e-15);
        assert!((p.sigma + 5.0 / 32.0).abs() < 1e-15);
        assert!((p.beta - 16.0 / 3.0).abs() < 1e-12);
        assert!((p.p - 64.0 / 7.0).abs() < 1e-12);
        let report = check_parameter_conditions(hurst, &p);
        assert!(report.satisfied, "violations: {:?}", report.violated);
    }

    #[test]
    fn below_threshold_no_feasible_point() {
        assert!(grid_search(h(0.40)).is_none());
    }

    #[test]
    fn above_threshold_grid_search_succeeds() {
        let hurst = h(0.47);
        let p = grid_search(hurst).expect("feasible point above 7/16");
        assert!(check_parameter_conditions(hurst, &p).satisfied);
    }

    #[test]
    fn nonnegative_sigma_violates_condition_nine_below_half() {
        let hurst = h(0.47);
        let mut p = sample_point(hurst).unwrap();
        p.sigma = 0.0;
        let report = check_parameter_conditions(hurst, &p);
        assert!(!report.satisfied);
        assert!(report.violated.iter().any(|(id, _)| *id == 9));
    }
}
