//! Fourth moment of `B(z,z)` under the Gaussian measure by Wick enumeration.
//!
//! `int ||B(z,z)||^4_{H^rho} d mu` expands into an eight-factor Gaussian
//! expectation per mode pair `(k, j)`. Two independent evaluations are kept:
//!
//! - a *generic engine* that mechanically enumerates all 105 pairings of the
//!   eight factors, solves each pairing's index constraints by exact integer
//!   elimination, and sums the surviving lattice contributions;
//! - a *case list* of hand-derived closed sums, grouped in six classes by the
//!   partner of the `z_h` factor (`h = h'`, `h = k-h'`, `h = -l`, `h = l-j`,
//!   `h = l'`, `h = j-l'`).
//!
//! The engine knows nothing of the case analysis, so term-for-term agreement
//! between the two catches transcription errors in the gamma bookkeeping.
//! Classes 1-2 are the disconnected part and reproduce the squared second
//! moment exactly.
//!
//! Every pairing contributes a pure product of pair covariances
//! (`E[z_a z_b] = -s(a)` when `b = -a`, zero otherwise, after rewriting
//! conjugates through the mirror `conj(z_a) = -z_{-a}`), so index collisions
//! on a finite band need no special handling.

use rayon::prelude::*;

use crate::bilinear::{gamma_or_zero, gamma_pair};
use crate::gibbs::ModeSpectrum;
use crate::wave::{band_all, WaveIndex};

/// Variable order in expressions: `h, h', l, l', k, j`.
const VH: usize = 0;
const VHP: usize = 1;
const VL: usize = 2;
const VLP: usize = 3;
const VK: usize = 4;
const VJ: usize = 5;

/// Integer linear expression over `(h, h', l, l', k, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Expr {
    v: [i64; 6],
}

impl Expr {
    const fn zero() -> Self {
        Self { v: [0; 6] }
    }

    const fn var(i: usize) -> Self {
        let mut v = [0i64; 6];
        v[i] = 1;
        Self { v }
    }

    fn add(&self, other: &Expr) -> Expr {
        let mut v = [0i64; 6];
        for i in 0..6 {
            v[i] = self.v[i] + other.v[i];
        }
        Expr { v }
    }

    fn scale(&self, a: i64) -> Expr {
        let mut v = self.v;
        for c in v.iter_mut() {
            *c *= a;
        }
        Expr { v }
    }

    /// Replace variable `i` by `expr` (which must not contain variable `i`).
    fn substitute(&self, i: usize, expr: &Expr) -> Expr {
        let c = self.v[i];
        if c == 0 {
            return *self;
        }
        let mut out = *self;
        out.v[i] = 0;
        out.add(&expr.scale(c))
    }

    fn vars_part(&self) -> [i64; 4] {
        [self.v[0], self.v[1], self.v[2], self.v[3]]
    }
}

/// The eight slot index expressions of
/// `z_h z_{k-h} conj(z_{h'}) conj(z_{k-h'}) z_l z_{j-l} conj(z_{l'}) conj(z_{j-l'})`
/// after rewriting conjugates through the mirror.
fn slots() -> [Expr; 8] {
    let e = |coefs: [i64; 6]| Expr { v: coefs };
    [
        e([1, 0, 0, 0, 0, 0]),   // A1 = h
        e([-1, 0, 0, 0, 1, 0]),  // A2 = k - h
        e([0, -1, 0, 0, 0, 0]),  // B1 = -h'
        e([0, 1, 0, 0, -1, 0]),  // B2 = h' - k
        e([0, 0, 1, 0, 0, 0]),   // C1 = l
        e([0, 0, -1, 0, 0, 1]),  // C2 = j - l
        e([0, 0, 0, -1, 0, 0]),  // D1 = -l'
        e([0, 0, 0, 1, 0, -1]),  // D2 = l' - j
    ]
}

/// All 105 perfect matchings of the eight slots.
fn all_pairings() -> Vec<[(usize, usize); 4]> {
    let mut out = Vec::with_capacity(105);
    let mut items: Vec<usize> = (0..8).collect();
    fn rec(items: &mut Vec<usize>, acc: &mut Vec<(usize, usize)>, out: &mut Vec<[(usize, usize); 4]>) {
        if items.is_empty() {
            out.push([acc[0], acc[1], acc[2], acc[3]]);
            return;
        }
        let first = items[0];
        for i in 1..items.len() {
            let second = items[i];
            let mut rest: Vec<usize> = items
                .iter()
                .cloned()
                .filter(|&x| x != first && x != second)
                .collect();
            acc.push((first, second));
            rec(&mut rest, acc, out);
            acc.pop();
        }
    }
    rec(&mut items, &mut Vec::new(), &mut out);
    out
}

/// Relation imposed on `j` by the pairing constraints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum JRelation {
    Free,
    EqualK,
    MinusK,
}

#[derive(Clone, Debug)]
struct SolvedPairing {
    pairs: [(usize, usize); 4],
    class: usize,
    j_relation: JRelation,
    /// Expressions for `(h, h', l, l')` over `(k, j, free vars)`.
    var_expr: [Expr; 4],
    free_vars: Vec<usize>,
}

/// Classify a pairing by the partner of `z_h` (slot A1), falling back to the
/// partner of `z_{k-h}` (slot A2) when A1 pairs inside the `|B_k|^2 block.
fn classify(pairs: &[(usize, usize); 4]) -> usize {
    let partner = |slot: usize| -> usize {
        for &(a, b) in pairs {
            if a == slot {
                return b;
            }
            if b == slot {
                return a;
            }
        }
        unreachable!("slot must be matched")
    };
    match partner(0) {
        4 => 3, // C1: h = -l
        5 => 4, // C2: h = l - j
        6 => 5, // D1: h = l'
        7 => 6, // D2: h = j - l'
        b_slot => match partner(1) {
            // A1 pairs inside the B block; classify by where A2 goes.
            4 => 3,
            5 => 4,
            6 => 5,
            7 => 6,
            // Fully AB-internal: disconnected classes.
            _ => {
                if b_slot == 2 {
                    1 // h = h'
                } else {
                    2 // h = k - h'
                }
            }
        },
    }
}

/// Solve the four zero-sum constraints of a pairing by exact integer
/// elimination, treating `k` and `j` as parameters. Returns `None` when a
/// constraint forces `k = 0` or `j = 0` (no contribution on the band).
fn solve_pairing(pairs: [(usize, usize); 4]) -> Option<SolvedPairing> {
    let slot = slots();
    let mut eqs: Vec<Expr> = pairs
        .iter()
        .map(|&(a, b)| slot[a].add(&slot[b]))
        .collect();
    let mut resolved: [Option<Expr>; 4] = [None; 4];
    let mut relations: Vec<(i64, i64)> = Vec::new();
    loop {
        let mut progress = false;
        let mut next_eqs = Vec::new();
        for eq in eqs.drain(..) {
            // Substitute everything resolved so far.
            let mut cur = eq;
            for v in 0..4 {
                if let Some(expr) = &resolved[v] {
                    cur = cur.substitute(v, expr);
                }
            }
            let vars = cur.vars_part();
            if vars == [0, 0, 0, 0] {
                let (ck, cj) = (cur.v[VK], cur.v[VJ]);
                if ck != 0 || cj != 0 {
                    let g = gcd(ck.abs(), cj.abs());
                    relations.push((ck / g.max(1), cj / g.max(1)));
                }
                progress = true;
                continue;
            }
            // Find a unit pivot.
            if let Some(pivot) = (0..4).find(|&v| vars[v].abs() == 1) {
                let sign = vars[pivot];
                let mut expr = cur;
                expr.v[pivot] = 0;
                let expr = expr.scale(-sign);
                // Expand previously resolved expressions that mention pivot.
                for v in 0..4 {
                    if let Some(e) = resolved[v] {
                        resolved[v] = Some(e.substitute(pivot, &expr));
                    }
                }
                resolved[pivot] = Some(expr);
                progress = true;
            } else {
                next_eqs.push(cur);
            }
        }
        eqs = next_eqs;
        if eqs.is_empty() {
            break;
        }
        if !progress {
            unreachable!("pairing constraints always admit unit pivots");
        }
    }
    // Interpret parameter relations.
    let mut j_relation = JRelation::Free;
    for (ck, cj) in relations {
        match (ck, cj) {
            (a, 0) if a != 0 => return None, // k = 0
            (0, b) if b != 0 => return None, // j = 0
            (a, b) if a == b => j_relation = merge(j_relation, JRelation::MinusK)?,
            (a, b) if a == -b => j_relation = merge(j_relation, JRelation::EqualK)?,
            _ => return None,
        }
    }
    let mut var_expr = [Expr::zero(); 4];
    let mut free_vars = Vec::new();
    for v in 0..4 {
        match resolved[v] {
            Some(e) => {
                debug_assert_eq!(e.vars_part()[v], 0);
                var_expr[v] = e;
            }
            None => {
                var_expr[v] = Expr::var(v);
                free_vars.push(v);
            }
        }
    }
    Some(SolvedPairing {
        pairs,
        class: classify(&pairs),
        j_relation,
        var_expr,
        free_vars,
    })
}

fn merge(a: JRelation, b: JRelation) -> Option<JRelation> {
    match (a, b) {
        (JRelation::Free, x) | (x, JRelation::Free) => Some(x),
        (x, y) if x == y => Some(x),
        _ => None, // k = j and k = -j force k = 0
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Per-class totals of the fourth-moment series.
#[derive(Clone, Copy, Debug, Default)]
pub struct FourthMomentBreakdown {
    /// Classes 1..6 in order.
    pub classes: [f64; 6],
}

impl FourthMomentBreakdown {
    pub fn total(&self) -> f64 {
        self.classes.iter().sum()
    }

    /// Classes 1-2: the disconnected part, equal to the squared second moment.
    pub fn disconnected(&self) -> f64 {
        self.classes[0] + self.classes[1]
    }
}

#[inline]
fn eval_expr(e: &Expr, k: WaveIndex, j: WaveIndex, free: &[(usize, WaveIndex)]) -> WaveIndex {
    let mut k1 = e.v[VK] as i32 * k.k1 + e.v[VJ] as i32 * j.k1;
    let mut k2 = e.v[VK] as i32 * k.k2 + e.v[VJ] as i32 * j.k2;
    for &(v, x) in free {
        k1 += e.v[v] as i32 * x.k1;
        k2 += e.v[v] as i32 * x.k2;
    }
    WaveIndex::new(k1, k2)
}

/// Generic Wick-pairing engine: mechanical enumeration of all pairings.
pub fn fourth_moment_engine(s: &ModeSpectrum, rho: f64) -> FourthMomentBreakdown {
    let solved: Vec<SolvedPairing> = all_pairings()
        .into_iter()
        .filter_map(solve_pairing)
        .collect();
    let band: Vec<WaveIndex> = band_all(s.cutoff()).collect();
    let slot = slots();

    let contributions: Vec<(usize, f64)> = solved
        .par_iter()
        .map(|sp| {
            let mut acc = 0.0;
            for &k in &band {
                let wk = (k.norm_sq() as f64).powf(rho);
                let js: Vec<WaveIndex> = match sp.j_relation {
                    JRelation::Free => band.clone(),
                    JRelation::EqualK => vec![k],
                    JRelation::MinusK => vec![-k],
                };
                for j in js {
                    let w = wk * (j.norm_sq() as f64).powf(rho);
                    // 0, 1 or 2 free variables.
                    match sp.free_vars.len() {
                        0 => acc += w * term_value(s, sp, &slot, k, j, &[]),
                        1 => {
                            let v0 = sp.free_vars[0];
                            for &x in &band {
                                acc += w * term_value(s, sp, &slot, k, j, &[(v0, x)]);
                            }
                        }
                        2 => {
                            let (v0, v1) = (sp.free_vars[0], sp.free_vars[1]);
                            for &x in &band {
                                for &y in &band {
                                    acc += w * term_value(s, sp, &slot, k, j, &[(v0, x), (v1, y)]);
                                }
                            }
                        }
                        _ => unreachable!("at most two free variables"),
                    }
                }
            }
            (sp.class, acc)
        })
        .collect();

    let mut out = FourthMomentBreakdown::default();
    for (class, v) in contributions {
        out.classes[class - 1] += v;
    }
    out
}

#[inline]
fn term_value(
    s: &ModeSpectrum,
    sp: &SolvedPairing,
    slot: &[Expr; 8],
    k: WaveIndex,
    j: WaveIndex,
    free: &[(usize, WaveIndex)],
) -> f64 {
    let h = eval_expr(&sp.var_expr[VH], k, j, free);
    let hp = eval_expr(&sp.var_expr[VHP], k, j, free);
    let l = eval_expr(&sp.var_expr[VL], k, j, free);
    let lp = eval_expr(&sp.var_expr[VLP], k, j, free);
    let g = gamma_or_zero(h, k) * gamma_or_zero(hp, k) * gamma_or_zero(l, j) * gamma_or_zero(lp, j);
    if g == 0.0 {
        return 0.0;
    }
    let mut sprod = 1.0;
    let full = [(VH, h), (VHP, hp), (VL, l), (VLP, lp)];
    for &(a, _) in &sp.pairs {
        let idx = eval_expr(&slot[a], k, j, &full.map(|(v, x)| (v, x)));
        let sv = s.s(idx);
        if sv == 0.0 {
            return 0.0;
        }
        sprod *= sv;
    }
    g * sprod
}

/// Hand-derived case list: classes 1..6 as explicit lattice sums.
pub fn fourth_moment_cases(s: &ModeSpectrum, rho: f64) -> FourthMomentBreakdown {
    let band: Vec<WaveIndex> = band_all(s.cutoff()).collect();
    let w = |k: WaveIndex| (k.norm_sq() as f64).powf(rho);

    // Inner sums per k: P (squared gamma), Pp (gamma cross mirror), G = P + Pp.
    let inner: Vec<(WaveIndex, f64, f64)> = band
        .par_iter()
        .map(|&k| {
            let mut p = 0.0;
            let mut pp = 0.0;
            for &h in &band {
                let weight = s.s(h) * s.s(k - h);
                if weight == 0.0 {
                    continue;
                }
                let g = gamma_or_zero(h, k);
                if g == 0.0 {
                    continue;
                }
                p += g * g * weight;
                pp += g * gamma_or_zero(k - h, k) * weight;
            }
            (k, p, pp)
        })
        .collect();
    let q: f64 = inner.iter().map(|&(k, p, _)| w(k) * p).sum();
    let qpp: f64 = inner.iter().map(|&(k, _, pp)| w(k) * pp).sum();
    let m2 = q + qpp;

    // Classes 1-2: disconnected, (Q + Q'')^2 split by the A-block pairing.
    let c1 = q * m2;
    let c2 = qpp * m2;

    // k = -j and k = j diagonal groups shared by classes 3/5 and 4/6.
    let diag_pg: f64 = inner.iter().map(|&(k, p, pp)| w(k) * w(k) * p * (p + pp)).sum();
    let diag_ppg: f64 = inner.iter().map(|&(k, p, pp)| w(k) * w(k) * pp * (p + pp)).sum();

    let g2 = |x: WaveIndex, y: WaveIndex| gamma_or_zero(x, y) * gamma_pair(x, y);

    // Three-index sums; the closure returns the per-(k,j,h) addend of each
    // class component (a: self-energy group, c: four-cycle group, d: mirror
    // group of the quadratic interaction).
    let sums: Vec<[f64; 8]> = band
        .par_iter()
        .map(|&k| {
            let mut acc = [0.0f64; 8];
            for &j in &band {
                let wkj = w(k) * w(j);
                for &h in &band {
                    let s_h = s.s(h);
                    if s_h == 0.0 {
                        continue;
                    }
                    let s_kh = s.s(k - h);
                    if s_kh == 0.0 {
                        continue;
                    }
                    // class 3 / 4: built on s(j+h)
                    let s_jph = s.s(j + h);
                    if s_jph != 0.0 {
                        let base = wkj * s_h * s_h * s_kh * s_jph;
                        // 3a / 4a
                        acc[0] += base * g2(h, k) * g2(-h, j);
                        acc[1] += base * g2(h, k) * g2(j + h, j);
                        // 3c / 4c share the gpair product
                        let s_jphk = s.s(j + h - k);
                        if s_jphk != 0.0 {
                            let cyc = wkj
                                * gamma_pair(j + h, k)
                                * gamma_pair(k - h, j)
                                * s_h
                                * s_kh
                                * s_jph
                                * s_jphk;
                            acc[2] += cyc * gamma_or_zero(h, k) * gamma_or_zero(-h, j);
                            acc[3] += cyc * gamma_or_zero(h, k) * gamma_or_zero(j + h, j);
                        }
                    }
                    // class 5 / 6: built on s(j-h)
                    let s_jmh = s.s(j - h);
                    if s_jmh != 0.0 {
                        let base = wkj * s_h * s_h * s_kh * s_jmh;
                        acc[4] += base * g2(h, k) * g2(h, j);
                        acc[5] += base * g2(h, k) * g2(j - h, j);
                        let s_jkmh = s.s(j + k - h);
                        if s_jkmh != 0.0 {
                            let cyc = wkj
                                * gamma_pair(h - j, k)
                                * gamma_pair(h - k, j)
                                * s_h
                                * s_kh
                                * s_jkmh
                                * s_jmh;
                            acc[6] += cyc * gamma_or_zero(h, k) * gamma_or_zero(h, j);
                            acc[7] += cyc * gamma_or_zero(h, k) * gamma_or_zero(j - h, j);
                        }
                    }
                }
            }
            acc
        })
        .collect();
    let mut three = [0.0f64; 8];
    for row in sums {
        for i in 0..8 {
            three[i] += row[i];
        }
    }

    // Mirror groups (d-terms): quadratic interaction with the doubled middle
    // leg, one per class 3..6.
    let dsums: Vec<[f64; 4]> = band
        .par_iter()
        .map(|&k| {
            let mut acc = [0.0f64; 4];
            for &j in &band {
                let wkj = w(k) * w(j);
                for &h in &band {
                    let s_h = s.s(h);
                    if s_h == 0.0 {
                        continue;
                    }
                    let s_kh = s.s(k - h);
                    if s_kh == 0.0 {
                        continue;
                    }
                    let g2hk = g2(h, k);
                    if g2hk == 0.0 {
                        continue;
                    }
                    let base = wkj * g2hk * s_h * s_kh * s_kh;
                    // class 3: l = l' = h-k, remaining leg s(j-(h-k))
                    let s3 = s.s(j - h + k);
                    if s3 != 0.0 {
                        acc[0] += base * g2(h - k, j) * s3;
                        acc[1] += base * g2(j - h + k, j) * s3;
                    }
                    // class 5: l = l' = k-h, remaining leg s(j-(k-h))
                    let s5 = s.s(j - k + h);
                    if s5 != 0.0 {
                        acc[2] += base * g2(k - h, j) * s5;
                        acc[3] += base * g2(j - k + h, j) * s5;
                    }
                }
            }
            acc
        })
        .collect();
    let mut dtot = [0.0f64; 4];
    for row in dsums {
        for i in 0..4 {
            dtot[i] += row[i];
        }
    }

    FourthMomentBreakdown {
        classes: [
            c1,
            c2,
            three[0] + diag_pg + three[2] + dtot[0],
            three[1] + diag_ppg + three[3] + dtot[1],
            three[4] + diag_pg + three[6] + dtot[2],
            three[5] + diag_ppg + three[7] + dtot[3],
        ],
    }
}
