//! Divergence-free Fourier velocity fields and their norms.
//!
//! A field is a finite set of complex coefficients `v_k` on the basis
//! `h_k = k^perp / (2*pi*|k|) * exp(i k.xi)`, truncated to the square
//! `max(|k1|,|k2|) <= N`. Reality (`v_{-k} = -conj(v_k)`) is enforced by
//! construction: only coefficients on the positive half-lattice are stored
//! and the mirror is implied. Divergence-freeness is automatic on this basis.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::mode_rng;
use crate::wave::{HalfLayout, WaveIndex};

/// Truncated divergence-free vector field in spectral representation.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierField {
    layout: HalfLayout,
    coeffs: Vec<Complex64>,
}

impl FourierField {
    /// The zero field at the given cutoff.
    pub fn zeros(cutoff: u32) -> Self {
        let layout = HalfLayout::new(cutoff);
        let coeffs = vec![Complex64::ZERO; layout.len()];
        Self { layout, coeffs }
    }

    /// Build a field from explicit `(k, v_k)` pairs.
    ///
    /// Indices in the negative half are folded onto their mirror via
    /// `v_{-k} = -conj(v_k)`; later pairs overwrite earlier ones.
    pub fn from_modes(cutoff: u32, modes: &[(WaveIndex, Complex64)]) -> Result<Self> {
        let mut field = Self::zeros(cutoff);
        for &(k, v) in modes {
            field.set(k, v)?;
        }
        Ok(field)
    }

    pub fn cutoff(&self) -> u32 {
        self.layout.cutoff()
    }

    pub fn layout(&self) -> HalfLayout {
        self.layout
    }

    /// Number of stored (positive-half) modes.
    pub fn stored_len(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient at `k`, with the mirror applied for the negative half.
    /// Returns zero outside the band and at `k = 0`.
    pub fn get(&self, k: WaveIndex) -> Complex64 {
        if k.is_zero() {
            return Complex64::ZERO;
        }
        if k.is_positive_half() {
            match self.layout.wave_to_index(k) {
                Some(i) => self.coeffs[i],
                None => Complex64::ZERO,
            }
        } else {
            match self.layout.wave_to_index(-k) {
                Some(i) => -self.coeffs[i].conj(),
                None => Complex64::ZERO,
            }
        }
    }

    /// Set the coefficient at `k` (folding negative-half indices).
    pub fn set(&mut self, k: WaveIndex, v: Complex64) -> Result<()> {
        k.require_nonzero()?;
        let (canon, value) = if k.is_positive_half() {
            (k, v)
        } else {
            (-k, -v.conj())
        };
        match self.layout.wave_to_index(canon) {
            Some(i) => {
                self.coeffs[i] = value;
                Ok(())
            }
            None => Err(Error::GridTooSmall {
                m: self.cutoff() as usize,
                needed: canon.norm_max() as usize,
            }),
        }
    }

    /// Iterate over stored modes `(k, v_k)` with `k` in the positive half.
    pub fn iter_positive(&self) -> impl Iterator<Item = (WaveIndex, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.layout.index_to_wave(i), v))
    }

    pub(crate) fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Sobolev norm `sqrt( sum_k |k|^{2r} |v_k|^2 )` over the full lattice
    /// (stored half counted twice by reality).
    pub fn sobolev_norm(&self, r: f64) -> f64 {
        let mut acc = 0.0;
        for (k, v) in self.iter_positive() {
            let w = (k.norm_sq() as f64).powf(r);
            acc += w * v.norm_sqr();
        }
        (2.0 * acc).sqrt()
    }

    /// `H^0`-pairing `<f, g> = sum_k f_k conj(g_k)`; real for reality-closed fields.
    pub fn inner_h0(&self, other: &Self) -> Result<f64> {
        self.check_same_cutoff(other)?;
        let mut acc = 0.0;
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            acc += a.re * b.re + a.im * b.im;
        }
        Ok(2.0 * acc)
    }

    /// Weighted pairing `<f, g>_{H^r} = sum |k|^{2r} f_k conj(g_k)`.
    pub fn inner_hr(&self, other: &Self, r: f64) -> Result<f64> {
        self.check_same_cutoff(other)?;
        let mut acc = 0.0;
        for (i, (a, b)) in self.coeffs.iter().zip(&other.coeffs).enumerate() {
            let k = self.layout.index_to_wave(i);
            acc += (k.norm_sq() as f64).powf(r) * (a.re * b.re + a.im * b.im);
        }
        Ok(2.0 * acc)
    }

    /// Heat semigroup `e^{tA}`: coefficient-wise decay `v_k -> e^{-|k|^2 t} v_k`.
    pub fn heat_semigroup(&self, t: f64) -> Result<Self> {
        if t < 0.0 {
            return Err(Error::NegativeTime { t });
        }
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let k = self.layout.index_to_wave(i);
            *c *= (-(k.norm_sq() as f64) * t).exp();
        }
        Ok(out)
    }

    pub fn scale(&self, a: f64) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c *= a;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_cutoff(other)?;
        let mut out = self.clone();
        for (c, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c += o;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_cutoff(other)?;
        let mut out = self.clone();
        for (c, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c -= o;
        }
        Ok(out)
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
        self.check_same_cutoff(other)?;
        let mut out = self.clone();
        for (c, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c += a * o;
        }
        Ok(out)
    }

    /// Keep only modes with Euclidean `|k|` in `[lo, hi)`.
    pub fn shell_restrict(&self, lo: f64, hi: f64) -> Self {
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let kn = self.layout.index_to_wave(i).norm();
            if kn < lo || kn >= hi {
                *c = Complex64::ZERO;
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm_sqr() == 0.0)
    }

    pub(crate) fn check_same_cutoff(&self, other: &Self) -> Result<()> {
        if self.cutoff() != other.cutoff() {
            Err(Error::CutoffMismatch {
                left: self.cutoff(),
                right: other.cutoff(),
            })
        } else {
            Ok(())
        }
    }

    /// Re-truncate (or zero-extend) to a new cutoff.
    pub fn with_cutoff(&self, cutoff: u32) -> Self {
        let mut out = Self::zeros(cutoff);
        for (k, v) in self.iter_positive() {
            if k.norm_max() as u32 <= cutoff {
                out.set(k, v).expect("in band by construction");
            }
        }
        out
    }

    /// Gaussian random field with per-mode std `|k|^{-decay}`, derived
    /// deterministically from the seed. Handy for ensembles and tests.
    pub fn random(cutoff: u32, decay: f64, seed: u64) -> Self {
        let mut out = Self::zeros(cutoff);
        for i in 0..out.coeffs.len() {
            let k = out.layout.index_to_wave(i);
            let mut rng = mode_rng(seed, k, 7);
            let scale = (k.norm_sq() as f64).powf(-decay / 2.0);
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            out.coeffs[i] = scale * Complex64::new(re, im);
        }
        out
    }

    /// Serialize as CSV (`# fns2d-field v1 cutoff=N` header, `k1,k2,re,im` rows
    /// over the stored half-lattice).
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# fns2d-field v1 cutoff={}", self.cutoff())?;
        writeln!(w, "k1,k2,re,im")?;
        for (k, v) in self.iter_positive() {
            writeln!(w, "{},{},{},{}", k.k1, k.k2, v.re, v.im)?;
        }
        Ok(())
    }

    /// Parse the CSV format written by [`FourierField::write_csv`]. Leading
    /// comment lines are skipped; the `fns2d-field` header fixes the cutoff.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut cutoff: Option<u32> = None;
        let mut field: Option<FourierField> = None;
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(pos) = rest.find("cutoff=") {
                    let val = rest[pos + 7..].split_whitespace().next().unwrap_or("");
                    cutoff = Some(val.parse().map_err(|_| Error::Parse {
                        line: lineno + 1,
                        detail: format!("bad cutoff value {val:?}"),
                    })?);
                }
                continue;
            }
            if line.starts_with("k1,") {
                continue;
            }
            let n = cutoff.ok_or(Error::Parse {
                line: lineno + 1,
                detail: "missing fns2d-field header before data".into(),
            })?;
            let f = field.get_or_insert_with(|| FourierField::zeros(n));
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 4 {
                return Err(Error::Parse {
                    line: lineno + 1,
                    detail: format!("expected 4 columns, got {}", parts.len()),
                });
            }
            let parse = |s: &str| -> Result<f64> {
                s.trim().parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    detail: format!("bad number {s:?}"),
                })
            };
            let k = WaveIndex::new(parse(parts[0])? as i32, parse(parts[1])? as i32);
            f.set(k, Complex64::new(parse(parts[2])?, parse(parts[3])?))?;
        }
        field.ok_or(Error::Parse {
            line: 0,
            detail: "empty field file".into(),
        })
    }
}

/// Which norm family a [`NormSpec`] describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    Sobolev,
    Besov,
}

/// Smoothness/integrability indices for Sobolev and Besov norms.
///
/// `B^r_{2,2} = H^r`, so the Sobolev constructor pins `p = q = 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormSpec {
    pub kind: NormKind,
    pub s: f64,
    pub p: f64,
    pub q: f64,
}

impl NormSpec {
    pub fn sobolev(r: f64) -> Self {
        Self {
            kind: NormKind::Sobolev,
            s: r,
            p: 2.0,
            q: 2.0,
        }
    }

    pub fn besov(s: f64, p: f64, q: f64) -> Result<Self> {
        if !(1.0..=f64::INFINITY).contains(&p) || !(1.0..=f64::INFINITY).contains(&q) {
            return Err(Error::InvalidNorm {
                detail: format!("p={p}, q={q} outside [1, inf]"),
            });
        }
        Ok(Self {
            kind: NormKind::Besov,
            s,
            p,
            q,
        })
    }
}

/// Dyadic-shell Besov norm: `l^q` over shells `j` of `2^{js} * ||Delta_j f||_{L^p(grid)}`.
///
/// Shells are sharp indicators `2^j <= |k| < 2^{j+1}` and shell fields are
/// evaluated on an alias-free physical grid. For `p = q = 2` this agrees with
/// the Sobolev norm up to a fixed factor of at most `2^{|s|}` per shell.
pub fn besov_norm(field: &FourierField, spec: &NormSpec) -> Result<f64> {
    if spec.kind != NormKind::Besov {
        return Err(Error::InvalidNorm {
            detail: "besov_norm requires a Besov NormSpec".into(),
        });
    }
    let n = field.cutoff();
    if n < 2 {
        // A single nonempty shell cannot carry a dyadic decomposition.
        return Err(Error::DegenerateResolution { cutoff: n });
    }
    let m = crate::grid::fast_size(2 * n as usize + 2);
    let max_norm = (2.0 * (n as f64) * (n as f64)).sqrt();
    let j_max = max_norm.log2().floor() as i32;
    let mut qsum = 0.0f64;
    let mut qmax = 0.0f64;
    for j in 0..=j_max {
        let lo = (1u64 << j) as f64;
        let hi = (1u64 << (j + 1)) as f64;
        let shell = field.shell_restrict(lo, hi);
        if shell.is_zero() {
            continue;
        }
        let phys = crate::grid::to_physical(&shell, m)?;
        let lp = phys.lp_norm(spec.p);
        let weighted = 2f64.powf(spec.s * j as f64) * lp;
        if spec.q.is_infinite() {
            qmax = qmax.max(weighted);
        } else {
            qsum += weighted.powf(spec.q);
        }
    }
    Ok(if spec.q.is_infinite() {
        qmax
    } else {
        qsum.powf(1.0 / spec.q)
    })
}

/// Fit the heat-semigroup smoothing constant: largest observed value of
/// `||e^{tA} v||_{H^{s1}} * t^{(s1-s2)/2} / ||v||_{H^{s2}}` over an ensemble of
/// random fields and a grid of times. Reported, never asserted.
pub fn heat_smoothing_constant(
    cutoff: u32,
    s1: f64,
    s2: f64,
    samples: u32,
    times: &[f64],
    seed: u64,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..samples {
        let v = FourierField::random(cutoff, 0.5, seed.wrapping_add(i as u64));
        let denom = v.sobolev_norm(s2);
        for &t in times {
            let num = v.heat_semigroup(t)?.sobolev_norm(s1);
            let ratio = num * t.powf((s1 - s2) / 2.0) / denom;
            worst = worst.max(ratio);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sobolev_two_unit_modes() {
        // v_{(1,0)} = i together with its mirror v_{(-1,0)} = i.
        let f = FourierField::from_modes(4, &[(WaveIndex::new(1, 0), c(0.0, 1.0))]).unwrap();
        assert_eq!(f.get(WaveIndex::new(-1, 0)), c(0.0, 1.0));
        assert!((f.sobolev_norm(0.0) - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn sobolev_zero_field() {
        let f = FourierField::zeros(8);
        assert_eq!(f.sobolev_norm(-1.3), 0.0);
        assert_eq!(f.sobolev_norm(2.0), 0.0);
    }

    #[test]
    fn sobolev_single_mode_weighted() {
        // |k|^2 = 5 at k = (1,2); norm^2 = 2 * 5^r * 1 at r = 1.
        let f = FourierField::from_modes(4, &[(WaveIndex::new(1, 2), c(1.0, 0.0))]).unwrap();
        let expected = (2.0f64 * 5.0).sqrt();
        assert!((f.sobolev_norm(1.0) - expected).abs() < 1e-14);
    }

    #[test]
    fn reality_closure_under_operations() {
        let f = FourierField::random(6, 0.7, 99);
        let g = f.heat_semigroup(0.3).unwrap().axpy(2.5, &f).unwrap();
        for (k, v) in g.iter_positive() {
            let mirror = g.get(-k);
            assert_eq!(mirror, -v.conj());
        }
    }

    #[test]
    fn norm_monotone_in_smoothness() {
        let f = FourierField::random(8, 0.4, 5);
        let pairs = [(-1.0, 0.0), (0.0, 0.5), (0.5, 2.0), (-2.3, -1.1)];
        for (r1, r2) in pairs {
            assert!(f.sobolev_norm(r1) <= f.sobolev_norm(r2));
        }
    }

    #[test]
    fn semigroup_law_exact() {
        let f = FourierField::random(6, 0.6, 17);
        let (s, t) = (0.21, 0.47);
        let one_step = f.heat_semigroup(s + t).unwrap();
        let two_step = f.heat_semigroup(s).unwrap().heat_semigroup(t).unwrap();
        for (a, b) in one_step.coeffs().iter().zip(two_step.coeffs()) {
            assert!((a - b).norm() <= 1e-15 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn semigroup_identity_and_halving() {
        let f = FourierField::from_modes(4, &[(WaveIndex::new(1, 0), c(1.0, 0.0))]).unwrap();
        let id = f.heat_semigroup(0.0).unwrap();
        assert_eq!(id.get(WaveIndex::new(1, 0)), c(1.0, 0.0));
        let halved = f.heat_semigroup(2f64.ln()).unwrap();
        assert!((halved.get(WaveIndex::new(1, 0)).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn semigroup_rejects_negative_time() {
        let f = FourierField::zeros(2);
        assert!(matches!(
            f.heat_semigroup(-0.1),
            Err(Error::NegativeTime { .. })
        ));
    }

    #[test]
    fn csv_roundtrip() {
        let f = FourierField::random(5, 0.8, 3);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let g = FourierField::read_csv(buf.as_slice()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn besov_two_two_close_to_sobolev() {
        let f = FourierField::random(8, 0.5, 21);
        for s in [-0.7, 0.0, 0.9] {
            let spec = NormSpec::besov(s, 2.0, 2.0).unwrap();
            let b = besov_norm(&f, &spec).unwrap();
            let h = f.sobolev_norm(s);
            let factor = 2f64.powf(s.abs());
            assert!(
                b <= h * factor * (1.0 + 1e-9) && h <= b * factor * (1.0 + 1e-9),
                "s={s}: besov={b}, sobolev={h}"
            );
        }
    }

    #[test]
    fn besov_single_shell_reduction() {
        // All energy in shell j=2 (|k| in [4,8)): norm = 2^{2s} * L2 norm.
        let f = FourierField::from_modes(
            8,
            &[
                (WaveIndex::new(4, 1), c(0.3, -0.1)),
                (WaveIndex::new(5, -2), c(-0.2, 0.4)),
            ],
        )
        .unwrap();
        for s in [-1.0, 0.3, 1.4] {
            let spec = NormSpec::besov(s, 2.0, 2.0).unwrap();
            let b = besov_norm(&f, &spec).unwrap();
            let l2 = f.sobolev_norm(0.0);
            let expected = 2f64.powf(2.0 * s) * l2;
            assert!(
                (b - expected).abs() < 1e-9 * expected.max(1.0),
                "s={s}: besov={b}, expected={expected}"
            );
        }
    }

    #[test]
    fn besov_zero_field_and_degenerate_cutoff() {
        let spec = NormSpec::besov(0.5, 2.0, 2.0).unwrap();
        assert_eq!(besov_norm(&FourierField::zeros(8), &spec).unwrap(), 0.0);
        assert!(matches!(
            besov_norm(&FourierField::zeros(1), &spec),
            Err(Error::DegenerateResolution { .. })
        ));
    }

    #[test]
    fn besov_equivalence_band_over_ensemble() {
        // Ratio besov/sobolev stays in [2^{-|s|}, 2^{|s|}] for p=q=2.
        let s = 0.8;
        let spec = NormSpec::besov(s, 2.0, 2.0).unwrap();
        let (c1, c2) = (2f64.powf(-s.abs()), 2f64.powf(s.abs()));
        for seed in 0..6 {
            let f = FourierField::random(8, 0.3, 1000 + seed);
            let ratio = besov_norm(&f, &spec).unwrap() / f.sobolev_norm(s);
            assert!(ratio >= c1 * (1.0 - 1e-9) && ratio <= c2 * (1.0 + 1e-9));
        }
    }

    #[test]
    fn heat_smoothing_probe_is_bounded() {
        let c = heat_smoothing_constant(8, 1.0, 0.0, 4, &[0.05, 0.2, 1.0], 9).unwrap();
        assert!(c.is_finite() && c > 0.0);
        // Crude a priori bound sup_x x^{1/2} e^{-x} <= 1 gives C <= ~1.
        assert!(c <= 1.0 + 1e-9);
    }
}
