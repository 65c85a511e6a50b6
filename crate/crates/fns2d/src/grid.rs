//! Physical-grid transforms for spectral fields.
//!
//! `to_physical` evaluates the basis expansion on a uniform `M x M` grid of
//! the torus via an inverse FFT; `from_physical` is its adjoint, including
//! the Leray projection (only the `k^perp` component of the transformed grid
//! data is kept, which kills gradients and the mean).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::field::FourierField;
use crate::wave::WaveIndex;

/// Real two-component velocity samples on an `M x M` grid of `[0, 2*pi)^2`.
///
/// Storage is row-major in the first coordinate: `idx = i * m + j` holds the
/// value at `xi = (2*pi*i/M, 2*pi*j/M)`.
#[derive(Clone, Debug)]
pub struct PhysicalField {
    m: usize,
    pub ux: Vec<f64>,
    pub uy: Vec<f64>,
}

impl PhysicalField {
    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            ux: vec![0.0; m * m],
            uy: vec![0.0; m * m],
        }
    }

    pub fn grid_size(&self) -> usize {
        self.m
    }

    /// Pointwise Euclidean speed at grid node `idx`.
    pub fn speed(&self, idx: usize) -> f64 {
        (self.ux[idx] * self.ux[idx] + self.uy[idx] * self.uy[idx]).sqrt()
    }

    /// Grid `L^p` norm with the torus measure, `( (2pi/M)^2 sum |u|^p )^{1/p}`;
    /// `p = inf` gives the max norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return (0..self.m * self.m)
                .map(|i| self.speed(i))
                .fold(0.0, f64::max);
        }
        let cell = (2.0 * std::f64::consts::PI / self.m as f64).powi(2);
        let sum: f64 = (0..self.m * self.m).map(|i| self.speed(i).powf(p)).sum();
        (cell * sum).powf(1.0 / p)
    }

    /// `(2pi/M)^2 sum |u|^2`, the exact `L^2(T)^2` energy for band-limited data.
    pub fn l2_energy(&self) -> f64 {
        let cell = (2.0 * std::f64::consts::PI / self.m as f64).powi(2);
        let sum: f64 = (0..self.m * self.m).map(|i| {
            self.ux[i] * self.ux[i] + self.uy[i] * self.uy[i]
        }).sum();
        cell * sum
    }
}

/// Smallest grid size >= `needed` whose prime factors are all in {2, 3, 5}.
pub fn fast_size(needed: usize) -> usize {
    let mut m = needed.max(2);
    loop {
        let mut r = m;
        for f in [2usize, 3, 5] {
            while r % f == 0 {
                r /= f;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

fn planner(len: usize, dir: FftDirection) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<Mutex<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cache.lock().expect("fft planner poisoned");
    let key = (len, dir == FftDirection::Forward);
    if let Some(f) = guard.1.get(&key) {
        return f.clone();
    }
    let f = match dir {
        FftDirection::Forward => guard.0.plan_fft_forward(len),
        FftDirection::Inverse => guard.0.plan_fft_inverse(len),
    };
    guard.1.insert(key, f.clone());
    f
}

/// Unnormalized 1D FFT in place, sharing the plan cache.
pub(crate) fn fft1d(buf: &mut [Complex64], dir: FftDirection) {
    let fft = planner(buf.len(), dir);
    let mut scratch = vec![Complex64::ZERO; fft.get_inplace_scratch_len()];
    fft.process_with_scratch(buf, &mut scratch);
}

/// Unnormalized 2D FFT in place on an `m x m` complex buffer (`idx = i*m + j`).
pub(crate) fn fft2(buf: &mut [Complex64], m: usize, dir: FftDirection) {
    debug_assert_eq!(buf.len(), m * m);
    let fft = planner(m, dir);
    let mut scratch = vec![Complex64::ZERO; fft.get_inplace_scratch_len()];
    // Rows: contiguous stride-1 transforms over j.
    for row in buf.chunks_exact_mut(m) {
        fft.process_with_scratch(row, &mut scratch);
    }
    // Columns: gather, transform, scatter.
    let mut col = vec![Complex64::ZERO; m];
    for j in 0..m {
        for i in 0..m {
            col[i] = buf[i * m + j];
        }
        fft.process_with_scratch(&mut col, &mut scratch);
        for i in 0..m {
            buf[i * m + j] = col[i];
        }
    }
}

#[inline]
fn wrap(k: i32, m: usize) -> usize {
    k.rem_euclid(m as i32) as usize
}

/// Spectral-to-grid transform. Requires `M >= 2*cutoff + 2` so no mode is lost.
pub fn to_physical(field: &FourierField, m: usize) -> Result<PhysicalField> {
    let n = field.cutoff() as usize;
    let needed = 2 * n + 2;
    if m < needed {
        return Err(Error::GridTooSmall { m, needed });
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut wx = vec![Complex64::ZERO; m * m];
    let mut wy = vec![Complex64::ZERO; m * m];
    for (k, v) in field.iter_positive() {
        // W(k) = v_k * k^perp / (2*pi*|k|), plus the mirror W(-k) = conj(W(k)).
        let perp = k.perp();
        let scale = 1.0 / (two_pi * k.norm());
        let w1 = v * (perp.k1 as f64 * scale);
        let w2 = v * (perp.k2 as f64 * scale);
        let idx = wrap(k.k1, m) * m + wrap(k.k2, m);
        wx[idx] += w1;
        wy[idx] += w2;
        // mirror: v_{-k} * (-k)^perp / (2 pi |k|) = conj(w)
        let jdx = wrap(-k.k1, m) * m + wrap(-k.k2, m);
        wx[jdx] += w1.conj();
        wy[jdx] += w2.conj();
    }
    fft2(&mut wx, m, FftDirection::Inverse);
    fft2(&mut wy, m, FftDirection::Inverse);
    let mut out = PhysicalField::zeros(m);
    for i in 0..m * m {
        out.ux[i] = wx[i].re;
        out.uy[i] = wy[i].re;
        debug_assert!(wx[i].im.abs() + wy[i].im.abs() < 1e-9);
    }
    Ok(out)
}

/// Grid-to-spectral transform (adjoint of [`to_physical`]) with Leray-basis
/// projection: only the component along `k^perp` survives, so curl-free input
/// maps to the zero field and the `k = 0` mean is discarded.
pub fn from_physical(phys: &PhysicalField, cutoff: u32) -> Result<FourierField> {
    let m = phys.m;
    let needed = 2 * cutoff as usize + 2;
    if m < needed {
        return Err(Error::GridTooSmall { m, needed });
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut wx: Vec<Complex64> = phys.ux.iter().map(|&r| Complex64::new(r, 0.0)).collect();
    let mut wy: Vec<Complex64> = phys.uy.iter().map(|&r| Complex64::new(r, 0.0)).collect();
    fft2(&mut wx, m, FftDirection::Forward);
    fft2(&mut wy, m, FftDirection::Forward);
    let norm = 1.0 / (m * m) as f64;
    let mut out = FourierField::zeros(cutoff);
    let modes: Vec<WaveIndex> = out.iter_positive().map(|(k, _)| k).collect();
    for k in modes {
        let idx = wrap(k.k1, m) * m + wrap(k.k2, m);
        let what = (wx[idx] * norm, wy[idx] * norm);
        let perp = k.perp();
        // v_k = 2*pi * (W_hat . k^perp) / |k|
        let dot = what.0 * perp.k1 as f64 + what.1 * perp.k2 as f64;
        out.set(k, dot * (two_pi / k.norm()))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wave::WaveIndex;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn fast_size_picks_smooth_lengths() {
        assert_eq!(fast_size(98), 100);
        assert_eq!(fast_size(50), 50);
        assert_eq!(fast_size(33), 36);
    }

    #[test]
    fn roundtrip_random_field() {
        let f = FourierField::random(8, 0.4, 11);
        let m = fast_size(2 * 8 + 2);
        let g = from_physical(&to_physical(&f, m).unwrap(), 8).unwrap();
        let mut worst = 0.0f64;
        for (k, v) in f.iter_positive() {
            worst = worst.max((g.get(k) - v).norm());
        }
        assert!(worst < 1e-12, "roundtrip error {worst}");
    }

    #[test]
    fn single_pair_is_cosine_shear() {
        // k = (1,0), v_k real c: velocity (0, (c/pi) cos xi_1).
        let c = 0.7;
        let f =
            FourierField::from_modes(2, &[(WaveIndex::new(1, 0), Complex64::new(c, 0.0))]).unwrap();
        let m = 12;
        let phys = to_physical(&f, m).unwrap();
        for i in 0..m {
            let xi1 = 2.0 * PI * i as f64 / m as f64;
            for j in 0..m {
                let idx = i * m + j;
                assert!(phys.ux[idx].abs() < 1e-13);
                assert!((phys.uy[idx] - c / PI * xi1.cos()).abs() < 1e-13);
            }
        }
        let max = (0..m * m).map(|i| phys.speed(i)).fold(0.0, f64::max);
        assert!((max - c / PI).abs() < 1e-13);
    }

    #[test]
    fn zero_field_roundtrips_to_zero_grid() {
        let f = FourierField::zeros(4);
        let phys = to_physical(&f, 10).unwrap();
        assert!(phys.ux.iter().chain(&phys.uy).all(|&v| v == 0.0));
        assert!(from_physical(&phys, 4).unwrap().is_zero());
    }

    #[test]
    fn gradient_input_is_projected_out() {
        // Curl-free field grad(phi) with phi = cos(2 xi_1 + xi_2).
        let m = 16;
        let mut phys = PhysicalField::zeros(m);
        for i in 0..m {
            for j in 0..m {
                let (x1, x2) = (2.0 * PI * i as f64 / m as f64, 2.0 * PI * j as f64 / m as f64);
                let s = -(2.0 * x1 + x2).sin();
                phys.ux[i * m + j] = 2.0 * s;
                phys.uy[i * m + j] = s;
            }
        }
        let f = from_physical(&phys, 4).unwrap();
        assert!(f.sobolev_norm(0.0) < 1e-12);
    }

    #[test]
    fn parseval_between_grid_and_coefficients() {
        let f = FourierField::random(6, 0.3, 23);
        let m = fast_size(2 * 6 + 2);
        let phys = to_physical(&f, m).unwrap();
        let lhs = f.sobolev_norm(0.0).powi(2);
        let rhs = phys.l2_energy();
        assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(1.0));
    }

    #[test]
    fn small_grid_rejected() {
        let f = FourierField::random(8, 0.5, 1);
        assert!(matches!(
            to_physical(&f, 17),
            Err(Error::GridTooSmall { .. })
        ));
    }
}
