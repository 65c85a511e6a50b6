//! Integer wave indices on the 2D torus and the half-lattice storage layout.
//!
//! The spectral fields of this crate live on `Z^2 \ {0}` truncated to the
//! square `max(|k1|,|k2|) <= N`. Reality of the velocity field pairs every
//! index `k` with `-k`, so only the positive half `Z^2_+` (k1 > 0, or k1 = 0
//! and k2 > 0) is ever stored.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};

/// A wave index `k = (k1, k2)` in `Z^2`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WaveIndex {
    pub k1: i32,
    pub k2: i32,
}

impl fmt::Debug for WaveIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k1, self.k2)
    }
}

impl WaveIndex {
    pub const fn new(k1: i32, k2: i32) -> Self {
        Self { k1, k2 }
    }

    pub fn is_zero(self) -> bool {
        self.k1 == 0 && self.k2 == 0
    }

    /// `|k|^2` in exact integer arithmetic.
    pub fn norm_sq(self) -> i64 {
        let (a, b) = (self.k1 as i64, self.k2 as i64);
        a * a + b * b
    }

    pub fn norm(self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    /// Max-norm used by the square truncation geometry.
    pub fn norm_max(self) -> i32 {
        self.k1.abs().max(self.k2.abs())
    }

    /// The fixed orientation convention `k^perp = (-k2, k1)`.
    pub fn perp(self) -> Self {
        Self::new(-self.k2, self.k1)
    }

    pub fn dot(self, other: Self) -> i64 {
        self.k1 as i64 * other.k1 as i64 + self.k2 as i64 * other.k2 as i64
    }

    /// Membership in the stored half `Z^2_+`.
    pub fn is_positive_half(self) -> bool {
        self.k1 > 0 || (self.k1 == 0 && self.k2 > 0)
    }

    /// Checks `k != 0`, returning an error otherwise.
    pub fn require_nonzero(self) -> Result<Self> {
        if self.is_zero() {
            Err(Error::ZeroIndex)
        } else {
            Ok(self)
        }
    }
}

impl Add for WaveIndex {
    type Output = WaveIndex;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.k1 + rhs.k1, self.k2 + rhs.k2)
    }
}

impl Sub for WaveIndex {
    type Output = WaveIndex;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.k1 - rhs.k1, self.k2 - rhs.k2)
    }
}

impl Neg for WaveIndex {
    type Output = WaveIndex;
    fn neg(self) -> Self {
        Self::new(-self.k1, -self.k2)
    }
}

/// Iterate over all of `Z^2_0` inside the square band of half-width `n`.
pub fn band_all(n: u32) -> impl Iterator<Item = WaveIndex> {
    let n = n as i32;
    (-n..=n)
        .flat_map(move |k1| (-n..=n).map(move |k2| WaveIndex::new(k1, k2)))
        .filter(|k| !k.is_zero())
}

/// Iterate over `Z^2_+` inside the square band of half-width `n`, in storage order.
pub fn band_positive(n: u32) -> impl Iterator<Item = WaveIndex> {
    let layout = HalfLayout::new(n);
    (0..layout.len()).map(move |i| layout.index_to_wave(i))
}

/// Bijection between `Z^2_+` inside the band and `0..len`.
///
/// Storage order: first the axis `k1 = 0, k2 = 1..=n`, then columns
/// `k1 = 1..=n` each with `k2 = -n..=n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HalfLayout {
    n: u32,
}

impl HalfLayout {
    pub fn new(n: u32) -> Self {
        assert!(n >= 1, "cutoff must be positive");
        Self { n }
    }

    pub fn cutoff(&self) -> u32 {
        self.n
    }

    /// Number of stored modes: `2n^2 + 2n`.
    pub fn len(&self) -> usize {
        let n = self.n as usize;
        2 * n * n + 2 * n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Position of `k` in storage, for `k` in the positive half and in band.
    pub fn wave_to_index(&self, k: WaveIndex) -> Option<usize> {
        let n = self.n as i32;
        if k.norm_max() > n || !k.is_positive_half() {
            return None;
        }
        if k.k1 == 0 {
            Some((k.k2 - 1) as usize)
        } else {
            let col = (k.k1 - 1) as usize;
            let row = (k.k2 + n) as usize;
            Some(self.n as usize + col * (2 * self.n as usize + 1) + row)
        }
    }

    pub fn index_to_wave(&self, idx: usize) -> WaveIndex {
        let n = self.n as usize;
        if idx < n {
            WaveIndex::new(0, idx as i32 + 1)
        } else {
            let rest = idx - n;
            let width = 2 * n + 1;
            let col = rest / width;
            let row = rest % width;
            WaveIndex::new(col as i32 + 1, row as i32 - n as i32)
        }
    }
}
