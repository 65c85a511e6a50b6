//! Spectral toolkit for the 2D stochastic Navier-Stokes equation on the torus
//! driven by cylindrical fractional Brownian noise.
//!
//! The crate is organized around the splitting `v = z + u`: a linear Stokes
//! problem whose stationary solution `z` is a family of per-mode fractional
//! Ornstein-Uhlenbeck convolutions, and a random-coefficient nonlinear
//! equation for the remainder `u`. Modules:
//!
//! - [`wave`], [`field`], [`grid`]: wave-index bookkeeping, divergence-free
//!   spectral fields, Sobolev/dyadic Besov norms, FFT transforms.
//! - [`fbm`]: exact-in-law fractional Brownian sampling (circulant embedding
//!   with Cholesky fallback) and per-mode complex families.
//! - [`fou`]: the stationary stochastic convolution, its variance constant,
//!   and regularity diagnostics across cutoffs.
//! - [`bilinear`]: the Navier-Stokes nonlinearity as an exact Fourier
//!   convolution and as a dealiased pseudo-spectral product, plus trilinear
//!   identities.
//! - [`gibbs`], [`wick`]: the Gaussian invariant measure of the Stokes flow,
//!   moments of `B(z,z)` via Wick enumeration, and lattice-series oracles.
//! - [`solver`]: Picard fixed-point local solves, exponential-Euler global
//!   solves, energy ledgers, and the pathwise-uniqueness harness.
//! - [`acceptance`]: the end-to-end verification suite behind `fns2d accept`.
//!
//! Runnable demonstrations for each capability live in `examples/`; the thin
//! `fns2d` binary exposes the same entry points as subcommands.

pub mod acceptance;
pub mod bilinear;
pub mod cli;
pub mod error;
pub mod fbm;
pub mod field;
pub mod fou;
pub mod gibbs;
pub mod grid;
pub mod rng;
pub mod solver;
pub mod stats;
pub mod wave;
pub mod wick;

pub use error::{Error, Result};
pub use field::{besov_norm, FourierField, NormKind, NormSpec};
pub use wave::WaveIndex;
