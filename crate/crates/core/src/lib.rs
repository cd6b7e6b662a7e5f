//! Numerics for weighted mixed-norm spaces, time-frequency analysis and
//! nuclear traces.
//!
//! The crate is organised around six pieces:
//!
//! * [`mixed_norm`] — iterated weighted norms on tensor grids, sequence-space
//!   norms on lattices, duality pairings and the closed-form norm of simple
//!   functions.
//! * [`stft_gabor`] — the short-time Fourier transform, modulation and
//!   Wiener-amalgam norms, and Gabor-lattice coefficients.
//! * [`approx_operator`] — the explicit finite-rank projection built from a
//!   box partition, with contraction certificates.
//! * [`nuclear_ops`] — kernel operators from factored representations:
//!   traces, nuclear bounds, discretized spectra and Schatten quasi-norms.
//! * [`harmonic_oscillator`] — the Hermite eigen-system of `-Δ + |x|²`,
//!   spectral functions of it, and the associated trace machinery.
//! * plumbing shared by all of them: [`grid`], [`exponents`], [`weights`],
//!   [`simple`], [`rng`] and [`kahan`].
//!
//! All operations are pure: inputs are immutable and every reduction runs in
//! a fixed axis order with compensated accumulation, so results are
//! reproducible bit for bit across runs.

pub mod error;
pub mod kahan;
pub mod rng;

pub mod exponents;
pub mod grid;
pub mod simple;
pub mod weights;

pub mod approx_operator;
pub mod harmonic_oscillator;
pub mod json;
pub mod mixed_norm;
pub mod nuclear_ops;
pub mod random;
pub mod stft_gabor;

pub use error::{Error, Result};
pub use exponents::{dual_exponents, Exponent, ExponentTuple};
pub use grid::{GridAxis, GridFunction, TensorGrid};
pub use simple::{BoxRegion, SimpleFunction};
pub use weights::{AxisWeight, ElementaryWeight, SeparableWeight, Weight};
