//! Electromagnetic scattering and zero-point energetics of a spherical
//! vacuum cavity inside a dispersive, possibly lossy dielectric host.
//!
//! The library evaluates per-channel wall and center scattering amplitudes,
//! counts normal modes through the argument principle, builds the scatterers'
//! contribution to the density of states, and integrates the cutoff-regularized
//! ground-state energy and the finite energy shift of a polarizable atom at
//! the cavity center along the imaginary frequency axis.
//!
//! Conventions: time dependence `exp(-i omega t)`, so `h_l^(1)` is the
//! outgoing and `h_l^(2)` the ingoing spherical Hankel function. The numeric
//! core is dimensionless with `c = hbar = 1`; frequencies are measured in a
//! reference `omega_ref`, lengths in `c/omega_ref`, energies in
//! `hbar*omega_ref`. Unit conversions (eV, nm, Angstrom) live in the CLI
//! layer only.

// `!(x > 0.0)`-style guards are deliberate: they reject NaN along with the
// out-of-range values, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod energy;
pub mod media;
pub mod modes;
pub mod quadrature;
pub mod scaled;
pub mod scattering;
pub mod specfun;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("resonance inside differentiation stencil near omega = {0}")]
    Resonance(f64),
    #[error("phase unwrap failure: {0}")]
    Unwrap(String),
    #[error("contour passes through a zero of the mode condition after {0} nudge attempts")]
    ContourThroughZero(usize),
    #[error("config error: {0}")]
    Config(String),
    #[error("validation error: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
