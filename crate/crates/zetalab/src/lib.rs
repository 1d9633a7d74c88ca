//! Numerical laboratory for mean values of `|zeta(1/2+it)|` on the critical line.
//!
//! The crate evaluates the zeta function on the critical line two independent
//! ways (Riemann-Siegel and Euler-Maclaurin), computes the mean-square error
//! term `E(T)` both by direct quadrature and by Atkinson's explicit formula,
//! evaluates Gaussian-smoothed power moments `J_k(t,G)` by quadrature and by
//! explicit divisor series, ingests Maass-form spectral data for the
//! fourth-moment series, counts square-root spacing solutions exactly, and
//! runs the moment-transfer experiments that tie local bounds to global
//! moment bounds.  Everything is deterministic for a given configuration.

pub mod atkinson;
pub mod config;
pub mod dd;
pub mod error;
pub mod experiments;
pub mod kernels;
pub mod quad;
pub mod records;
pub mod selftest;
pub mod smoothed;
pub mod spacing;
pub mod spectral;
pub mod zeta;

pub use error::{Error, Result};

/// Euler's constant gamma = -Gamma'(1).
pub const EULER_GAMMA: f64 = 0.5772156649015329;
